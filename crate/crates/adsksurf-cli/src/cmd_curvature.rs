//! `adsksurf curvature`: per-node Gauss curvature of sampled data.
//!
//! `--mode lie` reads a surface patch (u,v,a,b,c,d), rebuilds the extrinsic
//! data and reports K = −1 − det B on the stencil interior. `--mode affine`
//! reads a chart graph (x,y,u) and evaluates the Monge-Ampere formula;
//! degenerate nodes are written as NaN and collected with reason codes.

use std::path::PathBuf;

use adsksurf::grid::Grid;
use adsksurf::numerics::Stencil;
use adsksurf::surface::{extrinsic, graph_curvature, ChartFunction, NodeFlag, SurfacePatch};
use clap::{Args, ValueEnum};
use nalgebra::Matrix2;
use serde_json::json;

use crate::io::{grid_layout, read_csv, write_csv};
use crate::{EXIT_NUMERICAL, EXIT_USAGE};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Intrinsic route: fundamental forms and the Gauss equation.
    Lie,
    /// Affine-chart graph route: the Monge-Ampere determinant formula.
    Affine,
}

#[derive(Args)]
pub struct CurvatureArgs {
    /// Input CSV: `u,v,a,b,c,d` for lie mode, `x,y,u` for affine mode.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Output CSV path (`u,v,K`).
    #[arg(long, default_value = "curvature.csv")]
    pub out: PathBuf,
    /// Stencil order for the finite differences (2 or 4).
    #[arg(long, default_value_t = 4)]
    pub order: u8,
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &CurvatureArgs) -> i32 {
    let stencil = match args.order {
        2 => Stencil::Order2,
        4 => Stencil::Order4,
        _ => {
            eprintln!("error: --order must be 2 or 4");
            return EXIT_USAGE;
        }
    };
    let (header, rows) = match read_csv(&args.input) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: malformed CSV: {e}");
            return EXIT_USAGE;
        }
    };
    match args.mode {
        Mode::Lie => run_lie(args, stencil, &header, &rows),
        Mode::Affine => run_affine(args, stencil, &header, &rows),
    }
}

fn run_lie(args: &CurvatureArgs, stencil: Stencil, header: &[String], rows: &[Vec<f64>]) -> i32 {
    if header.len() != 6 || rows.iter().any(|r| r.len() != 6) {
        eprintln!("error: lie mode expects six columns u,v,a,b,c,d");
        return EXIT_USAGE;
    }
    let (nu, nv, hu, hv, u0, v0) = match grid_layout(rows) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut k = 0;
    let grid = Grid::from_fn(nu, nv, hu, hv, u0, v0, |_, _| {
        let r = &rows[k];
        k += 1;
        Matrix2::new(r[2], r[3], r[4], r[5])
    });
    let patch = SurfacePatch { grid, normals: None };
    let quad = patch.quadric_residual();
    if quad > 1e-6 {
        eprintln!("error: nodes leave the unit-determinant quadric by {quad:.3e}");
        return EXIT_USAGE;
    }
    let ext = match extrinsic(&patch, stencil) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let mut out_rows = Vec::new();
    for (i, j) in ext.nodes.interior(stencil.margin()) {
        if let Some(n) = ext.nodes.get(i, j) {
            out_rows.push(vec![ext.nodes.u(i), ext.nodes.v(j), n.gauss]);
        }
    }
    write_output(args, "lie", out_rows, Vec::new())
}

fn run_affine(args: &CurvatureArgs, stencil: Stencil, header: &[String], rows: &[Vec<f64>]) -> i32 {
    if header.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        eprintln!("error: affine mode expects three columns x,y,u");
        return EXIT_USAGE;
    }
    let (nu, nv, hu, hv, u0, v0) = match grid_layout(rows) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut k = 0;
    let grid = Grid::from_fn(nu, nv, hu, hv, u0, v0, |_, _| {
        let u = rows[k][2];
        k += 1;
        u
    });
    let chart = ChartFunction { grid };
    let det_b = graph_curvature(&chart, stencil);
    let mut out_rows = Vec::new();
    let mut flagged = Vec::new();
    for (i, j) in det_b.interior(stencil.margin()) {
        let x = det_b.u(i);
        let y = det_b.v(j);
        match det_b.get(i, j) {
            Some(Ok(d)) => out_rows.push(vec![x, y, -1.0 - d]),
            Some(Err(flag)) => {
                let code = match flag {
                    NodeFlag::NonSpacelike => "E_SPACELIKE",
                    NodeFlag::ChartBoundary => "E_CHART",
                };
                flagged.push((x, y, code));
                out_rows.push(vec![x, y, f64::NAN]);
            }
            None => {}
        }
    }
    for (x, y, code) in &flagged {
        log::warn!("node ({x}, {y}) flagged {code}");
    }
    write_output(args, "affine", out_rows, flagged)
}

fn write_output(
    args: &CurvatureArgs,
    mode: &str,
    rows: Vec<Vec<f64>>,
    flagged: Vec<(f64, f64, &'static str)>,
) -> i32 {
    let params = [
        ("tool", "adsksurf curvature".to_string()),
        ("mode", mode.to_string()),
        ("order", args.order.to_string()),
        ("input", args.input.display().to_string()),
    ];
    let count = rows.len();
    if let Err(e) = write_csv(&args.out, &params, "u,v,K", rows.into_iter()) {
        eprintln!("error: writing {}: {e}", args.out.display());
        return EXIT_NUMERICAL;
    }
    if args.json {
        let flags: Vec<_> = flagged
            .iter()
            .map(|(x, y, code)| json!({ "u": x, "v": y, "code": code }))
            .collect();
        println!(
            "{}",
            json!({ "mode": mode, "nodes": count, "flagged": flags })
        );
    } else {
        println!("curvature ({mode}): {count} nodes, {} flagged", flagged.len());
    }
    0
}
