//! `adsksurf barrier`: tabulate one member of the family, build the surface
//! patch and export profile.json, patch.csv (u,v,a,b,c,d) and affine.csv
//! (x,y,t).

use std::path::PathBuf;

use adsksurf::ads::{to_affine, AdsPoint};
use adsksurf::barrier::{barrier_patch, BarrierProfile};
use adsksurf::numerics::Stencil;
use adsksurf::surface::extrinsic;
use clap::Args;
use serde_json::json;

use crate::io::{fmt_f64, write_csv};
use crate::{EXIT_NUMERICAL, EXIT_USAGE};

#[derive(Args)]
pub struct BarrierArgs {
    /// Landslide parameter in (0, pi); the surface curvature is
    /// -1/cos^2(theta/2).
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = -1.4, allow_negative_numbers = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub s_max: f64,
    /// Grid nodes per direction.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Absolute tolerance recorded in the output headers.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Machine-readable summary on stdout.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &BarrierArgs) -> i32 {
    if !(args.theta > 0.0 && args.theta < std::f64::consts::PI) {
        eprintln!("error: --theta must lie in (0, pi), got {}", args.theta);
        return EXIT_USAGE;
    }
    if !(args.t_min < args.t_max
        && args.t_min > -std::f64::consts::FRAC_PI_2
        && args.t_max < 0.0
        && args.s_min < args.s_max
        && args.n >= 8)
    {
        eprintln!("error: invalid ranges (need -pi/2 < t_min < t_max < 0, s_min < s_max, n >= 8)");
        return EXIT_USAGE;
    }
    let pad = 0.02 * (args.t_max - args.t_min);
    let profile = match BarrierProfile::tabulate(
        args.theta,
        (args.t_min - pad).max(-std::f64::consts::FRAC_PI_2 + 1e-6),
        (args.t_max + pad).min(-1e-6),
        600,
    ) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: tabulation failed: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let built = barrier_patch(
        &profile,
        args.s_min,
        args.s_max,
        args.t_min,
        args.t_max,
        args.n,
        args.n,
    );
    let (input, out) = match built {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: surface construction failed: {e}");
            return EXIT_NUMERICAL;
        }
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return EXIT_NUMERICAL;
    }

    // profile.json
    let profile_json = json!({
        "theta": profile.theta,
        "C": profile.c,
        "t": profile.t,
        "phi": profile.phi,
        "phi_prime": profile.phi_prime,
        "rho": profile.rho,
        "xi": profile.xi,
    });
    if let Err(e) = std::fs::write(
        args.out.join("profile.json"),
        serde_json::to_string_pretty(&profile_json).expect("serializable") + "\n",
    ) {
        eprintln!("error: writing profile.json: {e}");
        return EXIT_NUMERICAL;
    }

    let params = [
        ("tool", "adsksurf barrier".to_string()),
        ("theta", fmt_f64(args.theta)),
        ("t_min", fmt_f64(args.t_min)),
        ("t_max", fmt_f64(args.t_max)),
        ("s_min", fmt_f64(args.s_min)),
        ("s_max", fmt_f64(args.s_max)),
        ("n", args.n.to_string()),
        ("tol", fmt_f64(args.tol)),
    ];

    // patch.csv: parameters and canonical matrix entries
    let grid = &out.patch.grid;
    let patch_rows = (0..grid.nu).flat_map(|i| {
        (0..grid.nv).map(move |j| {
            let m = grid.get(i, j);
            vec![grid.u(i), grid.v(j), m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
        })
    });
    if let Err(e) = write_csv(&args.out.join("patch.csv"), &params, "u,v,a,b,c,d", patch_rows) {
        eprintln!("error: writing patch.csv: {e}");
        return EXIT_NUMERICAL;
    }

    // affine.csv: chart coordinates of the nodes (chart-infinite nodes are
    // skipped; the family stays inside the chart on reasonable windows)
    let mut affine_rows = Vec::new();
    let mut skipped = 0usize;
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            match AdsPoint::new(*grid.get(i, j)).ok().and_then(|p| to_affine(&p).ok()) {
                Some(aff) => affine_rows.push(vec![aff.x, aff.y, aff.t]),
                None => skipped += 1,
            }
        }
    }
    if let Err(e) = write_csv(
        &args.out.join("affine.csv"),
        &params,
        "x,y,t",
        affine_rows.into_iter(),
    ) {
        eprintln!("error: writing affine.csv: {e}");
        return EXIT_NUMERICAL;
    }

    // diagnostics.json: build residuals and flagged nodes
    let diagnostics = json!({
        "theta": args.theta,
        "max_residuals": {
            "point": out.diagnostics.max_point_residual,
            "frame": out.diagnostics.max_frame_residual,
        },
        "flagged_nodes": out.diagnostics.flagged_nodes,
    });
    if let Err(e) = std::fs::write(
        args.out.join("diagnostics.json"),
        serde_json::to_string_pretty(&diagnostics).expect("serializable") + "\n",
    ) {
        eprintln!("error: writing diagnostics.json: {e}");
        return EXIT_NUMERICAL;
    }

    // tensor.csv: the calibrated field b = R_rho b0 on the domain grid
    let b = &input.b.field;
    let tensor_rows = (0..b.nu).flat_map(|i| {
        (0..b.nv).map(move |j| {
            let m = b.get(i, j);
            vec![b.u(i), b.v(j), m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
        })
    });
    if let Err(e) = write_csv(
        &args.out.join("tensor.csv"),
        &params,
        "s,t,b11,b12,b21,b22",
        tensor_rows,
    ) {
        eprintln!("error: writing tensor.csv: {e}");
        return EXIT_NUMERICAL;
    }

    // summary: mean det B over the interior
    let ext = match extrinsic(&out.patch, Stencil::Order4) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: extrinsic data failed: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, j) in ext.nodes.interior(2) {
        if let Some(n) = ext.nodes.get(i, j) {
            sum += n.shape.determinant();
            count += 1;
        }
    }
    let mean_det_b = sum / count.max(1) as f64;
    let expected = (args.theta / 2.0).tan().powi(2);
    if args.json {
        let summary = json!({
            "theta": args.theta,
            "nodes": grid.nu * grid.nv,
            "det_b_mean": mean_det_b,
            "det_b_expected": expected,
            "curvature": -1.0 - expected,
            "max_point_residual": out.diagnostics.max_point_residual,
            "max_frame_residual": out.diagnostics.max_frame_residual,
            "chart_skipped_nodes": skipped,
        });
        println!("{}", serde_json::to_string(&summary).expect("serializable"));
    } else {
        println!(
            "barrier theta={} nodes={} det_B mean={:.6} (expected {:.6}) K={:.6}",
            args.theta,
            grid.nu * grid.nv,
            mean_det_b,
            expected,
            -1.0 - expected
        );
    }
    log::info!("wrote profile.json, patch.csv, affine.csv to {}", args.out.display());
    0
}
