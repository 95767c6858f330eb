//! `adsksurf qsnorm`: sampled lower bound of the cross-ratio norm
//! sup_Q |log |cr φ(Q)|| of a boundary circle map over symmetric quadruples.

use adsksurf::hyperbolic::{BoundaryPoint, Isom2};
use adsksurf::landslide::qs_norm_estimate;
use clap::Args;
use nalgebra::Matrix2;
use serde_json::json;

use crate::{EXIT_NUMERICAL, EXIT_USAGE};

#[derive(Args)]
pub struct QsnormArgs {
    /// Boundary map: `identity`, `moebius:a,b,c,d` (the map (ax+b)/(cx+d)),
    /// or `piecewise:x0,ml,mr` (slopes ml/mr left/right of x0, fixing x0
    /// and infinity).
    #[arg(long, default_value = "identity")]
    pub map: String,
    /// Number of symmetric quadruples sampled (the canonical quadruple
    /// (-1, 0, 1, inf) is always included).
    #[arg(long, default_value_t = 512)]
    pub samples: u64,
    #[arg(long)]
    pub json: bool,
}

enum MapSpec {
    Identity,
    Moebius(Isom2),
    Piecewise { x0: f64, ml: f64, mr: f64 },
}

fn parse_map(spec: &str) -> Result<MapSpec, String> {
    if spec == "identity" {
        return Ok(MapSpec::Identity);
    }
    if let Some(rest) = spec.strip_prefix("moebius:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad moebius coefficients: {e}"))?;
        if parts.len() != 4 {
            return Err("moebius spec needs four coefficients a,b,c,d".into());
        }
        let m = Matrix2::new(parts[0], parts[1], parts[2], parts[3]);
        let g = Isom2::new(m).map_err(|e| format!("degenerate moebius map: {e}"))?;
        return Ok(MapSpec::Moebius(g));
    }
    if let Some(rest) = spec.strip_prefix("piecewise:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad piecewise parameters: {e}"))?;
        if parts.len() != 3 || parts[1] <= 0.0 || parts[2] <= 0.0 {
            return Err("piecewise spec needs x0,ml,mr with positive slopes".into());
        }
        return Ok(MapSpec::Piecewise { x0: parts[0], ml: parts[1], mr: parts[2] });
    }
    Err(format!("unknown map spec `{spec}`"))
}

pub fn run(args: &QsnormArgs) -> i32 {
    let spec = match parse_map(&args.map) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let map: Box<dyn Fn(BoundaryPoint) -> BoundaryPoint> = match spec {
        MapSpec::Identity => Box::new(|p| p),
        MapSpec::Moebius(g) => Box::new(move |p| g.apply_boundary(p)),
        MapSpec::Piecewise { x0, ml, mr } => Box::new(move |p| match p {
            BoundaryPoint::Finite(x) if x > x0 => BoundaryPoint::Finite(x0 + mr * (x - x0)),
            BoundaryPoint::Finite(x) => BoundaryPoint::Finite(x0 + ml * (x - x0)),
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        }),
    };
    match qs_norm_estimate(map.as_ref(), args.samples) {
        Ok(estimate) => {
            if args.json {
                println!(
                    "{}",
                    json!({ "estimate": estimate, "samples": args.samples, "map": args.map })
                );
            } else {
                println!("qs norm >= {estimate:.12e} over {} symmetric quadruples", args.samples);
            }
            0
        }
        Err(e) => {
            eprintln!("error: degenerate quadruple in the sample set: {e}");
            EXIT_NUMERICAL
        }
    }
}
