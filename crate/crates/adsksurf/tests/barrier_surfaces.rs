//! Integration tests tying the explicit landslide family to the surface
//! machinery: the built patches must satisfy every reconstruction identity,
//! the Gauss equation against the intrinsic Brioschi curvature, the
//! Monge–Ampère graph formula in the affine chart, and the one-sided
//! ordering of members with different curvature.

use adsksurf::barrier::*;
use adsksurf::hyperbolic::Isom2;
use adsksurf::landslide::{classify, codazzi_residual, sqrt_tensor};
use adsksurf::numerics::Stencil;
use adsksurf::representation::*;
use adsksurf::surface::*;
use nalgebra::Matrix2;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

const THETAS: [f64; 3] = [FRAC_PI_3, FRAC_PI_2, 2.0 * PI / 3.0];

fn patch_at(theta: f64, h: f64) -> (RepInput, RepOutput) {
    let profile = BarrierProfile::tabulate(theta, -1.45, -0.3, 600).unwrap();
    let nv = (0.5 / h).round() as usize + 1;
    let nu = (0.08 / h).round() as usize + 1;
    barrier_patch(&profile, -0.04, 0.04, -1.25, -0.75, nu, nv).unwrap()
}

#[test]
fn reconstruction_identities_on_the_family() {
    for theta in THETAS {
        let (input, out) = patch_at(theta, 5e-3);
        assert!(out.diagnostics.max_point_residual < 1e-8);
        assert!(out.diagnostics.max_frame_residual < 1e-8);
        assert!(out.diagnostics.flagged_nodes.is_empty());

        let ff = verify_first_ff(&out, &input, Stencil::Order4).unwrap();
        assert!(ff < 1e-4, "first-ff residual {ff} at theta {theta}");
        let shape = verify_shape(&out, &input, Stencil::Order4).unwrap();
        assert!(shape < 1e-4, "shape residual {shape} at theta {theta}");
        let orth = verify_orthogonality(&out, &input, Stencil::Order4).unwrap();
        assert!(orth < 1e-4, "orthogonality defect {orth}");
        let diff = verify_differential_formula(&out, &input, Stencil::Order4).unwrap();
        assert!(diff < 1e-4, "differential formula defect {diff}");

        // curvature law det B = tan²(θ/2)
        let ext = extrinsic(&out.patch, Stencil::Order4).unwrap();
        let expect = (theta / 2.0).tan().powi(2);
        for (i, j) in ext.nodes.interior(2) {
            let node = ext.nodes.get(i, j).unwrap();
            assert!(
                (node.shape.determinant() - expect).abs() < 1e-4,
                "det B = {} vs {expect}",
                node.shape.determinant()
            );
            assert!((node.gauss - (-1.0 - expect)).abs() < 1e-4);
        }

        // the projections recover the parameter and the map
        let (wl, wr) =
            projection_roundtrip(&out, &input, Stencil::Order4, NormalSource::Attached).unwrap();
        assert!(wl < 1e-9 && wr < 1e-9, "attached roundtrip {wl} {wr}");
        let (wl, wr) = projection_roundtrip(
            &out,
            &input,
            Stencil::Order4,
            NormalSource::FiniteDifference,
        )
        .unwrap();
        assert!(wl < 1e-6 && wr < 1e-6, "fd roundtrip {wl} {wr}");
    }
}

#[test]
fn projection_routes_and_injectivity() {
    let (input, out) = patch_at(FRAC_PI_2, 1e-2);
    let a = projections(&out.patch, Stencil::Order2, NormalSource::FiniteDifference).unwrap();
    let b = projections_via_dual(&out.patch, Stencil::Order2).unwrap();
    assert!(projection_route_disagreement(&a, &b) < 1e-8);

    // desk-scale injectivity: distinct grid nodes stay separated in both
    // projections (convex patch)
    let vals = &input.phi.values;
    let mut pts_l = Vec::new();
    let mut pts_r = Vec::new();
    for i in 0..vals.nu {
        for j in 0..vals.nv {
            if let Some(p) = a.left.get(i, j) {
                pts_l.push(((i, j), *p));
            }
            if let Some(p) = a.right.get(i, j) {
                pts_r.push(((i, j), *p));
            }
        }
    }
    for pts in [pts_l, pts_r] {
        for (k, ((i1, j1), p)) in pts.iter().enumerate() {
            for ((i2, j2), q) in pts.iter().skip(k + 1) {
                let adjacent = i1.abs_diff(*i2) <= 1 && j1.abs_diff(*j2) <= 1;
                if !adjacent {
                    assert!(p.dist(q) > 1e-8, "projection collision off-diagonal");
                }
            }
        }
    }
}

#[test]
fn pullback_identities_discriminate_sides() {
    let (_, out) = patch_at(FRAC_PI_2, 5e-3);
    let ext = extrinsic(&out.patch, Stencil::Order4).unwrap();
    let proj = projections(&out.patch, Stencil::Order4, NormalSource::Attached).unwrap();
    let (_, l) = pullback_residual(&out.patch, &ext, &proj, Side::Left);
    let (_, r) = pullback_residual(&out.patch, &ext, &proj, Side::Right);
    assert!(l < 1e-4, "left pullback {l}");
    assert!(r < 1e-4, "right pullback {r}");
    let swapped = Projections { left: proj.right.clone(), right: proj.left.clone() };
    let (_, sw) = pullback_residual(&out.patch, &ext, &swapped, Side::Left);
    assert!(sw > 0.1, "swapped sides must fail loudly, got {sw}");
}

#[test]
fn pullback_residual_scales_at_second_order() {
    let worst_at = |h: f64| {
        let (_, out) = patch_at(FRAC_PI_2, h);
        let ext = extrinsic(&out.patch, Stencil::Order2).unwrap();
        let proj = projections(&out.patch, Stencil::Order2, NormalSource::Attached).unwrap();
        let (_, l) = pullback_residual(&out.patch, &ext, &proj, Side::Left);
        let (_, r) = pullback_residual(&out.patch, &ext, &proj, Side::Right);
        l.max(r)
    };
    let order = (worst_at(1e-2) / worst_at(5e-3)).log2();
    assert!(order > 1.7 && order < 2.3, "measured order {order}");
}

#[test]
fn gauss_equation_against_brioschi() {
    // flat reference
    let plane = involution_patch(41, 41, 0.01, 0.01, -0.2, -0.8);
    let ext = extrinsic(&plane, Stencil::Order2).unwrap();
    let kb = brioschi_curvature(&ext);
    for (i, j) in kb.interior(2) {
        if let Some(k) = kb.get(i, j) {
            let node = ext.nodes.get(i, j).unwrap();
            assert!((k - node.gauss).abs() < 1e-3);
        }
    }
    // curved members, including the measured convergence order
    for theta in THETAS {
        let worst_at = |h: f64, stencil: Stencil| {
            let (_, out) = patch_at(theta, h);
            let ext = extrinsic(&out.patch, stencil).unwrap();
            let kb = brioschi_curvature(&ext);
            let mut worst = 0.0_f64;
            for (i, j) in kb.interior(2 * stencil.margin()) {
                if let Some(k) = kb.get(i, j) {
                    worst = worst.max((k - ext.nodes.get(i, j).unwrap().gauss).abs());
                }
            }
            worst
        };
        assert!(worst_at(5e-3, Stencil::Order4) < 1e-3);
        let order = (worst_at(1e-2, Stencil::Order2) / worst_at(5e-3, Stencil::Order2)).log2();
        assert!(order > 1.7 && order < 2.3, "measured order {order} at theta {theta}");
    }
}

#[test]
fn assembled_tensor_matches_sqrt_and_is_codazzi() {
    let theta = 2.0 * PI / 3.0;
    let (input, _) = patch_at(theta, 1e-2);
    // b = R_ρ b₀ with b₀ the square root of the pulled-back metric
    let b0 = sqrt_tensor(&input.phi).unwrap();
    for i in 0..input.phi.values.nu {
        for j in 0..input.phi.values.nv {
            let b = input.b.field.get(i, j);
            let s = b0.field.get(i, j);
            // b₀ = Rᵀb and tr b₀ = √(4 + φ′²)
            assert!((b.transpose() * b - s * s).norm() < 1e-10);
            assert!((b.trace() - 2.0 * theta.cos()).abs() < 1e-12);
        }
    }
    let coarse = {
        let (input, _) = patch_at(theta, 1e-2);
        codazzi_residual(&input.b, Stencil::Order2).1
    };
    let fine = {
        let (input, _) = patch_at(theta, 5e-3);
        codazzi_residual(&input.b, Stencil::Order2).1
    };
    assert!(coarse < 1e-3, "Codazzi residual {coarse}");
    let order = (coarse / fine).log2();
    assert!(order > 1.7 && order < 2.3, "measured order {order}");
}

#[test]
fn duality_and_parallel_surfaces() {
    let theta = FRAC_PI_2;
    let (input, out) = patch_at(theta, 5e-3);
    // σ(−b) equals the half-period evolution
    let dual_defect = verify_dual_build(&input).unwrap();
    assert!(dual_defect < 1e-8, "dual build defect {dual_defect}");
    // K* = −K/(K+1)
    let k = -1.0 / (theta / 2.0).cos().powi(2);
    let kstar = -k / (k + 1.0);
    let dual =
        normal_evolution(&out.patch, FRAC_PI_2, Stencil::Order4, NormalSource::Attached).unwrap();
    let ext = extrinsic(&dual, Stencil::Order4).unwrap();
    for (i, j) in ext.nodes.interior(2) {
        let node = ext.nodes.get(i, j).unwrap();
        assert!((node.gauss - kstar).abs() < 1e-3, "K* = {}", node.gauss);
    }
    // quarter-period parallel surface is maximal
    let quarter = normal_evolution(
        &out.patch,
        std::f64::consts::FRAC_PI_4,
        Stencil::Order4,
        NormalSource::Attached,
    )
    .unwrap();
    let ext = extrinsic(&quarter, Stencil::Order4).unwrap();
    for (i, j) in ext.nodes.interior(2) {
        let tr = ext.nodes.get(i, j).unwrap().shape.trace();
        assert!(tr.abs() < 1e-3, "tr B = {tr} on the middle surface");
    }
    // projections survive the evolution
    let p0 = projections(&out.patch, Stencil::Order4, NormalSource::Attached).unwrap();
    let p1 = projections(&dual, Stencil::Order4, NormalSource::Attached).unwrap();
    assert!(projection_route_disagreement(&p0, &p1) < 1e-8);
}

#[test]
fn equivariance_parallel_shift_and_reference_freedom() {
    let (input, out) = patch_at(FRAC_PI_2, 1e-2);
    // the family commutes with the strip translations
    let ga = Isom2::new(Matrix2::new(0.6_f64.exp(), 0.0, 0.0, (-0.6_f64).exp())).unwrap();
    let eq = verify_equivariance(&out, &input, &ga, &ga).unwrap();
    assert!(eq < 1e-8, "translation invariance defect {eq}");
    // generic pairs
    let alpha = Isom2::new(
        adsksurf::ads::exp_sl2(&Matrix2::new(0.2, -0.4, 0.3, -0.2)).unwrap(),
    )
    .unwrap();
    let beta = Isom2::new(
        adsksurf::ads::exp_sl2(&Matrix2::new(-0.3, 0.1, 0.6, 0.3)).unwrap(),
    )
    .unwrap();
    let eq = verify_equivariance(&out, &input, &alpha, &beta).unwrap();
    assert!(eq < 1e-8, "equivariance defect {eq}");
    for rho in [std::f64::consts::FRAC_PI_4, FRAC_PI_2, PI] {
        let shift = verify_parallel_shift(&input, rho).unwrap();
        assert!(shift < 1e-8, "parallel shift defect {shift} at rho {rho}");
    }
    for angle in [0.7, 2.1] {
        assert!(reference_independence(&input, angle).unwrap() < 1e-10);
    }
}

#[test]
fn classification_recovers_the_parameter() {
    for theta in [FRAC_PI_2, 2.0 * PI / 3.0] {
        let profile = BarrierProfile::tabulate(theta, -1.45, -0.3, 600).unwrap();
        let (input, _) = barrier_patch(&profile, -0.02, 0.02, -1.3, -0.4, 5, 181).unwrap();
        let cls = classify(&input.phi, Stencil::Order4, 1e-4);
        assert!(cls.is_landslide);
        assert!(
            (cls.theta - theta).abs() < 1e-6,
            "theta estimate {} vs {theta}",
            cls.theta
        );
        assert_eq!(cls.is_minimal_lagrangian, theta == FRAC_PI_2);
        assert!(cls.det_residual < 1e-9);
    }
}

#[test]
fn monge_ampere_graph_formula_cross_model() {
    let theta = FRAC_PI_2;
    let profile = BarrierProfile::tabulate(theta, -1.45, -0.3, 600).unwrap();
    let expect = (theta / 2.0).tan().powi(2);
    let worst_at = |n: usize, stencil: Stencil| {
        let (hx, hy) = (0.3 / (n as f64 - 1.0), 0.8 / (n as f64 - 1.0));
        let graph = chart_graph(&profile, 1.3, -0.4, hx, hy, n, n, (0.0, -0.8)).unwrap();
        let kgrid = graph_curvature(&graph, stencil);
        let mut worst = 0.0_f64;
        let mut count = 0;
        for (i, j) in kgrid.interior(stencil.margin()) {
            match kgrid.get(i, j) {
                Some(Ok(det_b)) => {
                    worst = worst.max((det_b - expect).abs());
                    count += 1;
                }
                Some(Err(flag)) => panic!("unexpected degenerate node: {flag:?}"),
                None => {}
            }
        }
        assert!(count > 0);
        worst
    };
    // agreement with the intrinsic model at fourth order
    assert!(worst_at(41, Stencil::Order4) < 1e-3);
    // and second-order scaling: doubling the resolution quarters the error
    let order = (worst_at(21, Stencil::Order2) / worst_at(41, Stencil::Order2)).log2();
    assert!(order > 1.6 && order < 2.4, "measured order {order}");
}

#[test]
fn members_are_strictly_nested() {
    let window_s = (-1.0, 1.0);
    let window_t = (-1.2, -0.3);
    let first = nesting_check(FRAC_PI_3, FRAC_PI_2, window_s, window_t, 13).unwrap();
    assert!(first.one_sided, "members must not cross");
    assert!(first.margin > 0.0);
    let second = nesting_check(FRAC_PI_2, 2.0 * PI / 3.0, window_s, window_t, 13).unwrap();
    assert!(second.one_sided);
    assert!(second.margin > 0.0);
    // ordering direction consistent across the two pairs
    assert_eq!(first.sign, second.sign);
    // equal parameters leave no gap
    let same = nesting_check(FRAC_PI_2, FRAC_PI_2, window_s, window_t, 9).unwrap();
    assert!(same.margin < 1e-9);
}
