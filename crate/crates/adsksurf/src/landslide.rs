//! Tensor calculus attached to area-preserving diffeomorphisms of domains of
//! ℍ², in the strip chart.
//!
//! For an orientation-preserving local diffeomorphism Φ there is a unique
//! positive-definite, self-adjoint b₀ with Φ*g = g(b₀·, b₀·): the square
//! root of g⁻¹Φ*g. Every other tensor producing the same pull-back is
//! R_ρ b₀ for a rotation angle ρ. A map Φ is a θ-landslide when b = R_ρ b₀
//! can be calibrated so that
//!
//!   det b = 1,  tr b = 2 cos θ,  tr(Jb) < 0,  d^∇ b = 0,
//!
//! the last being the Codazzi condition for the Levi-Civita connection of
//! ℍ². θ = π/2 recovers minimal Lagrangian maps (b₀ itself Codazzi).
//!
//! Everything here works on rectangular (s, t) grids with the strip metric
//! |dw|²/cos²t and its connection ∇_{∂s}∂s = −tan t ∂t,
//! ∇_{∂s}∂t = tan t ∂s, ∇_{∂t}∂t = tan t ∂t.

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::grid::Grid;
use crate::hyperbolic::{cross_ratio, BoundaryPoint, HypError, Isom2};
use crate::numerics::{halton, Stencil};

#[derive(Debug, Error)]
pub enum LandslideError {
    #[error("pulled-back metric is not positive definite at node ({0}, {1})")]
    NotPositiveDefinite(usize, usize),
    #[error("grid map is not orientation-preserving at node ({0}, {1}): det dPhi = {2}")]
    OrientationReversed(usize, usize, f64),
    #[error("no real rotation angle at node ({0}, {1}): |2cos(theta)| = {2} > tr b0 = {3}")]
    InfeasibleTheta(usize, usize, f64, f64),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// J in the (∂s, ∂t) frame: J∂s = ∂t.
pub fn j_matrix() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Rotation by ρ acting on tangent vectors: cos ρ·E + sin ρ·J.
pub fn rotation(rho: f64) -> Matrix2<f64> {
    Matrix2::new(rho.cos(), -rho.sin(), rho.sin(), rho.cos())
}

/// A sampled map Φ between domains of ℍ², in strip coordinates, together
/// with its differential at every node.
///
/// The domain is the rectangular grid; `values` holds Φ(s,t) as strip
/// coordinates and `jets` the 2×2 matrix of dΦ in the coordinate frames.
/// Jets are either supplied in closed form or filled by central differences
/// of the value grid (`analytic_jets` records which).
#[derive(Debug, Clone)]
pub struct DiffeoGrid {
    pub values: Grid<Vector2<f64>>,
    pub jets: Grid<Matrix2<f64>>,
    pub analytic_jets: bool,
}

impl DiffeoGrid {
    /// Sample `phi` and fill jets by second-order central differences; the
    /// outermost ring of nodes keeps one-sided differences.
    pub fn from_map(
        nu: usize,
        nv: usize,
        hu: f64,
        hv: f64,
        u0: f64,
        v0: f64,
        phi: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<Self, LandslideError> {
        let values = Grid::from_fn(nu, nv, hu, hv, u0, v0, |s, t| {
            let (a, b) = phi(s, t);
            Vector2::new(a, b)
        });
        let jets = values.map_indexed(|i, j, _| {
            let col_s = if i == 0 {
                (values.get(1, j) - values.get(0, j)) / hu
            } else if i == nu - 1 {
                (values.get(nu - 1, j) - values.get(nu - 2, j)) / hu
            } else {
                (values.get(i + 1, j) - values.get(i - 1, j)) / (2.0 * hu)
            };
            let col_t = if j == 0 {
                (values.get(i, 1) - values.get(i, 0)) / hv
            } else if j == nv - 1 {
                (values.get(i, nv - 1) - values.get(i, nv - 2)) / hv
            } else {
                (values.get(i, j + 1) - values.get(i, j - 1)) / (2.0 * hv)
            };
            Matrix2::from_columns(&[col_s, col_t])
        });
        let grid = DiffeoGrid { values, jets, analytic_jets: false };
        grid.check_orientation()?;
        Ok(grid)
    }

    /// Sample `phi` together with its exact differential.
    pub fn from_map_with_jets(
        nu: usize,
        nv: usize,
        hu: f64,
        hv: f64,
        u0: f64,
        v0: f64,
        phi: impl Fn(f64, f64) -> (f64, f64),
        dphi: impl Fn(f64, f64) -> Matrix2<f64>,
    ) -> Result<Self, LandslideError> {
        let values = Grid::from_fn(nu, nv, hu, hv, u0, v0, |s, t| {
            let (a, b) = phi(s, t);
            Vector2::new(a, b)
        });
        let jets = Grid::from_fn(nu, nv, hu, hv, u0, v0, &dphi);
        let grid = DiffeoGrid { values, jets, analytic_jets: true };
        grid.check_orientation()?;
        Ok(grid)
    }

    fn check_orientation(&self) -> Result<(), LandslideError> {
        for (i, j) in self.values.interior(1) {
            let det = self.jets.get(i, j).determinant();
            if det <= 0.0 {
                return Err(LandslideError::OrientationReversed(i, j, det));
            }
        }
        Ok(())
    }

    /// g⁻¹ Φ*g at node (i, j): cos²t / cos²t_Φ · (dΦ)ᵀ dΦ.
    pub fn metric_quotient(&self, i: usize, j: usize) -> Matrix2<f64> {
        let t = self.values.v(j);
        let t_img = self.values.get(i, j)[1];
        let d = self.jets.get(i, j);
        let ratio = (t.cos() / t_img.cos()).powi(2);
        d.transpose() * d * ratio
    }
}

/// A field of 2×2 matrices over a strip-chart grid, acting on tangent
/// vectors in the (∂s, ∂t) coordinate frame.
#[derive(Debug, Clone)]
pub struct Tensor2Field {
    pub field: Grid<Matrix2<f64>>,
}

/// The square-root tensor b₀ of Φ: the unique positive-definite,
/// g-self-adjoint solution of g(b₀·, b₀·) = Φ*g.
///
/// Computed per node from m = g⁻¹Φ*g by the Cayley–Hamilton closed form
/// b₀ = (m + √det m · E) / √(tr m + 2√det m).
pub fn sqrt_tensor(phi: &DiffeoGrid) -> Result<Tensor2Field, LandslideError> {
    let mut bad = None;
    let field = phi.values.map_indexed(|i, j, _| {
        let m = phi.metric_quotient(i, j);
        let det = m.determinant();
        let tr = m.trace();
        if det <= 0.0 || tr <= 0.0 {
            bad.get_or_insert((i, j));
            return Matrix2::identity();
        }
        let s = det.sqrt();
        (m + Matrix2::identity() * s) / (tr + 2.0 * s).sqrt()
    });
    if let Some((i, j)) = bad {
        return Err(LandslideError::NotPositiveDefinite(i, j));
    }
    Ok(Tensor2Field { field })
}

/// Calibrate b = R_ρ b₀ so that tr b = 2 cos θ with tr(Jb) < 0.
///
/// Since tr(R_ρ b₀) = cos ρ · tr b₀ and tr b₀ ≥ 2 for area-preserving maps,
/// the angle is ρ = +arccos(2cosθ / tr b₀); this branch has sin ρ ≥ 0, which
/// forces tr(Jb) = −sin ρ · tr b₀ ≤ 0.
pub fn rotate_b(
    b0: &Tensor2Field,
    theta: f64,
) -> Result<(Tensor2Field, Grid<f64>), LandslideError> {
    let target = 2.0 * theta.cos();
    let mut rho_grid = b0.field.map_indexed(|_, _, _| 0.0);
    let mut failed = None;
    let field = b0.field.map_indexed(|i, j, b| {
        let tr = b.trace();
        if target.abs() > tr {
            failed.get_or_insert((i, j, target.abs(), tr));
            return *b;
        }
        let rho = (target / tr).acos();
        *rho_grid.get_mut(i, j) = rho;
        rotation(rho) * b
    });
    if let Some((i, j, a, tr)) = failed {
        return Err(LandslideError::InfeasibleTheta(i, j, a, tr));
    }
    Ok((Tensor2Field { field }, rho_grid))
}

/// Pointwise defect of the Codazzi equation, d^∇b(∂s, ∂t) = ∇_{∂s}(b ∂t) −
/// ∇_{∂t}(b ∂s), measured in the strip metric.
///
/// Field derivatives are central differences of the requested order; nodes
/// inside the stencil margin report zero and are excluded from the returned
/// maximum.
pub fn codazzi_residual(b: &Tensor2Field, stencil: Stencil) -> (Grid<f64>, f64) {
    let g = &b.field;
    let m = stencil.margin();
    let mut worst = 0.0_f64;
    let res = g.map_indexed(|i, j, bij| {
        if i < m || i + m >= g.nu || j < m || j + m >= g.nv {
            return 0.0;
        }
        let t = g.v(j);
        let tt = t.tan();
        let at = |i: usize, j: usize, r: usize, c: usize| g.get(i, j)[(r, c)];
        let ds = |r: usize, c: usize| match stencil {
            Stencil::Order2 => stencil.d1(0.0, at(i - 1, j, r, c), at(i + 1, j, r, c), 0.0, g.hu),
            Stencil::Order4 => stencil.d1(
                at(i - 2, j, r, c),
                at(i - 1, j, r, c),
                at(i + 1, j, r, c),
                at(i + 2, j, r, c),
                g.hu,
            ),
        };
        let dt = |r: usize, c: usize| match stencil {
            Stencil::Order2 => stencil.d1(0.0, at(i, j - 1, r, c), at(i, j + 1, r, c), 0.0, g.hv),
            Stencil::Order4 => stencil.d1(
                at(i, j - 2, r, c),
                at(i, j - 1, r, c),
                at(i, j + 1, r, c),
                at(i, j + 2, r, c),
                g.hv,
            ),
        };
        // ∇_{∂s}(b∂t) − ∇_{∂t}(b∂s) componentwise in (∂s, ∂t)
        let v_s = ds(0, 1) + bij[(1, 1)] * tt - dt(0, 0) - bij[(0, 0)] * tt;
        let v_t = ds(1, 1) - bij[(0, 1)] * tt - dt(1, 0) - bij[(1, 0)] * tt;
        // g-norm of the defect vector
        let r = (v_s * v_s + v_t * v_t).sqrt() / t.cos();
        worst = worst.max(r);
        r
    });
    (res, worst)
}

/// Diagnostics produced by [`classify`].
#[derive(Debug, Clone)]
pub struct Classification {
    /// Landslide parameter estimate, in (0, π); 0.0 for isometries.
    pub theta: f64,
    pub is_landslide: bool,
    pub is_minimal_lagrangian: bool,
    /// Degenerate case b₀ ≡ E: the map is an isometry (θ ∈ {0, π}).
    pub is_isometry: bool,
    /// max |det b₀ − 1| (area-preservation defect).
    pub det_residual: f64,
    /// Codazzi residual of the calibrated tensor at `theta`.
    pub codazzi_residual: f64,
    /// max |tr b − 2cosθ| after calibration.
    pub trace_residual: f64,
}

/// Classify a sampled map: estimate θ and decide whether it is a
/// θ-landslide at the given tolerance.
///
/// Calibration forces tr(R_ρ b₀) = 2cosθ for every feasible θ, so the
/// discriminating quantity is the Codazzi residual of the calibrated
/// tensor; θ is estimated by minimizing it over (0, π) with a coarse scan
/// refined by golden-section search. Pure diagnostics, no panics.
pub fn classify(phi: &DiffeoGrid, stencil: Stencil, tol: f64) -> Classification {
    let b0 = match sqrt_tensor(phi) {
        Ok(b) => b,
        Err(_) => {
            return Classification {
                theta: f64::NAN,
                is_landslide: false,
                is_minimal_lagrangian: false,
                is_isometry: false,
                det_residual: f64::INFINITY,
                codazzi_residual: f64::INFINITY,
                trace_residual: f64::INFINITY,
            }
        }
    };
    let det_residual = b0
        .field
        .iter()
        .map(|m| (m.determinant() - 1.0).abs())
        .fold(0.0, f64::max);
    let id_defect = b0
        .field
        .iter()
        .map(|m| (m - Matrix2::identity()).norm())
        .fold(0.0, f64::max);
    if id_defect < tol {
        return Classification {
            theta: 0.0,
            is_landslide: false,
            is_minimal_lagrangian: false,
            is_isometry: true,
            det_residual,
            codazzi_residual: 0.0,
            trace_residual: 0.0,
        };
    }

    let residual_at = |theta: f64| -> f64 {
        match rotate_b(&b0, theta) {
            Ok((b, _)) => codazzi_residual(&b, stencil).1,
            Err(_) => f64::INFINITY,
        }
    };
    // coarse scan, then golden-section refinement on the bracketing interval
    let n_scan = 256;
    let mut best_k = 1;
    let mut best = f64::INFINITY;
    for k in 1..n_scan {
        let theta = std::f64::consts::PI * k as f64 / n_scan as f64;
        let r = residual_at(theta);
        if r < best {
            best = r;
            best_k = k;
        }
    }
    let step = std::f64::consts::PI / n_scan as f64;
    let mut lo = (best_k as f64 - 1.0) * step;
    let mut hi = (best_k as f64 + 1.0) * step;
    let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - gr * (hi - lo);
    let mut d = lo + gr * (hi - lo);
    let mut fc = residual_at(c);
    let mut fd = residual_at(d);
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = residual_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = residual_at(d);
        }
    }
    let theta = 0.5 * (lo + hi);
    let codazzi = residual_at(theta);
    let trace_residual = match rotate_b(&b0, theta) {
        Ok((b, _)) => b
            .field
            .iter()
            .map(|m| (m.trace() - 2.0 * theta.cos()).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let is_landslide = codazzi < tol && det_residual < tol;
    Classification {
        theta,
        is_landslide,
        is_minimal_lagrangian: is_landslide
            && (theta - std::f64::consts::FRAC_PI_2).abs() < tol.max(1e-6),
        is_isometry: false,
        det_residual,
        codazzi_residual: codazzi,
        trace_residual,
    }
}

/// Deterministic family of Möbius maps used to sweep symmetric quadruples:
/// translation · dilation · boundary rotation with Halton-distributed
/// parameters. Index 0 is the identity, so the canonical quadruple
/// (−1, 0, 1, ∞) itself is always in the sample set.
fn moebius_family(k: u64) -> Isom2 {
    if k == 0 {
        return Isom2::identity();
    }
    let a = 4.0 * (halton(k, 2) - 0.5);
    let lam = (2.0 * (halton(k, 3) - 0.5)).exp();
    let ang = std::f64::consts::PI * (2.0 * halton(k, 5) - 1.0);
    let tr = Isom2::new(Matrix2::new(1.0, a, 0.0, 1.0)).unwrap();
    let dil = Isom2::new(Matrix2::new(lam, 0.0, 0.0, 1.0 / lam)).unwrap();
    let h = ang / 2.0;
    let rot = Isom2::new(Matrix2::new(h.cos(), h.sin(), -h.sin(), h.cos())).unwrap();
    tr.compose(&dil).compose(&rot)
}

/// Lower bound for the cross-ratio norm sup_Q |log |cr φ(Q)|| of a circle
/// map, sampled over `samples` symmetric quadruples (Möbius images of
/// (−1, 0, 1, ∞)). Monotone in the sample set; degenerate images error out.
pub fn qs_norm_estimate(
    phi: &dyn Fn(BoundaryPoint) -> BoundaryPoint,
    samples: u64,
) -> Result<f64, HypError> {
    let base = [
        BoundaryPoint::Finite(-1.0),
        BoundaryPoint::Finite(0.0),
        BoundaryPoint::Finite(1.0),
        BoundaryPoint::Infinity,
    ];
    let mut worst = 0.0_f64;
    for k in 0..samples {
        let g = moebius_family(k);
        let q = base.map(|p| phi(g.apply_boundary(p)));
        let cr = cross_ratio(q)?;
        if cr.abs() > 0.0 {
            worst = worst.max(cr.abs().ln().abs());
        }
    }
    Ok(worst)
}
