//! Finite-difference extrinsic geometry of sampled spacelike surfaces in
//! AdS³.
//!
//! A surface is a rectangular grid of quadric points σ(u, v) with continuous
//! sign lifts. From central differences the module assembles the first and
//! second fundamental forms, the future unit normal, the shape operator
//! B = I⁻¹·II and the Gauss curvature K = −1 − det B. On top of that sit
//!
//! - the left/right projections to ℍ² through the orthogonal timelike
//!   geodesic, with an independent verification route through the dual point
//!   of the tangent plane,
//! - the pull-back identities π_l*g = I((E + J_I B)·, (E + J_I B)·) and
//!   π_r*g = I((E − J_I B)·, (E − J_I B)·),
//! - normal evolution (parallel surfaces; ρ = π/2 is the dual surface with
//!   K* = −K/(K+1)),
//! - the Brioschi intrinsic curvature of the sampled first fundamental form,
//! - the affine-chart Monge–Ampère curvature of graphs,
//!   det B = det D²u · (1 + u² − x² − y²)² / (1 − |Du|² + ((x,y)·Du − u)²)².

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::ads::{
    b_form, exp_sl2, future_at_identity, line_of, normal_matrix, AdsError, AdsPoint, AdsTangent,
    SpacelikePlane,
};
use crate::grid::Grid;
use crate::hyperbolic::{HPoint, HypError};
use crate::numerics::Stencil;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("node ({0}, {1}) is not spacelike")]
    NonSpacelike(usize, usize),
    #[error("first fundamental form is degenerate at node ({0}, {1}): condition {2:.3e}")]
    DegenerateMetric(usize, usize, f64),
    #[error("normal evolution develops a focal point at node ({0}, {1}): jacobian {2:.3e}")]
    FocalPoint(usize, usize, f64),
    #[error("patch too small for the requested stencil")]
    TooSmall,
    #[error("patch carries no normals; attach them or use the finite-difference source")]
    MissingNormals,
    #[error(transparent)]
    Ads(#[from] AdsError),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// Where the unit normal field comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalSource {
    /// Use normals attached to the patch (exact for surfaces built from the
    /// representation formula).
    Attached,
    /// Recompute from the grid by central differences.
    FiniteDifference,
}

/// Rectangular grid of AdS³ points with continuous SL(2,ℝ) sign lifts and
/// an optional attached unit normal field.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    pub grid: Grid<Matrix2<f64>>,
    pub normals: Option<Grid<Matrix2<f64>>>,
}

impl SurfacePatch {
    /// Sample a map into AdS³ and align the matrix signs so the lift is
    /// continuous (seeded at the first node, swept row by row).
    pub fn from_fn(
        nu: usize,
        nv: usize,
        hu: f64,
        hv: f64,
        u0: f64,
        v0: f64,
        f: impl Fn(f64, f64) -> AdsPoint,
    ) -> Self {
        let mut grid = Grid::from_fn(nu, nv, hu, hv, u0, v0, |u, v| f(u, v).matrix());
        align_signs(&mut grid);
        SurfacePatch { grid, normals: None }
    }

    /// Largest deviation of det σ from 1 over the grid.
    pub fn quadric_residual(&self) -> f64 {
        self.grid
            .iter()
            .map(|m| (m.determinant() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn align_signs(grid: &mut Grid<Matrix2<f64>>) {
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            if i == 0 && j == 0 {
                continue;
            }
            let anchor = if j > 0 { *grid.get(i, j - 1) } else { *grid.get(i - 1, j) };
            let cur = *grid.get(i, j);
            if (cur + anchor).norm() < (cur - anchor).norm() {
                *grid.get_mut(i, j) = -cur;
            }
        }
    }
}

/// First derivative of a matrix grid along u or v.
fn d1_mat(
    g: &Grid<Matrix2<f64>>,
    i: usize,
    j: usize,
    along_u: bool,
    stencil: Stencil,
) -> Matrix2<f64> {
    let pick = |di: isize, dj: isize| -> Matrix2<f64> {
        *g.get((i as isize + di) as usize, (j as isize + dj) as usize)
    };
    match (stencil, along_u) {
        (Stencil::Order2, true) => (pick(1, 0) - pick(-1, 0)) / (2.0 * g.hu),
        (Stencil::Order2, false) => (pick(0, 1) - pick(0, -1)) / (2.0 * g.hv),
        (Stencil::Order4, true) => {
            ((pick(1, 0) - pick(-1, 0)) * 8.0 - (pick(2, 0) - pick(-2, 0))) / (12.0 * g.hu)
        }
        (Stencil::Order4, false) => {
            ((pick(0, 1) - pick(0, -1)) * 8.0 - (pick(0, 2) - pick(0, -2))) / (12.0 * g.hv)
        }
    }
}

fn d2_mat(
    g: &Grid<Matrix2<f64>>,
    i: usize,
    j: usize,
    along_u: bool,
    stencil: Stencil,
) -> Matrix2<f64> {
    let pick = |k: isize| -> Matrix2<f64> {
        if along_u {
            *g.get((i as isize + k) as usize, j)
        } else {
            *g.get(i, (j as isize + k) as usize)
        }
    };
    let h = if along_u { g.hu } else { g.hv };
    match stencil {
        Stencil::Order2 => (pick(1) - pick(0) * 2.0 + pick(-1)) / (h * h),
        Stencil::Order4 => {
            (-pick(2) + pick(1) * 16.0 - pick(0) * 30.0 + pick(-1) * 16.0 - pick(-2))
                / (12.0 * h * h)
        }
    }
}

fn d2_mixed(g: &Grid<Matrix2<f64>>, i: usize, j: usize, stencil: Stencil) -> Matrix2<f64> {
    match stencil {
        Stencil::Order2 => {
            (*g.get(i + 1, j + 1) - *g.get(i + 1, j - 1) - *g.get(i - 1, j + 1)
                + *g.get(i - 1, j - 1))
                / (4.0 * g.hu * g.hv)
        }
        Stencil::Order4 => {
            let dv = |ii: usize| d1_mat(g, ii, j, false, Stencil::Order4);
            ((dv(i + 1) - dv(i - 1)) * 8.0 - (dv(i + 2) - dv(i - 2))) / (12.0 * g.hu)
        }
    }
}

/// Per-node extrinsic data of a spacelike surface.
#[derive(Debug, Clone, Copy)]
pub struct NodeExtrinsic {
    /// First fundamental form in the (∂u, ∂v) frame.
    pub first: Matrix2<f64>,
    /// Second fundamental form (for the future unit normal).
    pub second: Matrix2<f64>,
    /// Shape operator B = I⁻¹·II.
    pub shape: Matrix2<f64>,
    /// Future unit normal, as an ambient matrix.
    pub normal: Matrix2<f64>,
    /// Gauss curvature K = −1 − det B.
    pub gauss: f64,
}

impl NodeExtrinsic {
    /// Almost-complex structure of the induced metric, rotating by +90° in
    /// the (∂u, ∂v) orientation.
    pub fn j_induced(&self) -> Matrix2<f64> {
        let i = self.first;
        let det = i.determinant();
        Matrix2::new(-i[(0, 1)], -i[(1, 1)], i[(0, 0)], i[(0, 1)]) / det.sqrt()
    }
}

/// Extrinsic data on the interior of a patch (None inside the stencil
/// margin).
#[derive(Debug, Clone)]
pub struct Extrinsic {
    pub nodes: Grid<Option<NodeExtrinsic>>,
    pub stencil: Stencil,
}

/// Assemble fundamental forms, future unit normal, shape operator and Gauss
/// curvature at every interior node.
///
/// First derivatives are projected back onto the tangent space of the
/// quadric before use; the normal is the (2,2) Hodge dual of (σ, σ_u, σ_v),
/// normalized and future-oriented; II comes from second differences through
/// II(a, b) = −b(∂²σ, N).
pub fn extrinsic(patch: &SurfacePatch, stencil: Stencil) -> Result<Extrinsic, SurfaceError> {
    let g = &patch.grid;
    let m = stencil.margin();
    if g.nu <= 2 * m || g.nv <= 2 * m {
        return Err(SurfaceError::TooSmall);
    }
    let mut failure: Option<SurfaceError> = None;
    let nodes = g.map_indexed(|i, j, sigma| {
        if i < m || i + m >= g.nu || j < m || j + m >= g.nv || failure.is_some() {
            return None;
        }
        let project = |v: Matrix2<f64>| v + sigma * b_form(&v, sigma);
        let su = project(d1_mat(g, i, j, true, stencil));
        let sv = project(d1_mat(g, i, j, false, stencil));
        let first = Matrix2::new(
            b_form(&su, &su),
            b_form(&su, &sv),
            b_form(&su, &sv),
            b_form(&sv, &sv),
        );
        let det = first.determinant();
        if first[(0, 0)] <= 0.0 || det <= 0.0 {
            failure.get_or_insert(SurfaceError::NonSpacelike(i, j));
            return None;
        }
        let half_tr = 0.5 * first.trace();
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        let cond = (half_tr + disc) / (half_tr - disc).max(f64::MIN_POSITIVE);
        if cond > 1e8 {
            failure.get_or_insert(SurfaceError::DegenerateMetric(i, j, cond));
            return None;
        }
        let base = AdsPoint::new(*sigma).expect("grid nodes satisfy the quadric");
        let vt = AdsTangent { base, v: su };
        let wt = AdsTangent { base, v: sv };
        let normal = match normal_matrix(&base, &vt, &wt) {
            Ok(n) => n,
            Err(_) => {
                failure.get_or_insert(SurfaceError::NonSpacelike(i, j));
                return None;
            }
        };
        let suu = d2_mat(g, i, j, true, stencil);
        let svv = d2_mat(g, i, j, false, stencil);
        let suv = d2_mixed(g, i, j, stencil);
        let second = Matrix2::new(
            -b_form(&suu, &normal),
            -b_form(&suv, &normal),
            -b_form(&suv, &normal),
            -b_form(&svv, &normal),
        );
        let shape = first.try_inverse().expect("checked positive definite") * second;
        Some(NodeExtrinsic {
            first,
            second,
            shape,
            normal,
            gauss: -1.0 - shape.determinant(),
        })
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Extrinsic { nodes, stencil })
}

/// Left and right projection grids (None inside the margin).
#[derive(Debug, Clone)]
pub struct Projections {
    pub left: Grid<Option<HPoint>>,
    pub right: Grid<Option<HPoint>>,
}

/// Lie-algebra direction of a unit normal: the matrix A with N = σ·A,
/// cleaned to exact tracelessness.
fn algebra_normal(sigma: &Matrix2<f64>, normal: &Matrix2<f64>) -> Matrix2<f64> {
    let inv = Matrix2::new(sigma[(1, 1)], -sigma[(0, 1)], -sigma[(1, 0)], sigma[(0, 0)]);
    let mut a = inv * normal;
    let t = 0.5 * a.trace();
    a[(0, 0)] -= t;
    a[(1, 1)] -= t;
    a
}

/// Projections to ℍ² through the orthogonal timelike geodesic: the geodesic
/// is sampled at two parameters and identified as L_{x,x'} via the elliptic
/// fixed point of the relative isometry; then π_l = x and π_r = x'.
pub fn projections(
    patch: &SurfacePatch,
    stencil: Stencil,
    source: NormalSource,
) -> Result<Projections, SurfaceError> {
    let normals = normal_field(patch, stencil, source)?;
    let g = &patch.grid;
    let mut fail = None;
    let mut left = g.map_indexed(|_, _, _| None);
    let mut right = g.map_indexed(|_, _, _| None);
    for i in 0..g.nu {
        for j in 0..g.nv {
            let Some(n) = normals.get(i, j) else { continue };
            let sigma = AdsPoint::new(*g.get(i, j))?;
            let a = algebra_normal(&sigma.matrix(), n);
            let eta1 = AdsPoint::new(sigma.matrix() * exp_sl2(&(a * 0.4))?)?;
            let eta2 = AdsPoint::new(sigma.matrix() * exp_sl2(&(a * 1.1))?)?;
            match line_of(&eta1, &eta2) {
                Ok(line) => {
                    *left.get_mut(i, j) = Some(line.left);
                    *right.get_mut(i, j) = Some(line.right);
                }
                Err(e) => {
                    fail.get_or_insert(e);
                }
            }
        }
    }
    if let Some(e) = fail {
        return Err(SurfaceError::Ads(e));
    }
    Ok(Projections { left, right })
}

/// Verification route through the dual point G(σ) of the tangent plane:
/// π_l is the fixed point of σG⁻¹ and π_r the fixed point of G⁻¹σ (both
/// elliptic of order two).
pub fn projections_via_dual(
    patch: &SurfacePatch,
    stencil: Stencil,
) -> Result<Projections, SurfaceError> {
    let g = &patch.grid;
    let m = stencil.margin();
    let mut left = g.map_indexed(|_, _, _| None);
    let mut right = g.map_indexed(|_, _, _| None);
    let mut fail: Option<SurfaceError> = None;
    for i in m..g.nu - m {
        for j in m..g.nv - m {
            let sigma = AdsPoint::new(*g.get(i, j))?;
            let project = |v: Matrix2<f64>| v + sigma.matrix() * b_form(&v, &sigma.matrix());
            let su = project(d1_mat(g, i, j, true, stencil));
            let sv = project(d1_mat(g, i, j, false, stencil));
            let vt = AdsTangent { base: sigma, v: su };
            let wt = AdsTangent { base: sigma, v: sv };
            let dual = match SpacelikePlane::from_point_and_tangents(&sigma, &vt, &wt) {
                Ok(p) => p.dual_point(),
                Err(e) => {
                    fail.get_or_insert(SurfaceError::Ads(e));
                    continue;
                }
            };
            let gl = sigma.isom().compose(&dual.isom().inverse());
            let gr = dual.isom().inverse().compose(&sigma.isom());
            match (gl.elliptic_fixed_point(), gr.elliptic_fixed_point()) {
                (Ok(l), Ok(r)) => {
                    *left.get_mut(i, j) = Some(l);
                    *right.get_mut(i, j) = Some(r);
                }
                _ => {
                    fail.get_or_insert(SurfaceError::NonSpacelike(i, j));
                }
            }
        }
    }
    if let Some(e) = fail {
        return Err(e);
    }
    Ok(Projections { left, right })
}

fn normal_field(
    patch: &SurfacePatch,
    stencil: Stencil,
    source: NormalSource,
) -> Result<Grid<Option<Matrix2<f64>>>, SurfaceError> {
    match source {
        NormalSource::Attached => {
            let n = patch.normals.as_ref().ok_or(SurfaceError::MissingNormals)?;
            Ok(n.map_indexed(|_, _, m| Some(*m)))
        }
        NormalSource::FiniteDifference => {
            let ext = extrinsic(patch, stencil)?;
            Ok(ext.nodes.map_indexed(|_, _, n| n.map(|n| n.normal)))
        }
    }
}

/// Max disagreement (hyperbolic distance) between two projection results
/// over nodes where both are defined.
pub fn projection_route_disagreement(a: &Projections, b: &Projections) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.left.nu {
        for j in 0..a.left.nv {
            if let (Some(p), Some(q)) = (a.left.get(i, j), b.left.get(i, j)) {
                worst = worst.max(p.dist(q));
            }
            if let (Some(p), Some(q)) = (a.right.get(i, j), b.right.get(i, j)) {
                worst = worst.max(p.dist(q));
            }
        }
    }
    worst
}

/// Side selector for the pull-back identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Residual grid of the pull-back identity π_±*g = I((E ± J_I B)·, ·) and
/// its maximum. The left-hand side is the finite-difference pull-back of
/// the hyperbolic metric through the projection grid.
pub fn pullback_residual(
    patch: &SurfacePatch,
    ext: &Extrinsic,
    proj: &Projections,
    side: Side,
) -> (Grid<f64>, f64) {
    let stencil = ext.stencil;
    let m = 2 * stencil.margin();
    let g = &patch.grid;
    let pgrid = match side {
        Side::Left => &proj.left,
        Side::Right => &proj.right,
    };
    let coords = pgrid.map_indexed(|_, _, p| p.map(|p| p.to_uhp()));
    let mut worst = 0.0_f64;
    let res = g.map_indexed(|i, j, _| {
        if i < m || i + m >= g.nu || j < m || j + m >= g.nv {
            return 0.0;
        }
        let Some(node) = ext.nodes.get(i, j) else { return 0.0 };
        let take = |di: isize, dj: isize, k: usize| -> f64 {
            let c = coords
                .get((i as isize + di) as usize, (j as isize + dj) as usize)
                .expect("inside projection margin");
            if k == 0 {
                c.0
            } else {
                c.1
            }
        };
        let d = |along_u: bool, k: usize| -> f64 {
            if along_u {
                stencil.d1_of(|o| take(o, 0, k), g.hu)
            } else {
                stencil.d1_of(|o| take(0, o, k), g.hv)
            }
        };
        let du = Vector2::new(d(true, 0), d(true, 1));
        let dv = Vector2::new(d(false, 0), d(false, 1));
        let y = coords.get(i, j).expect("interior").1;
        let gm = |a: &Vector2<f64>, b: &Vector2<f64>| a.dot(b) / (y * y);
        let lhs = Matrix2::new(gm(&du, &du), gm(&du, &dv), gm(&du, &dv), gm(&dv, &dv));
        // J_I in the cross-product orientation is −j_induced in the (u, v)
        // grid orientation
        let ji = -node.j_induced();
        let op = match side {
            Side::Left => Matrix2::identity() + ji * node.shape,
            Side::Right => Matrix2::identity() - ji * node.shape,
        };
        let rhs = op.transpose() * node.first * op;
        let r = (lhs - rhs).norm();
        worst = worst.max(r);
        r
    });
    (res, worst)
}

/// Move every node distance ρ along its unit normal geodesic.
///
/// With attached normals the evolution is exact and keeps the full grid
/// (normals are transported along the geodesics); with finite-difference
/// normals the stencil margin is dropped. Rejected when the parallel-surface
/// jacobian det(cos ρ·E + sin ρ·B) degenerates at some node.
pub fn normal_evolution(
    patch: &SurfacePatch,
    rho: f64,
    stencil: Stencil,
    source: NormalSource,
) -> Result<SurfacePatch, SurfaceError> {
    let ext = extrinsic(patch, stencil)?;
    for i in 0..ext.nodes.nu {
        for j in 0..ext.nodes.nv {
            if let Some(n) = ext.nodes.get(i, j) {
                let jac = (Matrix2::identity() * rho.cos() + n.shape * rho.sin()).determinant();
                if jac.abs() < 1e-8 {
                    return Err(SurfaceError::FocalPoint(i, j, jac));
                }
            }
        }
    }
    let g = &patch.grid;
    match source {
        NormalSource::Attached => {
            let normals = patch.normals.as_ref().ok_or(SurfaceError::MissingNormals)?;
            let mut moved = g.clone();
            let mut moved_normals = normals.clone();
            for i in 0..g.nu {
                for j in 0..g.nv {
                    let sigma = g.get(i, j);
                    let a = algebra_normal(sigma, normals.get(i, j));
                    let e = exp_sl2(&(a * rho)).expect("traceless by construction");
                    let img = sigma * e;
                    *moved.get_mut(i, j) = img;
                    *moved_normals.get_mut(i, j) = img * a;
                }
            }
            Ok(SurfacePatch { grid: moved, normals: Some(moved_normals) })
        }
        NormalSource::FiniteDifference => {
            let m = stencil.margin();
            let nu = g.nu - 2 * m;
            let nv = g.nv - 2 * m;
            let mut grid = Grid::from_fn(
                nu,
                nv,
                g.hu,
                g.hv,
                g.u0 + m as f64 * g.hu,
                g.v0 + m as f64 * g.hv,
                |_, _| Matrix2::identity(),
            );
            let mut normals = grid.clone();
            for i in 0..nu {
                for j in 0..nv {
                    let node = ext.nodes.get(i + m, j + m).expect("interior");
                    let sigma = g.get(i + m, j + m);
                    let a = algebra_normal(sigma, &node.normal);
                    let e = exp_sl2(&(a * rho)).expect("traceless");
                    let img = sigma * e;
                    *grid.get_mut(i, j) = img;
                    *normals.get_mut(i, j) = img * a;
                }
            }
            Ok(SurfacePatch { grid, normals: Some(normals) })
        }
    }
}

/// Brioschi intrinsic curvature of the sampled first fundamental form.
///
/// Differentiates the E, F, G grids of `ext` once more, so values exist only
/// at twice the stencil margin. This is the independent side of the Gauss
/// equation check.
pub fn brioschi_curvature(ext: &Extrinsic) -> Grid<Option<f64>> {
    let stencil = ext.stencil;
    let m = stencil.margin();
    let nodes = &ext.nodes;
    let comp = |i: usize, j: usize, k: (usize, usize)| -> f64 {
        nodes.get(i, j).map(|n| n.first[k]).unwrap_or(f64::NAN)
    };
    nodes.map_indexed(|i, j, _| {
        if i < 2 * m || i + 2 * m >= nodes.nu || j < 2 * m || j + 2 * m >= nodes.nv {
            return None;
        }
        let e = comp(i, j, (0, 0));
        let f = comp(i, j, (0, 1));
        let g = comp(i, j, (1, 1));
        let d1 = |k: (usize, usize), along_u: bool| -> f64 {
            let pick = |di: isize, dj: isize| {
                comp((i as isize + di) as usize, (j as isize + dj) as usize, k)
            };
            let (m2, m1, p1, p2, h) = if along_u {
                (pick(-2, 0), pick(-1, 0), pick(1, 0), pick(2, 0), nodes.hu)
            } else {
                (pick(0, -2), pick(0, -1), pick(0, 1), pick(0, 2), nodes.hv)
            };
            stencil.d1(m2, m1, p1, p2, h)
        };
        let d2 = |k: (usize, usize), along_u: bool| -> f64 {
            let pick = |di: isize, dj: isize| {
                comp((i as isize + di) as usize, (j as isize + dj) as usize, k)
            };
            let (m2, m1, c, p1, p2, h) = if along_u {
                (pick(-2, 0), pick(-1, 0), pick(0, 0), pick(1, 0), pick(2, 0), nodes.hu)
            } else {
                (pick(0, -2), pick(0, -1), pick(0, 0), pick(0, 1), pick(0, 2), nodes.hv)
            };
            stencil.d2(m2, m1, c, p1, p2, h)
        };
        let dmix = |k: (usize, usize)| -> f64 {
            match stencil {
                Stencil::Order2 => {
                    let pick = |di: isize, dj: isize| {
                        comp((i as isize + di) as usize, (j as isize + dj) as usize, k)
                    };
                    (pick(1, 1) - pick(1, -1) - pick(-1, 1) + pick(-1, -1))
                        / (4.0 * nodes.hu * nodes.hv)
                }
                Stencil::Order4 => {
                    let dv = |ii: isize| -> f64 {
                        let pick = |dj: isize| {
                            comp((i as isize + ii) as usize, (j as isize + dj) as usize, k)
                        };
                        stencil.d1(pick(-2), pick(-1), pick(1), pick(2), nodes.hv)
                    };
                    stencil.d1(dv(-2), dv(-1), dv(1), dv(2), nodes.hu)
                }
            }
        };
        let eu = d1((0, 0), true);
        let ev = d1((0, 0), false);
        let fu = d1((0, 1), true);
        let fv = d1((0, 1), false);
        let gu = d1((1, 1), true);
        let gv = d1((1, 1), false);
        let evv = d2((0, 0), false);
        let guu = d2((1, 1), true);
        let fuv = dmix((0, 1));
        let m1 = nalgebra::Matrix3::new(
            -0.5 * evv + fuv - 0.5 * guu,
            0.5 * eu,
            fu - 0.5 * ev,
            fv - 0.5 * gu,
            e,
            f,
            0.5 * gv,
            f,
            g,
        );
        let m2 = nalgebra::Matrix3::new(0.0, 0.5 * ev, 0.5 * gu, 0.5 * ev, e, f, 0.5 * gu, f, g);
        let det = e * g - f * f;
        Some((m1.determinant() - m2.determinant()) / (det * det))
    })
}

/// Scalar graph u(x, y) over a rectangle of the affine chart.
#[derive(Debug, Clone)]
pub struct ChartFunction {
    pub grid: Grid<f64>,
}

/// Why a graph-curvature node was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeFlag {
    /// Spacelike-graph factor 1 − |Du|² + ((x,y)·Du − u)² below threshold.
    NonSpacelike,
    /// Chart factor 1 + u² − x² − y² below threshold: the graph point is
    /// about to leave the affine image of AdS³.
    ChartBoundary,
}

/// det B of the graph of `u` in the affine chart.
///
/// Nodes failing the spacelike or chart-interior thresholds (1e−6) are
/// flagged instead of evaluated; margin nodes report None.
pub fn graph_curvature(
    chart: &ChartFunction,
    stencil: Stencil,
) -> Grid<Option<Result<f64, NodeFlag>>> {
    let g = &chart.grid;
    let m = stencil.margin();
    g.map_indexed(|i, j, &u| {
        if i < m || i + m >= g.nu || j < m || j + m >= g.nv {
            return None;
        }
        let x = g.u(i);
        let y = g.v(j);
        let pick = |di: isize, dj: isize| -> f64 {
            *g.get((i as isize + di) as usize, (j as isize + dj) as usize)
        };
        let ux = stencil.d1_of(|o| pick(o, 0), g.hu);
        let uy = stencil.d1_of(|o| pick(0, o), g.hv);
        let uxx = stencil.d2_of(|o| pick(o, 0), g.hu);
        let uyy = stencil.d2_of(|o| pick(0, o), g.hv);
        let uxy = match stencil {
            Stencil::Order2 => {
                (pick(1, 1) - pick(1, -1) - pick(-1, 1) + pick(-1, -1)) / (4.0 * g.hu * g.hv)
            }
            Stencil::Order4 => {
                let dv = |ii: isize| -> f64 {
                    let p =
                        |dj: isize| *g.get((i as isize + ii) as usize, (j as isize + dj) as usize);
                    stencil.d1(p(-2), p(-1), p(1), p(2), g.hv)
                };
                stencil.d1(dv(-2), dv(-1), dv(1), dv(2), g.hu)
            }
        };
        let chart_factor = 1.0 + u * u - x * x - y * y;
        if chart_factor < 1e-6 {
            return Some(Err(NodeFlag::ChartBoundary));
        }
        let radial = x * ux + y * uy - u;
        let spacelike = 1.0 - (ux * ux + uy * uy) + radial * radial;
        if spacelike < 1e-6 {
            return Some(Err(NodeFlag::NonSpacelike));
        }
        let hess = uxx * uyy - uxy * uxy;
        Some(Ok(hess * (chart_factor / spacelike).powi(2)))
    })
}

/// Patch sampling the totally geodesic plane of point-involutions over a
/// rectangle in strip coordinates, with its exact unit normal field (the
/// elliptic generator through each involution). Gauss curvature −1, zero
/// shape operator; both projections restrict to the identity.
pub fn involution_patch(nu: usize, nv: usize, hu: f64, hv: f64, s0: f64, t0: f64) -> SurfacePatch {
    let mut patch = SurfacePatch::from_fn(nu, nv, hu, hv, s0, t0, |s, t| {
        AdsPoint::involution(&HPoint::strip(s, t))
    });
    let grid = patch.grid.clone();
    let normals = grid.map_indexed(|i, j, m| {
        let x = HPoint::strip(grid.u(i), grid.v(j)).to_hyperboloid();
        2.0 * crate::ads::lambda_sl2(&x) * m
    });
    patch.normals = Some(normals);
    patch
}

/// Max deviation of an attached normal field from being unit, tangent and
/// future-directed (1.0 is reported when the time orientation is wrong).
pub fn normal_consistency(patch: &SurfacePatch) -> Option<f64> {
    let normals = patch.normals.as_ref()?;
    let mut worst = 0.0_f64;
    for i in 0..patch.grid.nu {
        for j in 0..patch.grid.nv {
            let n = normals.get(i, j);
            let s = patch.grid.get(i, j);
            worst = worst.max((b_form(n, n) + 1.0).abs());
            worst = worst.max(b_form(s, n).abs());
            let fut = s * future_at_identity();
            if b_form(n, &fut) >= 0.0 {
                worst = worst.max(1.0);
            }
        }
    }
    Some(worst)
}
