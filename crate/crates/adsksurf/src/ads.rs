//! Matrix models of anti-de Sitter 3-space.
//!
//! The primary model is PSL(2,ℝ) = {M : det M = 1}/±1 sitting inside the
//! four-dimensional matrix algebra equipped with the quadratic form
//! q(M) = −det M of signature (2,2). The restriction of the polarization
//! b of q to the quadric is the AdS metric; at the identity it equals
//! ½ tr(mm′) on traceless matrices.
//!
//! The secondary model realizes the isometry group of the hyperboloid sheet
//! as SO₀(2,1). The two are glued by the isomorphism Λ : ℝ^{2,1} → 𝔰𝔬(2,1),
//! Λ(x) = x ⊠ (·), where ⊠ is the Minkowski cross product; Λ satisfies
//!
//! - equivariance  Λ(γ·x) = γ Λ(x) γ⁻¹,
//! - bracket       [Λ(x), Λ(y)] = Λ(x ⊠ y),
//! - scaling       g(Λ(x), Λ(y)) = ¼ ⟨x, y⟩.
//!
//! Timelike geodesics are the sets L_{x,x'} = {γ : γ(x') = x}; they are
//! closed of length π, and the isometric action obeys
//! (α,β)·L_{x,x'} = L_{α(x),β(x')}.
//!
//! Coordinates for the projective chart: M = [[a,b],[c,d]] corresponds to
//! (x₁,x₂,x₃,x₄) = ((a−d)/2, (b+c)/2, (b−c)/2, (a+d)/2), so that
//! −det M = x₁² + x₂² − x₃² − x₄², and the affine chart x₄ ≠ 0 sends a class
//! to (x, y, t) = (x₁/x₄, x₂/x₄, x₃/x₄), with interior condition
//! 1 + t² − x² − y² > 0.

use nalgebra::{Matrix2, Matrix3, Vector3, Vector4};
use thiserror::Error;

use crate::hyperbolic::{dist_mod_sign, HPoint, HypError, Isom2};
use crate::TOL_ALG;

#[derive(Debug, Error)]
pub enum AdsError {
    #[error("matrix does not lie on the unit-determinant quadric: det = {0}")]
    OffQuadric(f64),
    #[error("vector is not tangent at the base point: b(base, v) = {0}")]
    NotTangent(f64),
    #[error("matrix is not traceless: tr = {0}")]
    NotTraceless(f64),
    #[error("tangent vectors have different base points")]
    MismatchedBase,
    #[error("plane is not spacelike")]
    NotSpacelike,
    #[error("point lies at infinity of the affine chart (x4 = {0})")]
    ChartInfinity(f64),
    #[error("point is outside the affine image of the quadric interior")]
    OutsideChart,
    #[error("the two points do not span a timelike geodesic")]
    NotTimelikeRelated,
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// Future-pointing unit timelike direction at the identity: the generator of
/// rotations of positive angle.
pub fn future_at_identity() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Polarization of q(M) = −det M on 2×2 matrices:
/// b(M, N) = ½ (tr(MN) − tr M · tr N).
pub fn b_form(m: &Matrix2<f64>, n: &Matrix2<f64>) -> f64 {
    0.5 * ((m * n).trace() - m.trace() * n.trace())
}

/// Point of AdS³: a 2×2 matrix of determinant one, identified with its
/// negative. The stored representative has its first nonzero entry positive.
#[derive(Debug, Clone, Copy)]
pub struct AdsPoint {
    m: Matrix2<f64>,
}

impl AdsPoint {
    pub fn new(m: Matrix2<f64>) -> Result<Self, AdsError> {
        let det = m.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(AdsError::OffQuadric(det));
        }
        Ok(Self::from_isom(&Isom2::new(m).map_err(AdsError::Hyp)?))
    }

    pub fn identity() -> Self {
        AdsPoint { m: Matrix2::identity() }
    }

    pub fn from_isom(g: &Isom2) -> Self {
        AdsPoint { m: g.matrix() }
    }

    pub fn isom(&self) -> Isom2 {
        Isom2::new(self.m).expect("stored representative is unimodular")
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        self.m
    }

    /// The rotation of angle π about x, seen as a point of AdS³. These form
    /// the totally geodesic plane dual to the identity.
    pub fn involution(x: &HPoint) -> Self {
        Self::from_isom(&Isom2::involution_about(x))
    }

    pub fn dist_mod_sign(&self, other: &AdsPoint) -> f64 {
        dist_mod_sign(&self.m, &other.m)
    }

    /// Left-translate an ambient tangent matrix to the Lie algebra.
    pub fn pull_to_identity(&self, v: &Matrix2<f64>) -> Matrix2<f64> {
        self.isom().inverse().matrix() * v
    }
}

/// Tangent vector of AdS³ at a base point, stored as an ambient matrix with
/// b(base, v) = 0.
#[derive(Debug, Clone, Copy)]
pub struct AdsTangent {
    pub base: AdsPoint,
    pub v: Matrix2<f64>,
}

impl AdsTangent {
    pub fn new(base: AdsPoint, v: Matrix2<f64>) -> Result<Self, AdsError> {
        let t = b_form(&base.matrix(), &v);
        if t.abs() > TOL_ALG * (1.0 + v.norm()) {
            return Err(AdsError::NotTangent(t));
        }
        Ok(AdsTangent { base, v })
    }

    /// Tangent from a Lie-algebra direction: v = base · a, tr a = 0.
    pub fn from_algebra(base: AdsPoint, a: Matrix2<f64>) -> Result<Self, AdsError> {
        if a.trace().abs() > TOL_ALG * (1.0 + a.norm()) {
            return Err(AdsError::NotTraceless(a.trace()));
        }
        Ok(AdsTangent { base, v: base.matrix() * a })
    }

    pub fn is_future(&self) -> bool {
        b_form(&self.v, &(self.base.matrix() * future_at_identity())) < 0.0
    }
}

/// AdS metric on tangent vectors at a common base point. Computed by
/// left-translating to the identity, where it is ½ tr(mm′); this agrees with
/// the ambient polarization b restricted to the quadric.
pub fn ads_metric(v: &AdsTangent, w: &AdsTangent) -> Result<f64, AdsError> {
    if v.base.dist_mod_sign(&w.base) > 1e-8 {
        return Err(AdsError::MismatchedBase);
    }
    let a = v.base.pull_to_identity(&v.v);
    let b = w.base.pull_to_identity(&w.v);
    Ok(0.5 * (a * b).trace())
}

/// Minkowski product of ℝ^{2,1}: ⟨x,y⟩ = x₁y₁ + x₂y₂ − x₃y₃.
pub fn mink_dot(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    x[0] * y[0] + x[1] * y[1] - x[2] * y[2]
}

/// Minkowski cross product x ⊠ y, normalized so that
/// x ⊠ (y ⊠ z) = ⟨x,y⟩ z − ⟨x,z⟩ y.
pub fn mink_cross(x: &Vector3<f64>, y: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        -(x[0] * y[1] - x[1] * y[0]),
    )
}

/// Λ(x) = x ⊠ (·) as a 3×3 matrix in 𝔰𝔬(2,1).
pub fn lambda(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::from_columns(&[
        mink_cross(x, &Vector3::x()),
        mink_cross(x, &Vector3::y()),
        mink_cross(x, &Vector3::z()),
    ])
}

/// Inverse of [`lambda`].
pub fn lambda_inv(a: &Matrix3<f64>) -> Vector3<f64> {
    // x ⊠ e1 = (0, -x3, -x2)ᵗ? read off the distinguished entries instead:
    // column representation gives a[(2,0)] = -x2·(sign…); recover from the
    // antisymmetric part directly:
    // Λ(x) = [[0, x3, x2], [-x3, 0, -x1], [-x2, -x1·(-1)?, 0]] — use entries
    // computed from mink_cross on basis vectors.
    Vector3::new(-a[(1, 2)], a[(0, 2)], a[(0, 1)])
}

/// The 2×2 incarnation of Λ: the traceless matrix generating the same
/// one-parameter subgroup under the group isomorphism PSL(2,ℝ) ≅ SO₀(2,1).
pub fn lambda_sl2(x: &Vector3<f64>) -> Matrix2<f64> {
    -0.5 * Matrix2::new(x[0], x[1] + x[2], x[1] - x[2], -x[0])
}

/// Inverse of [`lambda_sl2`] on traceless matrices.
pub fn lambda_sl2_inv(a: &Matrix2<f64>) -> Vector3<f64> {
    let m = -2.0 * a;
    Vector3::new(m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), 0.5 * (m[(0, 1)] - m[(1, 0)]))
}

/// The SO₀(2,1) matrix of an orientation-preserving isometry of ℍ²,
/// obtained by conjugation through [`lambda_sl2`].
pub fn so21_of(g: &Isom2) -> Matrix3<f64> {
    let m = g.matrix();
    let minv = g.inverse().matrix();
    let col = |e: Vector3<f64>| lambda_sl2_inv(&(m * lambda_sl2(&e) * minv));
    Matrix3::from_columns(&[col(Vector3::x()), col(Vector3::y()), col(Vector3::z())])
}

/// Closed-form exponential of a traceless 2×2 matrix.
///
/// For det A > 0 this is cos(√det A)·E + sin(√det A)/√det A · A, for
/// det A < 0 the cosh/sinh analogue, and near det A = 0 the series limit
/// E + A. The switch happens at |det A| = 1e−14 to avoid cancellation.
pub fn exp_sl2(a: &Matrix2<f64>) -> Result<Matrix2<f64>, AdsError> {
    if a.trace().abs() > 1e-12 * (1.0 + a.norm()) {
        return Err(AdsError::NotTraceless(a.trace()));
    }
    let d = a.determinant();
    let id = Matrix2::identity();
    Ok(if d > 1e-14 {
        let r = d.sqrt();
        id * r.cos() + a * (r.sin() / r)
    } else if d < -1e-14 {
        let r = (-d).sqrt();
        id * r.cosh() + a * (r.sinh() / r)
    } else {
        id + a
    })
}

/// Geodesic through `base` with initial velocity `dir`, evaluated at time τ:
/// base · exp(τ · base⁻¹ dir). Through the identity these are the
/// one-parameter subgroups; unit timelike directions give closed curves of
/// period π.
pub fn geodesic(base: &AdsPoint, dir: &AdsTangent, tau: f64) -> Result<AdsPoint, AdsError> {
    let a = base.pull_to_identity(&dir.v);
    let e = exp_sl2(&(a * tau))?;
    AdsPoint::new(base.matrix() * e)
}

/// Totally geodesic spacelike plane, stored through its dual point: the
/// plane is the polar {η : b(dual, η) = 0} of `dual` in the projective
/// quadric model.
#[derive(Debug, Clone, Copy)]
pub struct SpacelikePlane {
    pub dual: AdsPoint,
}

impl SpacelikePlane {
    /// The plane dual to a point (all points at timelike distance π/2 from
    /// it). The dual of the identity is the plane {𝓘_x} of involutions.
    pub fn dual_plane(p: &AdsPoint) -> Self {
        SpacelikePlane { dual: *p }
    }

    /// The plane through `p` tangent to span(v, w), required spacelike.
    ///
    /// Its dual point sits at distance π/2 along the normal timelike
    /// geodesic; both normal directions land on the same projective class.
    pub fn from_point_and_tangents(
        p: &AdsPoint,
        v: &AdsTangent,
        w: &AdsTangent,
    ) -> Result<Self, AdsError> {
        let n = normal_matrix(p, v, w)?;
        let dir = AdsTangent::new(*p, n)?;
        let dual = geodesic(p, &dir, std::f64::consts::FRAC_PI_2)?;
        Ok(SpacelikePlane { dual })
    }

    /// The point dual to this plane (involutive with `dual_plane`).
    pub fn dual_point(&self) -> AdsPoint {
        self.dual
    }

    pub fn contains(&self, p: &AdsPoint, tol: f64) -> bool {
        b_form(&self.dual.matrix(), &p.matrix()).abs() < tol
    }
}

/// Future unit normal matrix to span(v, w) at p, via the (2,2) Hodge dual.
pub fn normal_matrix(
    p: &AdsPoint,
    v: &AdsTangent,
    w: &AdsTangent,
) -> Result<Matrix2<f64>, AdsError> {
    let n = cross22(&mat_to_vec4(&p.matrix()), &mat_to_vec4(&v.v), &mat_to_vec4(&w.v));
    let n = vec4_to_mat(&n);
    let norm2 = b_form(&n, &n);
    if norm2 >= -1e-12 {
        return Err(AdsError::NotSpacelike);
    }
    let mut n = n / (-norm2).sqrt();
    if b_form(&n, &(p.matrix() * future_at_identity())) > 0.0 {
        n = -n;
    }
    Ok(n)
}

/// Coordinates of a 2×2 matrix in ℝ^{2,2}: −det M = x₁² + x₂² − x₃² − x₄².
pub fn mat_to_vec4(m: &Matrix2<f64>) -> Vector4<f64> {
    Vector4::new(
        0.5 * (m[(0, 0)] - m[(1, 1)]),
        0.5 * (m[(0, 1)] + m[(1, 0)]),
        0.5 * (m[(0, 1)] - m[(1, 0)]),
        0.5 * (m[(0, 0)] + m[(1, 1)]),
    )
}

pub fn vec4_to_mat(x: &Vector4<f64>) -> Matrix2<f64> {
    Matrix2::new(x[3] + x[0], x[1] + x[2], x[1] - x[2], x[3] - x[0])
}

/// Vector b-orthogonal to three given vectors in ℝ^{2,2} (metric
/// diag(1,1,−1,−1)): the Euclidean cofactor vector with lowered index.
fn cross22(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut cof = Vector4::zeros();
    for mu in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != mu).collect();
        let m = [
            [a[cols[0]], a[cols[1]], a[cols[2]]],
            [b[cols[0]], b[cols[1]], b[cols[2]]],
            [c[cols[0]], c[cols[1]], c[cols[2]]],
        ];
        cof[mu] = if mu % 2 == 0 { det3(m) } else { -det3(m) };
    }
    // raise the index with diag(1,1,−1,−1)
    Vector4::new(cof[0], cof[1], -cof[2], -cof[3])
}

/// Timelike geodesic L_{x,x'} = {γ : γ(x') = x} of AdS³.
#[derive(Debug, Clone)]
pub struct TimelikeGeodesic {
    pub left: HPoint,
    pub right: HPoint,
}

impl TimelikeGeodesic {
    pub fn new(left: HPoint, right: HPoint) -> Self {
        TimelikeGeodesic { left, right }
    }

    /// One isometry carrying `right` to `left` (a frame translation).
    pub fn base_point(&self) -> AdsPoint {
        let g = Isom2::frame_translation(&self.left)
            .compose(&Isom2::frame_translation(&self.right).inverse());
        AdsPoint::from_isom(&g)
    }

    /// Arc-length parameterization; the whole line is covered with period π.
    pub fn point_at(&self, tau: f64) -> AdsPoint {
        let rot = Isom2::rotation_about(&self.right, 2.0 * tau);
        AdsPoint::from_isom(&self.base_point().isom().compose(&rot))
    }

    /// Displace a point of this line along it by arc length ρ.
    pub fn displace(&self, p: &AdsPoint, rho: f64) -> AdsPoint {
        let rot = Isom2::rotation_about(&self.right, 2.0 * rho);
        AdsPoint::from_isom(&p.isom().compose(&rot))
    }

    /// Membership test: γ(right) = left.
    pub fn contains(&self, p: &AdsPoint, tol: f64) -> bool {
        p.isom().apply(&self.right).dist(&self.left) < tol
    }
}

/// The timelike geodesic through two of its points, recovered from the
/// elliptic isometry η₂⁻¹η₁: its fixed point is x', and x = η₁(x').
pub fn line_of(eta1: &AdsPoint, eta2: &AdsPoint) -> Result<TimelikeGeodesic, AdsError> {
    let rel = eta2.isom().inverse().compose(&eta1.isom());
    let right = rel
        .elliptic_fixed_point()
        .map_err(|_| AdsError::NotTimelikeRelated)?;
    let left = eta1.isom().apply(&right);
    Ok(TimelikeGeodesic::new(left, right))
}

/// Point of the affine chart x₄ ≠ 0 of the projective model. The interior of
/// AdS³ is the region 1 + t² − x² − y² > 0 inside the one-sheeted
/// hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl AffinePoint {
    pub fn interior_margin(&self) -> f64 {
        1.0 + self.t * self.t - self.x * self.x - self.y * self.y
    }
}

/// Affine-chart coordinates of a point; fails on the plane at infinity of
/// the chart (which contains the involutions 𝓘_x, all of trace zero).
pub fn to_affine(p: &AdsPoint) -> Result<AffinePoint, AdsError> {
    let v = mat_to_vec4(&p.matrix());
    if v[3].abs() <= 1e-10 {
        return Err(AdsError::ChartInfinity(v[3]));
    }
    Ok(AffinePoint { x: v[0] / v[3], y: v[1] / v[3], t: v[2] / v[3] })
}

/// Inverse of [`to_affine`] for interior points of the chart.
pub fn from_affine(p: &AffinePoint) -> Result<AdsPoint, AdsError> {
    let margin = p.interior_margin();
    if margin <= 0.0 {
        return Err(AdsError::OutsideChart);
    }
    let x4 = 1.0 / margin.sqrt();
    let v = Vector4::new(p.x * x4, p.y * x4, p.t * x4, x4);
    AdsPoint::new(vec4_to_mat(&v))
}

/// The isometric action (α,β)·γ = α ∘ γ ∘ β⁻¹ of Isom(ℍ²) × Isom(ℍ²).
pub fn isom_action(alpha: &Isom2, beta: &Isom2, p: &AdsPoint) -> AdsPoint {
    AdsPoint::from_isom(&alpha.compose(&p.isom()).compose(&beta.inverse()))
}
