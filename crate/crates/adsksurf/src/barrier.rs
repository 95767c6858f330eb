//! The explicit landslide family of the hyperbolic half-plane and its
//! constant-curvature surfaces.
//!
//! In strip coordinates the maps Φ_θ(s, t) = (s − φ(t), t) on the half-plane
//! {t < 0} commute with the hyperbolic translations γ_a. Area preservation
//! fixes the vertical part, and the Codazzi condition for the calibrated
//! tensor b = R_ρ b₀ reduces to the scalar ODE
//!
//!   −tan t = 2/(4 + φ′²) · (1/φ′ − cos θ/√(4 sin²θ + φ′²)) · φ″,
//!
//! whose solution is implicit: with F(r) = −2cosθ ∫₀^r du/((4+u²)√(4sin²θ+u²))
//! and C = F(+∞),
//!
//!   φ′(t)^{1/2} / (φ′(t)² + 4)^{1/4} · e^{F(φ′(t))} = e^C cos t,
//!
//! which pins a strictly increasing φ′ : (−π/2, 0) → (0, ∞). The primitive
//! is normalized by φ(−π/2) = 0. Asymptotics at the singular end:
//! t·φ′(t) → −√(2(1−cosθ)) and t·e^{φ(t)/2} → 0.
//!
//! Tabulated profiles carry (φ, φ′, φ″) on a Chebyshev-type grid and
//! evaluate by cubic Hermite interpolation; the scalar solvers remain
//! available for points outside the table (asymptotic checks).
//!
//! The square-root tensor of Φ_θ is
//! b₀ = (4 + φ′²)^{-1/2} [[2, −φ′], [−φ′, 2 + φ′²]], the calibration angle
//! is cos ρ = 2cosθ/√(4 + φ′²) with sin ρ > 0, and along the curves
//! q_{s₀}(t) = (s₀ + φ/2, t) the built isometries converge to the point
//! involution at (s₀, 0) as t → 0⁻, which is what makes these surfaces
//! usable as barriers.

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::ads::{to_affine, AdsError, AdsPoint};
use crate::grid::Grid;
use crate::hyperbolic::{HPoint, Isom2};
use crate::landslide::{rotation, DiffeoGrid, LandslideError, Tensor2Field};
use crate::numerics::integrate;
use crate::representation::{build_sigma, build_sigma_at, RepError, RepInput, RepOutput};
use crate::surface::ChartFunction;

#[derive(Debug, Error)]
pub enum BarrierError {
    #[error("theta = {0} outside (0, pi)")]
    ThetaRange(f64),
    #[error("t = {0} outside the open interval (-pi/2, 0)")]
    TRange(f64),
    #[error("tabulation range [{0}, {1}] invalid or not inside (-pi/2, 0)")]
    TableRange(f64, f64),
    #[error("graph inversion failed to converge at (x, y) = ({0}, {1})")]
    InversionFailed(f64, f64),
    #[error("windows do not overlap after projection to the chart")]
    NoOverlap,
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Landslide(#[from] LandslideError),
    #[error(transparent)]
    Ads(#[from] AdsError),
}

fn check_theta(theta: f64) -> Result<(), BarrierError> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(BarrierError::ThetaRange(theta));
    }
    Ok(())
}

/// F(r) = −2cosθ ∫₀^r du / ((4 + u²)√(4 sin²θ + u²)), absolute quadrature
/// error below 1e−13. For r > 1 the tail uses the substitution u = 1/s,
/// which keeps the integrand smooth and bounded.
pub fn f_integral(r: f64, theta: f64) -> f64 {
    let cos_t = theta.cos();
    if cos_t == 0.0 || r == 0.0 {
        return 0.0;
    }
    let s2 = 4.0 * theta.sin().powi(2);
    let head = |u: f64| 1.0 / ((4.0 + u * u) * (s2 + u * u).sqrt());
    if r <= 1.0 {
        -2.0 * cos_t * integrate(head, 0.0, r, 1e-14)
    } else {
        // ∫₁^r head du = ∫_{1/r}^1 s ds / ((4s² + 1)√(4 s² sin²θ + 1))
        let tail = |s: f64| s / ((4.0 * s * s + 1.0) * (s2 * s * s + 1.0).sqrt());
        -2.0 * cos_t * (integrate(head, 0.0, 1.0, 1e-14) + integrate(tail, 1.0 / r, 1.0, 1e-14))
    }
}

/// C = F(+∞) = F(1) − 2cosθ ∫₀^1 s ds / ((4s² + 1)√(4 s² sin²θ + 1)).
pub fn f_infinity(theta: f64) -> f64 {
    let cos_t = theta.cos();
    if cos_t == 0.0 {
        return 0.0;
    }
    let s2 = 4.0 * theta.sin().powi(2);
    let tail = |s: f64| s / ((4.0 * s * s + 1.0) * (s2 * s * s + 1.0).sqrt());
    f_integral(1.0, theta) - 2.0 * cos_t * integrate(tail, 0.0, 1.0, 1e-14)
}

/// F(r) − C for r ≥ 1, computed directly as the tail integral
/// 2cosθ ∫₀^{1/r} s ds/((4s²+1)√(4s²sin²θ+1)); this keeps full relative
/// accuracy where F − C is tiny.
fn f_minus_c(r: f64, theta: f64) -> f64 {
    let cos_t = theta.cos();
    if cos_t == 0.0 {
        return 0.0;
    }
    let s2 = 4.0 * theta.sin().powi(2);
    let tail = |s: f64| s / ((4.0 * s * s + 1.0) * (s2 * s * s + 1.0).sqrt());
    2.0 * cos_t * integrate(tail, 0.0, 1.0 / r, (1e-14 / (r * r)).max(1e-300))
}

/// Logarithm of the increasing side of the implicit relation:
/// ½ ln r − ¼ ln(r² + 4) + F(r) − C, in cancellation-free form
/// ¼ ln(1 − 4/(r²+4)) + (F(r) − C) so that values stay accurate as the
/// relation saturates for large r.
fn log_h(r: f64, theta: f64, c: f64) -> f64 {
    if r >= 1.0 {
        0.25 * f64::ln_1p(-4.0 / (r * r + 4.0)) + f_minus_c(r, theta)
    } else {
        0.5 * r.ln() - 0.25 * (r * r + 4.0).ln() + f_integral(r, theta) - c
    }
}

/// d/dr of `log_h`: 2/(r(4 + r²)) − 2cosθ/((4 + r²)√(4sin²θ + r²)).
fn dlog_h(r: f64, theta: f64) -> f64 {
    let q = 4.0 + r * r;
    2.0 / (r * q) - 2.0 * theta.cos() / (q * (4.0 * theta.sin().powi(2) + r * r).sqrt())
}

/// φ′(t): the unique root of log H(r) = ln cos t on (0, ∞).
///
/// Safeguarded bisection/Newton on the strictly increasing log form; the
/// residual of the implicit relation at the returned value is at roundoff
/// level.
pub fn solve_phi_prime(t: f64, theta: f64, c: f64) -> Result<f64, BarrierError> {
    check_theta(theta)?;
    if !(t > -std::f64::consts::FRAC_PI_2 && t < 0.0) {
        return Err(BarrierError::TRange(t));
    }
    let target = t.cos().ln();
    let f = |r: f64| log_h(r, theta, c) - target;
    // bracket [lo, hi] with f(lo) < 0 < f(hi)
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(BarrierError::TRange(t));
        }
    }
    let mut lo = 0.0;
    let mut r = 0.5 * hi;
    for _ in 0..200 {
        let fr = f(r);
        if fr.abs() < 1e-14 {
            break;
        }
        if fr < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        // Newton step from the current iterate, clipped to the bracket
        let step = fr / dlog_h(r, theta);
        let candidate = r - step;
        let next = if candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
        if (next - r).abs() <= 1e-16 * r.abs() {
            r = next;
            break;
        }
        r = next;
    }
    Ok(r)
}

/// φ″(t) by the chain rule on the implicit relation:
/// φ″ = −tan t / (d log H/dr)(φ′).
pub fn phi_second(t: f64, phi_prime: f64, theta: f64) -> f64 {
    -t.tan() / dlog_h(phi_prime, theta)
}

/// Residual of the scalar Codazzi ODE
/// −tan t − 2/(4+φ′²)(1/φ′ − cosθ/√(4sin²θ+φ′²))·φ″, with φ′ solved from
/// the implicit relation and φ″ from its derivative. Scaling the solved
/// profile makes this residual macroscopic on interior nodes.
pub fn ode_residual(t: f64, theta: f64, c: f64) -> Result<f64, BarrierError> {
    let p = solve_phi_prime(t, theta, c)?;
    Ok(ode_residual_at(t, p, phi_second(t, p, theta), theta))
}

/// ODE residual at explicitly supplied (φ′, φ″) values; the displayed
/// right-hand side is evaluated verbatim, so the negative control
/// (1.01·φ′, 1.01·φ″) probes a genuinely different function.
pub fn ode_residual_at(t: f64, phi_prime: f64, phi_second: f64, theta: f64) -> f64 {
    let q = 4.0 + phi_prime * phi_prime;
    let rhs = 2.0 / q
        * (1.0 / phi_prime
            - theta.cos() / (4.0 * theta.sin().powi(2) + phi_prime * phi_prime).sqrt())
        * phi_second;
    (-t.tan() - rhs).abs()
}

/// φ(t) = ∫_{−π/2}^t φ′ dτ, evaluated in the monotone substitution r = φ′:
///
///   φ(t) = ∫₀^{φ′(t)} r · H′(r)/√(1 − H(r)²) dr,
///
/// since t(r) = −arccos H(r). The factor 1 − H² is computed as
/// −expm1(2 log H), which stays exact as H → 1 (t → 0⁻), and the tail over
/// r > 1 runs in the variable w = ln r where the integrand is bounded; this
/// absorbs the singular asymptote φ′ ~ −√(2(1−cosθ))/t without ever
/// root-finding inside a quadrature.
pub fn phi_exact(t: f64, theta: f64, c: f64) -> Result<f64, BarrierError> {
    check_theta(theta)?;
    if !(t > -std::f64::consts::FRAC_PI_2 && t < 0.0) {
        if t == -std::f64::consts::FRAC_PI_2 {
            return Ok(0.0);
        }
        return Err(BarrierError::TRange(t));
    }
    let r_t = solve_phi_prime(t, theta, c)?;
    Ok(phi_between_slopes(0.0, r_t, theta, c))
}

/// ∫_{r₀}^{r₁} r·H′/√(1−H²) dr, split into a direct part on r ≤ 1 and a
/// logarithmic part on r > 1.
fn phi_between_slopes(r0: f64, r1: f64, theta: f64, c: f64) -> f64 {
    debug_assert!(r0 <= r1);
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let l = log_h(r, theta, c);
        let denom = (-f64::exp_m1(2.0 * l)).sqrt();
        r * l.exp() * dlog_h(r, theta) / denom
    };
    let split = 1.0_f64.clamp(r0, r1);
    let head = integrate(&integrand, r0, split, 1e-13);
    let tail = if r1 > split {
        integrate(|w: f64| {
            let r = w.exp();
            integrand(r) * r
        }, split.ln(), r1.ln(), 1e-13)
    } else {
        0.0
    };
    head + tail
}

/// Calibration angle ρ and frame-rotation angle ξ as functions of φ′:
/// cos ρ = 2cosθ/√(4+φ′²) with sin ρ > 0, and
/// sin ξ = −(2 sin ρ − φ′ cos ρ)/√(4+φ′²),
/// cos ξ = −(2 cos ρ + φ′ sin ρ)/√(4+φ′²).
///
/// Limits: ρ → θ as t → −π/2 (φ′ → 0) and cos ξ → −1,
/// φ′·sin ξ → −2(1−cosθ) as t → 0⁻.
pub fn rho_xi_of(phi_prime: f64, theta: f64) -> (f64, f64) {
    let tr = (4.0 + phi_prime * phi_prime).sqrt();
    let rho = (2.0 * theta.cos() / tr).acos();
    let sin_xi = -(2.0 * rho.sin() - phi_prime * rho.cos()) / tr;
    let cos_xi = -(2.0 * rho.cos() + phi_prime * rho.sin()) / tr;
    (rho, f64::atan2(sin_xi, cos_xi))
}

/// The square-root tensor of the family in closed form:
/// b₀ = (4 + φ′²)^{-1/2} [[2, −φ′], [−φ′, 2 + φ′²]].
pub fn b0_of(phi_prime: f64) -> Matrix2<f64> {
    Matrix2::new(2.0, -phi_prime, -phi_prime, 2.0 + phi_prime * phi_prime)
        / (4.0 + phi_prime * phi_prime).sqrt()
}

/// Tabulated profile of one member of the family: φ, φ′, φ″ on a
/// Chebyshev-type grid (denser near both ends), plus the derived angles.
#[derive(Debug, Clone)]
pub struct BarrierProfile {
    pub theta: f64,
    pub c: f64,
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
    pub phi_second: Vec<f64>,
    pub rho: Vec<f64>,
    pub xi: Vec<f64>,
}

impl BarrierProfile {
    /// Tabulate on [t_min, t_max] ⊂ (−π/2, 0) with n Chebyshev-extreme
    /// nodes. φ accumulates segment integrals of the solved φ′.
    pub fn tabulate(theta: f64, t_min: f64, t_max: f64, n: usize) -> Result<Self, BarrierError> {
        check_theta(theta)?;
        if !(t_min < t_max && t_min > -std::f64::consts::FRAC_PI_2 && t_max < 0.0) || n < 8 {
            return Err(BarrierError::TableRange(t_min, t_max));
        }
        let c = f_infinity(theta);
        let mid = 0.5 * (t_min + t_max);
        let half = 0.5 * (t_max - t_min);
        let t: Vec<f64> = (0..n)
            .map(|k| mid - half * (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos())
            .collect();
        let phi_prime: Vec<f64> = t
            .iter()
            .map(|&tk| solve_phi_prime(tk, theta, c))
            .collect::<Result<_, _>>()?;
        let phi_second: Vec<f64> = t
            .iter()
            .zip(&phi_prime)
            .map(|(&tk, &pk)| phi_second(tk, pk, theta))
            .collect();
        // φ at the first node from scratch, then accumulate segment
        // integrals in the slope variable
        let mut phi = Vec::with_capacity(n);
        phi.push(phi_exact(t[0], theta, c)?);
        for k in 1..n {
            let seg = phi_between_slopes(phi_prime[k - 1], phi_prime[k], theta, c);
            let prev = phi[k - 1];
            phi.push(prev + seg);
        }
        let mut rho = Vec::with_capacity(n);
        let mut xi = Vec::with_capacity(n);
        for &p in &phi_prime {
            let (r, x) = rho_xi_of(p, theta);
            rho.push(r);
            xi.push(x);
        }
        Ok(BarrierProfile { theta, c, t, phi, phi_prime, phi_second, rho, xi })
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn segment(&self, t: f64) -> usize {
        match self.t.binary_search_by(|probe| probe.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(self.t.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.t.len() - 2),
        }
    }

    fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> f64 {
        let h = x1 - x0;
        let s = (x - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        f0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * h * (s3 - 2.0 * s2 + s)
            + f1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * h * (s3 - s2)
    }

    /// φ(t) by cubic Hermite interpolation (values + exact derivatives).
    pub fn phi_at(&self, t: f64) -> f64 {
        let k = self.segment(t);
        Self::hermite(
            self.t[k],
            self.t[k + 1],
            self.phi[k],
            self.phi[k + 1],
            self.phi_prime[k],
            self.phi_prime[k + 1],
            t,
        )
    }

    /// φ′(t) by cubic Hermite interpolation.
    pub fn phi_prime_at(&self, t: f64) -> f64 {
        let k = self.segment(t);
        Self::hermite(
            self.t[k],
            self.t[k + 1],
            self.phi_prime[k],
            self.phi_prime[k + 1],
            self.phi_second[k],
            self.phi_second[k + 1],
            t,
        )
    }

    /// Largest residual of the implicit relation
    /// |φ′^{1/2}(φ′²+4)^{-1/4} e^{F(φ′)} − e^C cos t| at the tabulated nodes.
    pub fn implicit_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (tk, pk) in self.t.iter().zip(&self.phi_prime) {
            let lhs = pk.sqrt() / (pk * pk + 4.0).powf(0.25) * f_integral(*pk, self.theta).exp();
            let rhs = self.c.exp() * tk.cos();
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }

    /// Largest ODE residual at the tabulated nodes.
    pub fn ode_residual_max(&self) -> f64 {
        (0..self.t.len())
            .map(|k| ode_residual_at(self.t[k], self.phi_prime[k], self.phi_second[k], self.theta))
            .fold(0.0, f64::max)
    }
}

/// Member map of the family, sampled with analytic jets, together with the
/// calibrated tensor field b = R_ρ b₀ and the built surface.
pub fn barrier_patch(
    profile: &BarrierProfile,
    s_min: f64,
    s_max: f64,
    t_min: f64,
    t_max: f64,
    nu: usize,
    nv: usize,
) -> Result<(RepInput, RepOutput), BarrierError> {
    if !(t_min >= profile.t_min() && t_max <= profile.t_max() && t_min < t_max) {
        return Err(BarrierError::TableRange(t_min, t_max));
    }
    let hu = (s_max - s_min) / (nu - 1) as f64;
    let hv = (t_max - t_min) / (nv - 1) as f64;
    let phi = DiffeoGrid::from_map_with_jets(
        nu,
        nv,
        hu,
        hv,
        s_min,
        t_min,
        |s, t| (s - profile.phi_at(t), t),
        |_, t| Matrix2::new(1.0, -profile.phi_prime_at(t), 0.0, 1.0),
    )?;
    let field = phi.values.map_indexed(|_, j, _| {
        let p = profile.phi_prime_at(phi.values.v(j));
        let (rho, _) = rho_xi_of(p, profile.theta);
        rotation(rho) * b0_of(p)
    });
    let input = RepInput { phi, b: Tensor2Field { field }, theta: Some(profile.theta) };
    let out = build_sigma(&input)?;
    Ok((input, out))
}

/// The built isometry at the single parameter point (s₀ + φ(t)/2, t),
/// evaluated through the exact scalar solvers (no tabulation), so arbitrary
/// t in (−π/2, 0) are allowed.
pub fn trajectory_point(theta: f64, s0: f64, t: f64) -> Result<Isom2, BarrierError> {
    let c = f_infinity(theta);
    let phi = phi_exact(t, theta, c)?;
    let p = solve_phi_prime(t, theta, c)?;
    let (rho, _) = rho_xi_of(p, theta);
    let b = rotation(rho) * b0_of(p);
    let x = Vector2::new(s0 + 0.5 * phi, t);
    let phi_x = Vector2::new(s0 - 0.5 * phi, t);
    let dphi = Matrix2::new(1.0, -p, 0.0, 1.0);
    Ok(build_sigma_at(x, phi_x, &dphi, &b)?)
}

/// Closed form of the same isometry: the s-translation by φ composed with
/// the rotation by ξ about the image point, with entries
///
///   σ₁₁ = e^{φ/2} cos(t − ξ/2)/cos t,   σ₁₂ = e^{s₀} sin(ξ/2)/cos t,
///   σ₂₁ = −e^{−s₀} sin(ξ/2)/cos t,      σ₂₂ = e^{−φ/2} cos(t + ξ/2)/cos t,
///
/// up to the global projective sign. As t → 0⁻ this converges to the point
/// involution at (s₀, 0).
pub fn trajectory_closed_form(theta: f64, s0: f64, t: f64) -> Result<Matrix2<f64>, BarrierError> {
    let c = f_infinity(theta);
    let phi = phi_exact(t, theta, c)?;
    let p = solve_phi_prime(t, theta, c)?;
    let (_, xi) = rho_xi_of(p, theta);
    let ct = t.cos();
    let e = (0.5 * phi).exp();
    Ok(Matrix2::new(
        e * (t - 0.5 * xi).cos() / ct,
        s0.exp() * (0.5 * xi).sin() / ct,
        -(-s0).exp() * (0.5 * xi).sin() / ct,
        (t + 0.5 * xi).cos() / (e * ct),
    ))
}

/// Regular-grid graph of a member surface over a rectangle of the affine
/// chart, produced by Newton inversion of the forward map
/// (s, t) ↦ (x, y) at every chart node. u(x, y) is exact up to the solver
/// tolerance, so finite differences of the result measure the surface, not
/// an interpolant.
pub fn chart_graph(
    profile: &BarrierProfile,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    nx: usize,
    ny: usize,
    seed: (f64, f64),
) -> Result<ChartFunction, BarrierError> {
    let forward = |s: f64, t: f64| -> Result<(f64, f64, f64), BarrierError> {
        let sigma = sigma_on_grid(profile, s, t)?;
        let aff = to_affine(&AdsPoint::new(sigma)?)?;
        Ok((aff.x, aff.y, aff.t))
    };
    let t_range = (profile.t_min() + 1e-9, profile.t_max() - 1e-9);
    let mut grid = Grid::from_fn(nx, ny, hx, hy, x0, y0, |_, _| f64::NAN);
    let mut row_seed = seed;
    for i in 0..nx {
        let mut node_seed = row_seed;
        for j in 0..ny {
            let target = (grid.u(i), grid.v(j));
            let (s, t) = newton_invert(&forward, node_seed, target, t_range)?;
            let (_, _, u) = forward(s, t)?;
            *grid.get_mut(i, j) = u;
            if j == 0 {
                row_seed = (s, t);
            }
            node_seed = (s, t);
        }
    }
    Ok(ChartFunction { grid })
}

/// σ of the family at an arbitrary (s, t) inside the profile range, via the
/// closed-form frame construction.
fn sigma_on_grid(profile: &BarrierProfile, s: f64, t: f64) -> Result<Matrix2<f64>, BarrierError> {
    let phi = profile.phi_at(t);
    let p = profile.phi_prime_at(t);
    let (rho, _) = rho_xi_of(p, profile.theta);
    let b = rotation(rho) * b0_of(p);
    let dphi = Matrix2::new(1.0, -p, 0.0, 1.0);
    let x = Vector2::new(s, t);
    let phi_x = Vector2::new(s - phi, t);
    Ok(build_sigma_at(x, phi_x, &dphi, &b)?.matrix())
}

fn newton_invert(
    forward: &dyn Fn(f64, f64) -> Result<(f64, f64, f64), BarrierError>,
    seed: (f64, f64),
    target: (f64, f64),
    t_range: (f64, f64),
) -> Result<(f64, f64), BarrierError> {
    let (mut s, mut t) = seed;
    let h = 1e-7;
    for _ in 0..80 {
        let (x, y, _) = forward(s, t)?;
        let rx = x - target.0;
        let ry = y - target.1;
        if rx.abs() + ry.abs() < 1e-12 {
            return Ok((s, t));
        }
        let (xs1, ys1, _) = forward(s + h, t)?;
        let (xs0, ys0, _) = forward(s - h, t)?;
        let (xt1, yt1, _) = forward(s, t + h)?;
        let (xt0, yt0, _) = forward(s, t - h)?;
        let jac = Matrix2::new(
            (xs1 - xs0) / (2.0 * h),
            (xt1 - xt0) / (2.0 * h),
            (ys1 - ys0) / (2.0 * h),
            (yt1 - yt0) / (2.0 * h),
        );
        let Some(inv) = jac.try_inverse() else {
            return Err(BarrierError::InversionFailed(target.0, target.1));
        };
        let mut step = inv * Vector2::new(rx, ry);
        // cap the step length so iterates stay in the tabulated region
        let cap = 0.25;
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        s -= step[0];
        t -= step[1];
        t = t.clamp(t_range.0 + h, t_range.1 - h);
    }
    Err(BarrierError::InversionFailed(target.0, target.1))
}

/// One-sided ordering check between two members of the family over a shared
/// chart window: the two graphs are compared on the largest common (x, y)
/// rectangle. Returns strictness, the sign of (u_{θ₂} − u_{θ₁}), and the
/// minimum gap. A numerical spot-check, not a proof.
#[derive(Debug, Clone)]
pub struct NestingReport {
    pub one_sided: bool,
    pub sign: f64,
    pub margin: f64,
    pub nodes: usize,
}

pub fn nesting_check(
    theta1: f64,
    theta2: f64,
    s_window: (f64, f64),
    t_window: (f64, f64),
    n: usize,
) -> Result<NestingReport, BarrierError> {
    let pad = 0.35;
    let profile1 = BarrierProfile::tabulate(
        theta1,
        (t_window.0 - pad).max(-1.55),
        (t_window.1 + pad).min(-0.02),
        400,
    )?;
    let profile2 = BarrierProfile::tabulate(
        theta2,
        (t_window.0 - pad).max(-1.55),
        (t_window.1 + pad).min(-0.02),
        400,
    )?;
    // forward-map the window boundary for both members; intersect boxes
    let bbox = |profile: &BarrierProfile| -> Result<(f64, f64, f64, f64), BarrierError> {
        let mut xmin = f64::MAX;
        let mut xmax = f64::MIN;
        let mut ymin = f64::MAX;
        let mut ymax = f64::MIN;
        let m = 9;
        for a in 0..m {
            for b in 0..m {
                let s = s_window.0 + (s_window.1 - s_window.0) * a as f64 / (m - 1) as f64;
                let t = t_window.0 + (t_window.1 - t_window.0) * b as f64 / (m - 1) as f64;
                let aff = to_affine(&AdsPoint::new(sigma_on_grid(profile, s, t)?)?)?;
                xmin = xmin.min(aff.x);
                xmax = xmax.max(aff.x);
                ymin = ymin.min(aff.y);
                ymax = ymax.max(aff.y);
            }
        }
        Ok((xmin, xmax, ymin, ymax))
    };
    let (a1, b1, c1, d1) = bbox(&profile1)?;
    let (a2, b2, c2, d2) = bbox(&profile2)?;
    // shrink the intersection toward its center to stay strictly inside
    let lo_x = a1.max(a2);
    let hi_x = b1.min(b2);
    let lo_y = c1.max(c2);
    let hi_y = d1.min(d2);
    if !(lo_x < hi_x && lo_y < hi_y) {
        return Err(BarrierError::NoOverlap);
    }
    let shrink = 0.3;
    let cx = 0.5 * (lo_x + hi_x);
    let cy = 0.5 * (lo_y + hi_y);
    let wx = (hi_x - lo_x) * (1.0 - shrink);
    let wy = (hi_y - lo_y) * (1.0 - shrink);
    let hx = wx / (n - 1) as f64;
    let hy = wy / (n - 1) as f64;
    let seed = (
        0.5 * (s_window.0 + s_window.1),
        0.5 * (t_window.0 + t_window.1),
    );
    let g1 = chart_graph(&profile1, cx - 0.5 * wx, cy - 0.5 * wy, hx, hy, n, n, seed)?;
    let g2 = chart_graph(&profile2, cx - 0.5 * wx, cy - 0.5 * wy, hx, hy, n, n, seed)?;
    let mut min_gap = f64::MAX;
    let mut max_gap = f64::MIN;
    let mut nodes = 0;
    for i in 0..n {
        for j in 0..n {
            let diff = g2.grid.get(i, j) - g1.grid.get(i, j);
            min_gap = min_gap.min(diff);
            max_gap = max_gap.max(diff);
            nodes += 1;
        }
    }
    let one_sided = min_gap > 0.0 || max_gap < 0.0;
    let sign = if max_gap < 0.0 { -1.0 } else { 1.0 };
    Ok(NestingReport {
        one_sided,
        sign,
        margin: min_gap.abs().min(max_gap.abs()),
        nodes,
    })
}

/// Boundary behavior at the flat end: the images of the half-plane interior
/// point i·e^{s₀} under σ(t) and σ(t)⁻¹ as t → −π/2 both converge to the
/// boundary point e^{s₀}.
pub fn boundary_images(theta: f64, s0: f64, t: f64) -> Result<(f64, f64), BarrierError> {
    let sigma = trajectory_point(theta, s0, t)?;
    let m = HPoint::uhp(0.0, s0.exp());
    let fwd = sigma.apply(&m).to_uhp();
    let bwd = sigma.inverse().apply(&m).to_uhp();
    Ok((fwd.0, bwd.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn f_vanishes_at_zero_and_for_right_angles() {
        assert_abs_diff_eq!(f_integral(0.0, FRAC_PI_3), 0.0);
        assert_abs_diff_eq!(f_integral(3.7, FRAC_PI_2), 0.0);
        assert_abs_diff_eq!(f_infinity(FRAC_PI_2), 0.0);
    }

    #[test]
    fn f_tail_quadratic_law() {
        // F(1/u) − C = cosθ·u² + o(u²)
        for theta in [FRAC_PI_3, 2.0 * PI / 3.0] {
            let c = f_infinity(theta);
            for u in [1e-2, 1e-3] {
                let slope = (f_integral(1.0 / u, theta) - c) / (u * u);
                assert_abs_diff_eq!(slope, theta.cos(), epsilon = 2e-4);
            }
        }
    }

    #[test]
    fn phi_prime_closed_form_oracle_at_right_angle() {
        // θ = π/2: r/√(r²+4) = cos²t, so at t = −π/4 the root is 2/√3
        let c = f_infinity(FRAC_PI_2);
        let r = solve_phi_prime(-FRAC_PI_4, FRAC_PI_2, c).unwrap();
        assert_abs_diff_eq!(r, 2.0 / 3.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r, 1.154_700_5, epsilon = 1e-6);
    }

    #[test]
    fn phi_prime_limits() {
        let theta = FRAC_PI_3;
        let c = f_infinity(theta);
        assert!(solve_phi_prime(-FRAC_PI_2 + 1e-8, theta, c).unwrap() < 1e-6);
        assert!(solve_phi_prime(-1e-6, theta, c).unwrap() > 1e4);
    }

    #[test]
    fn phi_prime_asymptote_at_the_singular_end() {
        // t·φ′(t) → −√(2(1−cosθ))
        for theta in [FRAC_PI_3, FRAC_PI_2, 2.0 * PI / 3.0] {
            let c = f_infinity(theta);
            let a = (2.0 * (1.0 - theta.cos())).sqrt();
            let t = -1e-4;
            let r = solve_phi_prime(t, theta, c).unwrap();
            assert!(
                (t * r + a).abs() < 1e-2,
                "t phi' = {} vs -{a} at theta = {theta}",
                t * r
            );
        }
    }

    #[test]
    fn phi_primitive_normalization_and_divergence() {
        let theta = FRAC_PI_2;
        let c = f_infinity(theta);
        assert_abs_diff_eq!(phi_exact(-FRAC_PI_2, theta, c).unwrap(), 0.0);
        assert!(phi_exact(-1.5, theta, c).unwrap() < 0.05);
        // increasing toward the singular end, eventually large
        let a = phi_exact(-0.3, theta, c).unwrap();
        let b = phi_exact(-0.05, theta, c).unwrap();
        let d = phi_exact(-1e-3, theta, c).unwrap();
        assert!(a < b && b < d);
        assert!(d > 5.0);
        // t e^{φ/2} → 0
        let small = |t: f64| t.abs() * (0.5 * phi_exact(t, theta, c).unwrap()).exp();
        assert!(small(-1e-3) < small(-1e-2));
        assert!(small(-1e-4) < small(-1e-3));
    }

    #[test]
    fn right_angle_member_matches_the_independent_closed_form() {
        // at θ = π/2 (C = 0) the implicit relation solves in closed form:
        // φ′(t) = 2cos²t/√(1−cos⁴t); compare the two evaluators
        let c = f_infinity(FRAC_PI_2);
        for k in 0..14 {
            let t = -1.4 + 0.1 * k as f64;
            let closed = 2.0 * t.cos().powi(2) / (1.0 - t.cos().powi(4)).sqrt();
            let solved = solve_phi_prime(t, FRAC_PI_2, c).unwrap();
            assert_abs_diff_eq!(solved, closed, epsilon = 1e-10 * (1.0 + closed));
        }
        // and the primitive agrees with direct quadrature of the closed form
        let quad = integrate(
            |tau: f64| 2.0 * tau.cos().powi(2) / (1.0 - tau.cos().powi(4)).sqrt(),
            -1.4,
            -0.1,
            1e-12,
        );
        let mine = phi_exact(-0.1, FRAC_PI_2, c).unwrap() - phi_exact(-1.4, FRAC_PI_2, c).unwrap();
        assert_abs_diff_eq!(mine, quad, epsilon = 1e-9);
    }

    #[test]
    fn weighted_exponential_stays_bounded() {
        // |t|^α e^{φ(t)} monotone bounded for α ∈ (√(2(1−cosθ)), 1)
        let theta = FRAC_PI_4;
        let c = f_infinity(theta);
        let a = (2.0 * (1.0 - theta.cos())).sqrt();
        let alpha = 0.9;
        assert!(alpha > a && alpha < 1.0);
        let w = |t: f64| t.abs().powf(alpha) * phi_exact(t, theta, c).unwrap().exp();
        let mut prev = w(-0.1);
        for k in 2..5 {
            let cur = w(-(10.0_f64).powi(-k));
            assert!(cur <= prev * (1.0 + 1e-9), "not monotone at k = {k}");
            prev = cur;
        }
        assert!(prev < w(-0.1));
    }

    #[test]
    fn rho_and_xi_limits() {
        // θ = π/2 makes ρ ≡ π/2
        let c = f_infinity(FRAC_PI_2);
        for t in [-1.3, -0.7, -0.1] {
            let p = solve_phi_prime(t, FRAC_PI_2, c).unwrap();
            let (rho, xi) = rho_xi_of(p, FRAC_PI_2);
            assert_abs_diff_eq!(rho, FRAC_PI_2, epsilon = 1e-14);
            // ξ consistency: sin² + cos² = 1 via atan2 is automatic; check
            // the defining components instead
            let tr = (4.0 + p * p).sqrt();
            assert_abs_diff_eq!(xi.sin(), -(2.0 - p * 0.0) / tr, epsilon = 1e-12);
        }
        for theta in [FRAC_PI_3, FRAC_PI_2, 2.0 * PI / 3.0] {
            let c = f_infinity(theta);
            // ρ → θ at the flat end
            let p = solve_phi_prime(-FRAC_PI_2 + 1e-6, theta, c).unwrap();
            let (rho, xi) = rho_xi_of(p, theta);
            assert!((rho - theta).abs() < 1e-8, "rho defect {}", rho - theta);
            let _ = xi;
            // cos ξ → −1 and φ′ sin ξ → −2(1−cosθ) at the singular end
            let p = solve_phi_prime(-1e-4, theta, c).unwrap();
            let (_, xi) = rho_xi_of(p, theta);
            assert!((xi.cos() + 1.0).abs() < 1e-3);
            assert!(
                (p * xi.sin() + 2.0 * (1.0 - theta.cos())).abs() < 1e-2,
                "phi' sin xi = {}",
                p * xi.sin()
            );
        }
    }

    #[test]
    fn ode_residual_is_tiny_and_detects_perturbations() {
        let c = f_infinity(FRAC_PI_2);
        assert!(ode_residual(-FRAC_PI_4, FRAC_PI_2, c).unwrap() < 1e-10);
        for theta in [FRAC_PI_3, FRAC_PI_2, 2.0 * PI / 3.0] {
            let c = f_infinity(theta);
            for k in 0..30 {
                let t = -1.5 + 1.45 * k as f64 / 29.0;
                assert!(ode_residual(t, theta, c).unwrap() < 1e-8);
            }
            // ×1.01 perturbation of the whole profile: macroscopic residual
            // on an interior subgrid
            for k in 0..9 {
                let t = -1.0 + 0.8 * k as f64 / 8.0;
                let p = solve_phi_prime(t, theta, c).unwrap();
                let pp = phi_second(t, p, theta);
                assert!(
                    ode_residual_at(t, 1.01 * p, 1.01 * pp, theta) > 1e-3,
                    "perturbed residual too small at t = {t}"
                );
            }
        }
    }

    #[test]
    fn tabulation_matches_the_exact_solvers() {
        let theta = 2.0 * PI / 3.0;
        let profile = BarrierProfile::tabulate(theta, -1.45, -0.1, 300).unwrap();
        assert!(profile.implicit_residual() < 1e-10);
        assert!(profile.ode_residual_max() < 1e-8);
        let c = profile.c;
        // tolerance tracks the local interpolation budget: φ⁗ grows like
        // |t|⁻⁴ toward the singular end
        for (t, tol) in [(-1.31, 1e-9), (-0.77, 1e-9), (-0.21, 1e-7)] {
            assert_abs_diff_eq!(
                profile.phi_prime_at(t),
                solve_phi_prime(t, theta, c).unwrap(),
                epsilon = tol
            );
            assert_abs_diff_eq!(
                profile.phi_at(t),
                phi_exact(t, theta, c).unwrap(),
                epsilon = tol
            );
        }
        // strict monotonicity of the tabulated φ′
        for k in 1..profile.t.len() {
            assert!(profile.phi_prime[k] > profile.phi_prime[k - 1]);
        }
    }

    #[test]
    fn trajectory_matches_the_closed_form() {
        for theta in [FRAC_PI_2, 2.0 * PI / 3.0] {
            for s0 in [-0.5, 0.0, 0.8] {
                for t in [-1.2, -0.6, -0.2] {
                    let built = trajectory_point(theta, s0, t).unwrap().matrix();
                    let closed = trajectory_closed_form(theta, s0, t).unwrap();
                    let d = ((built - closed).norm()).min((built + closed).norm());
                    assert!(
                        d < 1e-9,
                        "closed form defect {d} at theta={theta}, s0={s0}, t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn trajectory_converges_to_the_point_involution() {
        // σ(t) → involution at (s₀, 0), with rate |t|^{1 − a/2}
        let theta = FRAC_PI_2;
        let a = 2.0_f64.sqrt();
        for s0 in [-1.0, 0.0, 1.0] {
            let target = AdsPoint::involution(&HPoint::strip(s0, 0.0)).matrix();
            let dist = |t: f64| {
                let m = trajectory_point(theta, s0, t).unwrap().matrix();
                ((m - target).norm()).min((m + target).norm())
            };
            let d3 = dist(-1e-3);
            let d4 = dist(-1e-4);
            let d5 = dist(-1e-5);
            assert!(d4 < d3 && d5 < d4, "must be decreasing: {d3}, {d4}, {d5}");
            // measured decay rate per decade ≈ 1 − a/2 ≈ 0.293
            let rate = (d4 / d5).log10();
            assert!(
                (rate - (1.0 - 0.5 * a)).abs() < 0.05,
                "measured rate {rate}"
            );
        }
    }

    #[test]
    fn boundary_images_converge_at_the_flat_end() {
        for s0 in [-0.4, 0.3] {
            let mut prev = f64::MAX;
            for delta in [1e-2, 1e-3, 1e-4] {
                let t = -FRAC_PI_2 + delta;
                let (fwd, bwd) = boundary_images(FRAC_PI_3, s0, t).unwrap();
                let err = (fwd - s0.exp()).abs() + (bwd - s0.exp()).abs();
                assert!(err < prev, "boundary images must approach e^(s0)");
                prev = err;
            }
            assert!(prev < 1e-2);
        }
    }

    #[test]
    fn reflection_symmetry_of_the_member_maps() {
        // Φ_θ maps (s₀ + φ/2, t) to (s₀ − φ/2, t): mirror images across s₀
        let theta = FRAC_PI_3;
        let c = f_infinity(theta);
        let s0 = 0.37;
        for t in [-1.2, -0.5] {
            let phi = phi_exact(t, theta, c).unwrap();
            let q = s0 + 0.5 * phi;
            let image_s = q - phi;
            assert_abs_diff_eq!(image_s, s0 - 0.5 * phi, epsilon = 1e-12);
        }
    }
}
