//! Numerical kernels: adaptive Gauss–Kronrod quadrature, bracketed root
//! finding, central finite-difference stencils and a Halton sequence.

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_27,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss-7 weights for the embedded rule (odd Kronrod indices).
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if i == 7 {
            let fc = f(center);
            (fc, 0.0)
        } else {
            (f(center - half * x), f(center + half * x))
        };
        kronrod += wk * (fl + fr);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fl + fr);
        } else if i == 7 {
            // center node counts once and belongs to both rules
            gauss += WG[3] * fl;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Bisects segments until the embedded Gauss–Kronrod error estimate of each
/// segment is below its share of the tolerance. The integrands used in this
/// crate are smooth, so the recursion stays shallow.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut total = 0.0;
    // segment stack: (lo, hi, tolerance share, depth)
    let mut stack = vec![(a, b, abs_tol.max(1e-15), 0u32)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        // non-finite values propagate immediately instead of subdividing,
        // and the roundoff floor stops subdivision once the panel estimate
        // is dominated by machine noise
        if err <= tol.max(1e-14 * val.abs()).max(1e-18) || depth >= 30 || !val.is_finite() {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol, depth + 1));
            stack.push((mid, hi, 0.5 * tol, depth + 1));
        }
    }
    total
}

/// Root of a continuous function on a sign-changing bracket by bisection.
///
/// Runs until the bracket collapses to machine width or `max_iter` halvings,
/// whichever comes first. Returns the bracket midpoint.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, max_iter: usize) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let rising = flo < 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central-difference stencil order used by the grid operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Three-point: errors O(h²). One-node interior margin.
    Order2,
    /// Five-point: errors O(h⁴). Two-node interior margin.
    Order4,
}

impl Stencil {
    /// Number of grid nodes the stencil reaches on each side.
    pub fn margin(self) -> usize {
        match self {
            Stencil::Order2 => 1,
            Stencil::Order4 => 2,
        }
    }

    /// First derivative from samples `f(x + k h)`, k = -2..2 (`Order2`
    /// ignores the outermost pair).
    pub fn d1(self, fm2: f64, fm1: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
        match self {
            Stencil::Order2 => (fp1 - fm1) / (2.0 * h),
            Stencil::Order4 => (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h),
        }
    }

    /// Second derivative from samples `f(x + k h)`, k = -2..2.
    pub fn d2(self, fm2: f64, fm1: f64, f0: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
        match self {
            Stencil::Order2 => (fp1 - 2.0 * f0 + fm1) / (h * h),
            Stencil::Order4 => {
                (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h)
            }
        }
    }

    /// First derivative with lazily sampled offsets: only the nodes the
    /// stencil actually touches are requested.
    pub fn d1_of(self, f: impl Fn(isize) -> f64, h: f64) -> f64 {
        match self {
            Stencil::Order2 => (f(1) - f(-1)) / (2.0 * h),
            Stencil::Order4 => (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * h),
        }
    }

    /// Second derivative with lazily sampled offsets.
    pub fn d2_of(self, f: impl Fn(isize) -> f64, h: f64) -> f64 {
        match self {
            Stencil::Order2 => (f(1) - 2.0 * f(0) + f(-1)) / (h * h),
            Stencil::Order4 => {
                (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) / (12.0 * h * h)
            }
        }
    }
}

/// `i`-th element of the Halton sequence in the given prime base, in (0, 1).
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_smooth_functions_to_tolerance() {
        let v = integrate(|x| x.exp(), 0.0, 1.0, 1e-13);
        assert_abs_diff_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-12);
        let v = integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-13);
        assert_abs_diff_eq!(v, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn integrates_mildly_singular_derivative() {
        // |f'| blows up at 0 but f is integrable and smooth inside
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn bisection_finds_monotone_roots() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 200);
        assert_abs_diff_eq!(r, 2.0_f64.sqrt(), epsilon = 1e-14);
        let r = bisect(|x| -(x - 0.25), 0.0, 1.0, 200);
        assert_abs_diff_eq!(r, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn stencils_reproduce_polynomial_derivatives() {
        let f = |x: f64| 1.0 + 3.0 * x + 0.5 * x * x * x;
        let df = |x: f64| 3.0 + 1.5 * x * x;
        let h = 0.1;
        let x0 = 0.7;
        let s = [f(x0 - 2.0 * h), f(x0 - h), f(x0), f(x0 + h), f(x0 + 2.0 * h)];
        // cubic: exact for the 4th-order rule, O(h^2) for the 3-point one
        assert_abs_diff_eq!(
            Stencil::Order4.d1(s[0], s[1], s[3], s[4], h),
            df(x0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            Stencil::Order2.d2(s[0], s[1], s[2], s[3], s[4], h),
            3.0 * x0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn halton_is_deterministic_and_in_unit_interval() {
        for i in 1..100 {
            let x = halton(i, 2);
            assert!(x > 0.0 && x < 1.0);
        }
        assert_abs_diff_eq!(halton(1, 2), 0.5);
        assert_abs_diff_eq!(halton(2, 3), 2.0 / 3.0);
    }
}
