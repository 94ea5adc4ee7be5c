//! Quadrature rules: adaptive Simpson for smooth integrands (the reference
//! oracle for every closed-form integral in the crate) and composite
//! Simpson on uniformly sampled data.

use num_complex::Complex64;

/// Default absolute tolerance for [`adaptive_simpson`].
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

const INITIAL_PIECES: usize = 16;
const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of a complex-valued integrand on `[a, b]`
/// with absolute tolerance `abs_tol`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let width = (b - a) / INITIAL_PIECES as f64;
    let piece_tol = abs_tol / INITIAL_PIECES as f64;
    (0..INITIAL_PIECES)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == INITIAL_PIECES { b } else { lo + width };
            let fa = f(lo);
            let fm = f(0.5 * (lo + hi));
            let fb = f(hi);
            let whole = simpson_panel(lo, hi, fa, fm, fb);
            refine(&f, lo, hi, fa, fm, fb, whole, piece_tol, MAX_DEPTH)
        })
        .sum()
}

/// Real-valued convenience wrapper around [`adaptive_simpson`].
pub fn adaptive_simpson_real<F>(f: F, a: f64, b: f64, abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    adaptive_simpson(|t| Complex64::new(f(t), 0.0), a, b, abs_tol).re
}

/// Adaptive Simpson with the tolerance taken relative to a coarse estimate
/// of `∫|f|`, for integrals whose magnitude is far from one.
pub fn adaptive_simpson_rel<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let n = 256;
    let h = (b - a) / n as f64;
    let mass: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * f(a + h * i as f64).norm()
        })
        .sum::<f64>()
        * h.abs();
    let tol = rel_tol * mass.max(f64::MIN_POSITIVE);
    adaptive_simpson(f, a, b, tol)
}

fn simpson_panel(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson on uniformly spaced samples with spacing `h`.
///
/// An even number of intervals uses the 1/3 rule throughout; an odd number
/// closes with a 3/8 panel over the last three intervals. Two samples fall
/// back to the trapezoid rule.
pub fn composite_simpson(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len();
    match n {
        0 | 1 => Complex64::new(0.0, 0.0),
        2 => (values[0] + values[1]) * (0.5 * h),
        _ => {
            let intervals = n - 1;
            if intervals.is_multiple_of(2) {
                simpson_even(values, h)
            } else if intervals == 3 {
                three_eighths(values, h)
            } else {
                simpson_even(&values[..n - 3], h) + three_eighths(&values[n - 4..], h)
            }
        }
    }
}

fn simpson_even(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len();
    let mut acc = values[0] + values[n - 1];
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

fn three_eighths(v: &[Complex64], h: f64) -> Complex64 {
    (v[0] + v[1] * 3.0 + v[2] * 3.0 + v[3]) * (3.0 * h / 8.0)
}
