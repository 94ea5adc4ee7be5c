//! Numerical checks of the entire-function property.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::series::expand;
use super::{FltExpr, LOCAL_SERIES_TERMS, ROUNDING};

/// Probe circle radii around each denominator root, outer first.
pub const PROBE_RADII: [f64; 2] = [1e-3, 1e-5];

/// Probe points per circle.
pub const PROBE_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct RootCheck {
    pub root: Complex64,
    /// Series value at the root; `None` when the singular part does not cancel.
    pub limit: Option<Complex64>,
    /// Largest distance between direct evaluation on the probe circles and
    /// the local series.
    pub max_deviation: f64,
    /// Largest `|F - limit|` on each probe circle, outer first.
    pub spread: [f64; 2],
    /// Deviations and spreads are in units of `exp(log_scale)`; nonzero
    /// only where `exp(-s T)` would overflow near the root.
    pub log_scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntireReport {
    pub tol: f64,
    pub roots: Vec<RootCheck>,
}

impl EntireReport {
    pub fn passed(&self) -> bool {
        self.roots.iter().all(|r| r.pass)
    }
}

/// Check every denominator root of `expr` for a finite limit.
///
/// Around each root `r` the expression is evaluated directly on circles of
/// radius `1e-3` and `1e-5`. A root passes when the local series has no
/// singular part, the direct values agree with the series within
/// `tol * (1 + |limit|)` plus the rounding floor of direct evaluation and
/// of the singular terms the series treats as cancelled,
/// and the spread about the limit does not grow as
/// the radius shrinks.
pub fn verify_entire(expr: &FltExpr, tol: f64) -> EntireReport {
    let roots = expr
        .singular_points()
        .into_iter()
        .map(|root| check_root(expr, root, tol))
        .collect();
    EntireReport { tol, roots }
}

fn check_root(expr: &FltExpr, root: Complex64, tol: f64) -> RootCheck {
    let exp = expand(expr, root, LOCAL_SERIES_TERMS - 1);
    // all comparisons in units of exp(log_scale), which keeps exp(-s d) finite
    let shift = exp.log_scale;
    let limit = exp.regular().ok().map(|c| c[0]);
    let mut max_deviation: f64 = 0.0;
    let mut spread = [0.0f64; 2];
    let mut noise: f64 = 0.0;
    for (ring, &radius) in PROBE_RADII.iter().enumerate() {
        for k in 0..PROBE_POINTS {
            let h = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / PROBE_POINTS as f64);
            let direct = expr.eval_direct_scaled(root + h, shift);
            noise = noise.max(ROUNDING * expr.eval_gross_scaled(root + h, shift) + exp.cancelled_singular_bound(radius));
            match limit {
                Some(l) => {
                    max_deviation = max_deviation.max((direct - exp.eval_regular(h)).norm());
                    spread[ring] = spread[ring].max((direct - l).norm());
                }
                None => {
                    max_deviation = f64::INFINITY;
                    spread[ring] = spread[ring].max(direct.norm());
                }
            }
        }
    }
    let pass = match limit {
        Some(l) => {
            let allowed = tol * (1.0 + l.norm()) + noise;
            max_deviation.is_finite()
                && max_deviation <= allowed
                && spread[1] <= spread[0] + allowed
        }
        None => false,
    };
    RootCheck {
        root,
        limit: limit.map(|l| exp.unscale(l)),
        max_deviation,
        spread,
        log_scale: shift,
        pass,
    }
}

/// The residue method applied to an expression: sum over its denominator
/// roots `p` of `Res_{s=p} e^{st} F(s)`.
///
/// For a transform every singular part cancels and the sum is zero; for the
/// bare `1/(s - a)` it is `e^{at}`.
pub fn residue_counterexample(expr: &FltExpr, t: f64) -> Complex64 {
    expr.singular_points()
        .into_iter()
        .map(|p| {
            let exp = expand(expr, p, 0);
            let ept = (p * t + exp.log_scale).exp();
            let mut fact = 1.0;
            let mut tp = 1.0;
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, c) in exp.singular().into_iter().enumerate() {
                if j > 0 {
                    fact *= j as f64;
                    tp *= t;
                }
                sum += c * ept * (tp / fact);
            }
            sum
        })
        .sum()
}

/// `∮ F(s) ds` over the circle `|s - center| = radius` by the trapezoid rule
/// with `points` nodes.
pub fn contour_integral(expr: &FltExpr, center: Complex64, radius: f64, points: usize) -> Complex64 {
    let n = points.max(1);
    let step = 2.0 * PI / n as f64;
    let sum: Complex64 = (0..n)
        .map(|k| {
            let z = Complex64::from_polar(radius, step * k as f64);
            let value = expr
                .eval(center + z, super::EXCLUSION_TOL)
                .unwrap_or_else(|_| expr.eval_direct(center + z));
            value * Complex64::new(0.0, 1.0) * z
        })
        .sum();
    sum * step
}
