//! The convolution theorem on a finite horizon.
//!
//! With `f` and `g` taken as zero outside `[0, T]`, their convolution `h`
//! lives on `[0, 2T]`. The product of the two finite transforms equals the
//! transform of `h` over `[0, 2T]`, not over `[0, T]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flt::{flt_of_signal, EXCLUSION_TOL};
use crate::quad::composite_simpson;
use crate::signal::TimeSignal;

/// Smallest accepted number of grid intervals over `[0, 2T]`.
pub const MIN_INTERVALS: usize = 2048;

/// Default number of grid intervals over `[0, 2T]`.
pub const DEFAULT_INTERVALS: usize = 4096;

/// Uniform samples `values[i] = h(i * step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub step: f64,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| i as f64 * self.step)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∫ e^{-st} h(t) dt` over the first `intervals` intervals.
    pub fn transform(&self, s: Complex64, intervals: usize) -> Complex64 {
        let weighted: Vec<Complex64> = self
            .values
            .iter()
            .take(intervals + 1)
            .enumerate()
            .map(|(i, &v)| (-s * (i as f64 * self.step)).exp() * v)
            .collect();
        composite_simpson(&weighted, self.step)
    }
}

fn check_grid(intervals: usize) -> Result<()> {
    if intervals < MIN_INTERVALS || !intervals.is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "grid must have at least {MIN_INTERVALS} intervals and a multiple of 4, got {intervals}"
        )));
    }
    Ok(())
}

fn same_horizon(f: &TimeSignal, g: &TimeSignal) -> Result<f64> {
    let t = f.horizon();
    if (t - g.horizon()).abs() > 1e-12 * t {
        return Err(Error::InvalidArgument(format!(
            "signals must share a horizon: {} vs {}",
            t,
            g.horizon()
        )));
    }
    Ok(t)
}

/// `h(t_i) = ∫ f(τ) g(t_i - τ) dτ` on `intervals` uniform intervals over `[0, 2T]`.
///
/// Each inner integral runs over `[max(0, t_i - T), min(t_i, T)]`, whose
/// ends are grid nodes, with composite Simpson (3/8 closing panel on odd
/// counts).
pub fn convolve(f: &TimeSignal, g: &TimeSignal, intervals: usize) -> Result<SampledSignal> {
    check_grid(intervals)?;
    let horizon = same_horizon(f, g)?;
    let half = intervals / 2;
    let step = horizon / half as f64;
    let node = |i: usize| if i == half { horizon } else { i as f64 * step };
    let fv: Vec<f64> = (0..=half).map(|i| f.value(node(i))).collect();
    let gv: Vec<f64> = (0..=half).map(|i| g.value(node(i))).collect();
    let mut buf = Vec::with_capacity(half + 1);
    let values = (0..=intervals)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = i.min(half);
            if hi <= lo {
                return 0.0;
            }
            buf.clear();
            buf.extend((lo..=hi).map(|j| Complex64::new(fv[j] * gv[i - j], 0.0)));
            composite_simpson(&buf, step).re
        })
        .collect();
    Ok(SampledSignal { step, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub s: Complex64,
    /// `F(s) G(s)` from the closed-form transforms.
    pub product: Complex64,
    /// Transform of `h` over `[0, T]`.
    pub restricted: Complex64,
    /// Transform of `h` over `[0, 2T]`.
    pub full: Complex64,
}

impl GapRow {
    /// `|product - restricted|`.
    pub fn gap(&self) -> f64 {
        (self.product - self.restricted).norm()
    }

    pub fn full_error(&self) -> f64 {
        (self.product - self.full).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub tol: f64,
    pub rows: Vec<GapRow>,
}

impl GapReport {
    /// Whether `|product - full| <= tol` at every sample point.
    pub fn full_matches(&self) -> bool {
        self.rows.iter().all(|r| r.full_error() <= self.tol)
    }
}

/// Compare `F(s) G(s)` with the transforms of `f * g` over `[0, T]` and `[0, 2T]`.
pub fn convolution_gap(
    f: &TimeSignal,
    g: &TimeSignal,
    samples: &[Complex64],
    intervals: usize,
    tol: f64,
) -> Result<GapReport> {
    let h = convolve(f, g, intervals)?;
    let ff = flt_of_signal(f);
    let gf = flt_of_signal(g);
    let rows = samples
        .iter()
        .map(|&s| {
            Ok(GapRow {
                s,
                product: ff.eval(s, EXCLUSION_TOL)? * gf.eval(s, EXCLUSION_TOL)?,
                restricted: h.transform(s, intervals / 2),
                full: h.transform(s, intervals),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapReport { tol, rows })
}
