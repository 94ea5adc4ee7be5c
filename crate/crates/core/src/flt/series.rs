//! Local Laurent expansion of an [`FltExpr`] about a point.
//!
//! The expression is first written over the common denominator
//! `Π (s - p)` of all its factors as `G(s) / Π (s - p)` with the
//! quasi-polynomial numerator `G(s) = Σ_d exp(-s d) N_d(s)`. `G` is expanded
//! in `h = s - z0`, then each denominator root is removed:
//!
//! * roots at the centre contribute a power of `h` and make up the singular
//!   orders,
//! * nearby roots are divided out exactly by synthetic division from the
//!   top (the remainder is `G(p)`, which must vanish),
//! * distant roots multiply by the power series of `1 / (h - δ)`.
//!
//! Alongside the coefficients a "gross" series of absolute values is carried
//! through every step. It bounds the magnitude of the terms that were summed
//! into each coefficient and decides when a coefficient is rounding noise.

use std::f64::consts::E;

use num_complex::Complex64;

use super::FltExpr;
use crate::error::{Error, Result};
use crate::poly::cpoly;

/// A root is at the centre when `|p - z0| <= AT_CENTER_TOL * (1 + |p|)`.
const AT_CENTER_TOL: f64 = 1e-9;

/// Relative size below which a coefficient counts as cancelled.
const NEGLIGIBLE: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Exponent above which `exp(-center d)` is factored out of a series.
const OVERFLOW_GUARD: f64 = 500.0;

/// Exponent `σ` taken out as a common factor `exp(σ)` of the terms
/// `exp(-s d)` near `center`; zero unless one of them would overflow.
pub(crate) fn exp_shift(delays: impl IntoIterator<Item = f64>, center: Complex64) -> f64 {
    let m = delays.into_iter().map(|d| -center.re * d).fold(0.0, f64::max);
    if m > OVERFLOW_GUARD {
        m
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Expansion {
    pub center: Complex64,
    /// Number of singular orders (roots at the centre, with multiplicity).
    pub singular_orders: usize,
    order: usize,
    coeffs: Vec<Complex64>,
    gross: Vec<f64>,
    /// The true coefficients are `coeffs` times `exp(log_scale)`.
    pub log_scale: f64,
}

impl Expansion {
    fn negligible(&self, idx: usize) -> bool {
        let a0 = self.coeffs.get(self.singular_orders).map_or(0.0, |c| c.norm());
        self.coeffs[idx].norm() <= NEGLIGIBLE * self.gross[idx].max(a0)
    }

    /// Regular coefficients `c_0..c_order` of the expansion in `h`.
    ///
    /// Fails with [`Error::PoleDetected`] when a singular coefficient does
    /// not cancel.
    pub fn regular(&self) -> Result<Vec<Complex64>> {
        if (0..self.singular_orders).any(|i| !self.negligible(i)) {
            return Err(Error::PoleDetected { at: self.center });
        }
        let v = self.singular_orders;
        Ok(self.coeffs[v..v + self.order + 1].to_vec())
    }

    /// Singular coefficients `c_{-1}, c_{-2}, ..`, with cancelled ones set to zero.
    pub fn singular(&self) -> Vec<Complex64> {
        let v = self.singular_orders;
        (1..=v)
            .map(|j| {
                if self.negligible(v - j) {
                    ZERO
                } else {
                    self.coeffs[v - j]
                }
            })
            .collect()
    }

    /// Bound at distance `r` on the singular terms judged to cancel: each is
    /// only known to be below the negligibility threshold.
    pub fn cancelled_singular_bound(&self, r: f64) -> f64 {
        let v = self.singular_orders;
        let a0 = self.coeffs.get(v).map_or(0.0, |c| c.norm());
        (1..=v)
            .filter(|&j| self.negligible(v - j))
            .map(|j| NEGLIGIBLE * self.gross[v - j].max(a0) / r.powi(j as i32))
            .sum()
    }

    /// Regular part at `h` with an error estimate: the last two terms as
    /// truncation plus rounding on the gross series.
    pub fn eval_regular_with_error(&self, h: Complex64) -> (Complex64, f64) {
        let v = self.singular_orders;
        let r = h.norm();
        let mut rounding = 0.0;
        let mut power = 1.0;
        for g in &self.gross[v..v + self.order + 1] {
            rounding += g * power;
            power *= r;
        }
        let tail: f64 = (self.order.saturating_sub(1)..=self.order)
            .map(|k| self.coeffs[v + k].norm() * r.powi(k as i32))
            .sum();
        (self.eval_regular(h), tail + super::ROUNDING * rounding)
    }

    /// Undo the common factor taken out of the coefficients.
    pub fn unscale(&self, v: Complex64) -> Complex64 {
        if self.log_scale == 0.0 {
            v
        } else {
            v * self.log_scale.exp()
        }
    }

    /// Regular part evaluated at `h`, before [`Expansion::unscale`].
    pub fn eval_regular(&self, h: Complex64) -> Complex64 {
        let v = self.singular_orders;
        self.coeffs[v..v + self.order + 1]
            .iter()
            .rev()
            .fold(ZERO, |acc, &c| acc * h + c)
    }
}

/// Expand `expr` about `center`, keeping regular terms up to `h^order`.
pub(crate) fn expand(expr: &FltExpr, center: Complex64, order: usize) -> Expansion {
    let (lcm, numerators) = expr.common_form();

    let d_max = numerators.iter().map(|(d, _)| *d).fold(0.0, f64::max);
    let half_order = (order + 1) as f64 / 2.0;
    let mut singular_orders = 0;
    let mut near = Vec::new();
    let mut far = Vec::new();
    for &p in &lcm {
        let delta = p - center;
        if delta.norm() <= AT_CENTER_TOL * (1.0 + p.norm()) {
            singular_orders += 1;
        } else if d_max == 0.0 || delta.norm() * d_max <= half_order {
            near.push(delta);
        } else {
            far.push(delta);
        }
    }
    let x_max = near.iter().map(|d| d.norm() * d_max).fold(0.0, f64::max);
    let deg = numerators.iter().map(|(_, n)| n.len()).max().unwrap_or(1) - 1;
    let len = order + singular_orders + near.len() + deg + 4 + (2.0 * E * x_max).ceil() as usize + 20;

    let log_scale = exp_shift(numerators.iter().map(|(d, _)| *d), center);
    let (mut g, mut gross) = numerator_series(&numerators, center, len, log_scale);

    for delta in near {
        let n = g.len();
        let mut q = vec![ZERO; n - 1];
        let mut gq = vec![0.0; n - 1];
        q[n - 2] = g[n - 1];
        gq[n - 2] = gross[n - 1];
        for k in (1..n - 1).rev() {
            q[k - 1] = g[k] + delta * q[k];
            gq[k - 1] = gross[k] + delta.norm() * gq[k];
        }
        let remainder = g[0] + delta * q[0];
        let gross_remainder = gross[0] + delta.norm() * gq[0];
        if remainder.norm() <= NEGLIGIBLE * gross_remainder {
            g = q;
            gross = gq;
        } else {
            far.push(delta);
        }
    }

    for delta in far {
        let n = g.len();
        // 1/(h - δ) = -Σ h^k / δ^{k+1}
        let inv_delta = delta.inv();
        let mut inv = Vec::with_capacity(n);
        let mut term = -inv_delta;
        for _ in 0..n {
            inv.push(term);
            term *= inv_delta;
        }
        let mut next = vec![ZERO; n];
        let mut next_gross = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                next[i + j] += g[i] * inv[j];
                next_gross[i + j] += gross[i] * inv[j].norm();
            }
        }
        g = next;
        gross = next_gross;
    }

    Expansion {
        center,
        singular_orders,
        order,
        coeffs: g,
        gross,
        log_scale,
    }
}

/// Series of `exp(-shift) Σ_d exp(-s d) N_d(s)` in `h = s - center`,
/// truncated to `len` terms, with the matching gross series.
pub(crate) fn numerator_series(
    numerators: &[(f64, Vec<Complex64>)],
    center: Complex64,
    len: usize,
    shift: f64,
) -> (Vec<Complex64>, Vec<f64>) {
    let mut g = vec![ZERO; len];
    let mut gross = vec![0.0; len];
    for (d, num) in numerators {
        let shifted = cpoly::taylor_shift(num, center);
        let abs_num: Vec<Complex64> = num.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect();
        let shifted_gross: Vec<f64> = cpoly::taylor_shift(&abs_num, Complex64::new(center.norm(), 0.0))
            .iter()
            .map(|c| c.re)
            .collect();
        // exp(-d (center + h)) = exp(-d center) Σ (-d h)^n / n!
        let mut e = Vec::with_capacity(len);
        let mut term = (-center * d - shift).exp();
        for n in 0..len {
            e.push(term);
            term *= -d / (n + 1) as f64;
        }
        for (j, (&c, &cg)) in shifted.iter().zip(&shifted_gross).enumerate().take(len) {
            for n in 0..len - j {
                g[j + n] += c * e[n];
                gross[j + n] += cg * e[n].norm();
            }
        }
    }
    (g, gross)
}
