//! Finite Laplace transforms as entire functions of `s`.
//!
//! An [`FltExpr`] is `R0(s) + Σ_j exp(-s d_j) R_j(s)` on a horizon `T`,
//! where each `R` is a rational function and every delay `d_j` is a
//! positive multiple of `T`. The denominators have roots, but for a true
//! transform the numerators vanish there too, so the whole expression is
//! entire. Evaluation near those points and Maclaurin coefficients go
//! through [`series`], which expands the expression locally and cancels
//! the singular orders explicitly.

mod entire;
pub(crate) mod series;
mod text;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{cpoly, Polynomial};
use crate::rational::{same_root, split_poles, RationalFunction};
use crate::signal::{Kind, TimeSignal};

pub use entire::{contour_integral, residue_counterexample, verify_entire, EntireReport, RootCheck};
pub use text::parse_flt;

/// Radius factor of the exclusion disk around each denominator root:
/// inside `|s - r| <= tol * (1 + |r|)` evaluation switches to a local series.
pub const EXCLUSION_TOL: f64 = 1e-6;

/// Number of terms of the local series used inside an exclusion disk.
pub const LOCAL_SERIES_TERMS: usize = 12;

/// Terms of the expansion tried when direct evaluation cancels.
const REFINED_SERIES_TERMS: usize = 30;

/// Direct evaluation is accepted when its rounding estimate is below this
/// fraction of the value.
const DIRECT_ACCURACY: f64 = 1e-13;

/// Relative rounding error of a direct evaluation, applied to the summed
/// magnitude of its terms. Close to a multiple root those terms are large
/// and cancel, so this floor can exceed a requested tolerance.
/// Distance (relative to `1 + |r|`) from a root inside which direct
/// evaluation is checked against the series about it.
const NEAR_ROOT: f64 = 1e-2;

pub(crate) const ROUNDING: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct DelayedTerm {
    pub delay: f64,
    pub factor: RationalFunction,
}

#[derive(Debug, Clone)]
pub struct FltExpr {
    horizon: f64,
    base: RationalFunction,
    delayed: Vec<DelayedTerm>,
    /// Per-term pole form of a transform built from a signal, used for
    /// direct evaluation. Dropped by operations other than sums and scaling.
    poles: Option<Vec<PoleTerm>>,
}

impl PartialEq for FltExpr {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon && self.base == other.base && self.delayed == other.delayed
    }
}

/// `c` times the transform of `t^m e^{at}` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PoleTerm {
    c: Complex64,
    m: usize,
    a: Complex64,
}

impl PoleTerm {
    /// `c [m!/h^{m+1} - e^{(a-s)T} Σ_j (m!/j!) T^j h^{j-m-1}]` with
    /// `h = s - a`, and the summed magnitude of its terms.
    fn eval(&self, s: Complex64, horizon: f64) -> (Complex64, f64) {
        let h = s - self.a;
        let decay = ((self.a - s) * horizon).exp();
        let m_fact: f64 = (1..=self.m).map(|k| k as f64).product();
        let lead = h.inv().powi(self.m as i32 + 1) * m_fact;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut gross = 0.0;
        let mut coef = m_fact;
        let mut power = lead / m_fact;
        for j in 0..=self.m {
            if j > 0 {
                coef *= horizon / j as f64;
                power *= h;
            }
            sum += power * coef;
            gross += power.norm() * coef;
        }
        let value = self.c * (lead - decay * sum);
        let magnitude = self.c.norm() * (lead.norm() + decay.norm() * gross);
        (value, magnitude)
    }
}

/// Maclaurin coefficients `a_0..a_N` of a transform.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoeffs {
    pub coeffs: Vec<f64>,
    pub horizon: f64,
}

impl FltExpr {
    pub fn new(horizon: f64, base: RationalFunction, delayed: Vec<DelayedTerm>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon T must be finite and positive, got {horizon}"
            )));
        }
        let mut expr = FltExpr {
            horizon,
            base,
            delayed: Vec::new(),
            poles: None,
        };
        for term in delayed {
            let multiple = term.delay / horizon;
            if !(term.delay > 0.0 && (multiple - multiple.round()).abs() <= 1e-9 * multiple.max(1.0))
            {
                return Err(Error::InvalidArgument(format!(
                    "delay {} is not a positive multiple of T = {horizon}",
                    term.delay
                )));
            }
            expr.push_delayed(term.delay, term.factor);
        }
        Ok(expr)
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::new(horizon, RationalFunction::zero(), Vec::new())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn base(&self) -> &RationalFunction {
        &self.base
    }

    pub fn delayed(&self) -> &[DelayedTerm] {
        &self.delayed
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.delayed.is_empty()
    }

    fn push_delayed(&mut self, delay: f64, factor: RationalFunction) {
        if let Some(existing) = self
            .delayed
            .iter_mut()
            .find(|t| (t.delay - delay).abs() <= 1e-12 * delay)
        {
            existing.factor = existing.factor.add(&factor);
        } else {
            self.delayed.push(DelayedTerm { delay, factor });
        }
        self.delayed.retain(|t| !t.factor.is_zero());
        self.delayed
            .sort_by(|a, b| a.delay.partial_cmp(&b.delay).expect("finite delays"));
    }

    /// Every factor, with the base at delay zero.
    pub(crate) fn factors(&self) -> impl Iterator<Item = (f64, &RationalFunction)> {
        std::iter::once((0.0, &self.base)).chain(self.delayed.iter().map(|t| (t.delay, &t.factor)))
    }

    fn map_factors(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Self {
        let mut out = FltExpr {
            horizon: self.horizon,
            base: f(&self.base),
            delayed: Vec::new(),
            poles: None,
        };
        for t in &self.delayed {
            out.push_delayed(t.delay, f(&t.factor));
        }
        out
    }

    fn check_horizon(&self, other: &Self) -> Result<()> {
        if (self.horizon - other.horizon).abs() > 1e-12 * self.horizon {
            return Err(Error::InvalidArgument(format!(
                "horizons differ: {} vs {}",
                self.horizon, other.horizon
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_horizon(other)?;
        let mut out = self.clone();
        out.base = out.base.add(&other.base);
        for t in &other.delayed {
            out.push_delayed(t.delay, t.factor.clone());
        }
        out.poles = match (&self.poles, &other.poles) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.map_factors(|r| r.scale(factor));
        out.poles = self
            .poles
            .as_ref()
            .map(|terms| terms.iter().map(|t| PoleTerm { c: t.c * factor, ..*t }).collect());
        out
    }

    /// Multiply every factor by a polynomial in `s`.
    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        self.map_factors(|r| r.mul_poly(p))
    }

    /// Add `p(s)` to the base.
    pub fn add_base_poly(&self, p: &Polynomial) -> Self {
        let mut out = self.clone();
        out.poles = None;
        out.base = out.base.add(&RationalFunction::polynomial(p.clone()));
        out
    }

    /// Add `exp(-s T) p(s)`.
    pub fn add_terminal_poly(&self, p: &Polynomial) -> Self {
        let mut out = self.clone();
        out.poles = None;
        out.push_delayed(self.horizon, RationalFunction::polynomial(p.clone()));
        out
    }

    /// Distinct roots of all denominators.
    pub fn singular_points(&self) -> Vec<Complex64> {
        let mut roots: Vec<Complex64> = Vec::new();
        for (_, f) in self.factors() {
            for &p in f.poles() {
                if !roots.iter().any(|&r| same_root(r, p)) {
                    roots.push(p);
                }
            }
        }
        roots
    }

    /// The expression over a common monic denominator:
    /// `Σ_d exp(-s d) N_d(s) / Π (s - p)`, as the roots `p` and the pairs `(d, N_d)`.
    pub(crate) fn common_form(&self) -> (Vec<Complex64>, Vec<(f64, Vec<Complex64>)>) {
        let mut lcm: Vec<Complex64> = Vec::new();
        for (_, f) in self.factors() {
            let (_, extra) = split_poles(&lcm, f.poles());
            lcm.extend(extra);
        }
        let numerators = self
            .factors()
            .map(|(d, f)| {
                let (missing, _) = split_poles(&lcm, f.poles());
                let lead = f.den().leading();
                let num: Vec<Complex64> = f.num().to_complex().iter().map(|c| c / lead).collect();
                (d, cpoly::mul(&num, &cpoly::from_roots(&missing)))
            })
            .collect();
        (lcm, numerators)
    }

    /// Direct evaluation, with no protection near denominator roots.
    pub(crate) fn eval_direct(&self, s: Complex64) -> Complex64 {
        self.eval_direct_scaled(s, 0.0)
    }

    /// `exp(-shift)` times the direct value.
    pub(crate) fn eval_direct_scaled(&self, s: Complex64, shift: f64) -> Complex64 {
        if let Some(terms) = &self.poles {
            let v: Complex64 = terms.iter().map(|t| t.eval(s, self.horizon).0).sum();
            return v * (-shift).exp();
        }
        self.factors()
            .map(|(d, f)| {
                let rf = f.eval(s);
                if d == 0.0 && shift == 0.0 {
                    rf
                } else {
                    (-s * d - shift).exp() * rf
                }
            })
            .sum()
    }

    /// Summed magnitude of the terms of a direct evaluation.
    pub(crate) fn eval_gross(&self, s: Complex64) -> f64 {
        self.eval_gross_scaled(s, 0.0)
    }

    pub(crate) fn eval_gross_scaled(&self, s: Complex64, shift: f64) -> f64 {
        if let Some(terms) = &self.poles {
            let g: f64 = terms.iter().map(|t| t.eval(s, self.horizon).1).sum();
            return g * (-shift).exp();
        }
        self.factors()
            .map(|(d, f)| (-s * d - shift).exp().norm() * f.num().eval_scale(s) / f.den().eval(s).norm())
            .sum()
    }

    /// Value at any point of the complex plane.
    ///
    /// Within `tol * (1 + |r|)` of a denominator root `r` the value comes
    /// from a [`LOCAL_SERIES_TERMS`]-term expansion about `r`; a root whose
    /// singular part does not cancel is reported as a pole. Further out the
    /// expression is evaluated directly, unless its terms cancel so badly
    /// that a longer expansion about the nearest root is more accurate.
    pub fn eval(&self, s: Complex64, tol: f64) -> Result<Complex64> {
        let roots = self.singular_points();
        for &r in &roots {
            if (s - r).norm() <= tol * (1.0 + r.norm()) {
                let exp = series::expand(self, r, LOCAL_SERIES_TERMS - 1);
                exp.regular()?;
                return Ok(exp.unscale(exp.eval_regular(s - r)));
            }
        }
        let direct = self.eval_direct(s);
        let mut noise = ROUNDING * self.eval_gross(s);
        let nearest = roots
            .into_iter()
            .min_by(|a, b| (s - a).norm().total_cmp(&(s - b).norm()));
        let near = nearest.is_some_and(|r| (s - r).norm() <= NEAR_ROOT * (1.0 + r.norm()));
        if !near && noise <= DIRECT_ACCURACY * direct.norm() {
            return Ok(direct);
        }
        if let Some(r) = nearest {
            let exp = series::expand(self, r, REFINED_SERIES_TERMS - 1);
            if exp.regular().is_ok() {
                let h = s - r;
                if near {
                    // direct evaluation also carries whatever is left of the cancelled poles
                    noise += exp.unscale(Complex64::new(exp.cancelled_singular_bound(h.norm()), 0.0)).re;
                }
                let (value, err) = exp.eval_regular_with_error(h);
                if exp.unscale(Complex64::new(err, 0.0)).re < noise {
                    return Ok(exp.unscale(value));
                }
            }
        }
        Ok(direct)
    }

    /// Maclaurin coefficients `a_0..a_order`.
    pub fn taylor_coeffs(&self, order: usize) -> Result<TaylorCoeffs> {
        let exp = series::expand(self, Complex64::new(0.0, 0.0), order);
        let regular = exp.regular()?;
        Ok(TaylorCoeffs {
            coeffs: regular.iter().map(|c| c.re).collect(),
            horizon: self.horizon,
        })
    }

    /// Transform of `f'` given `f(0)` and `f(T)`: `exp(-sT) f(T) - f(0) + s F(s)`.
    pub fn derivative_rule(&self, f0: f64, f_terminal: f64) -> Self {
        self.nth_derivative_rule(&[f0], &[f_terminal], 1)
            .expect("lengths match by construction")
    }

    /// Transform of the `n`-th derivative:
    /// `s^n F - Σ_k s^k y^(n-k-1)(0) + exp(-sT) Σ_k s^k y^(n-k-1)(T)`.
    ///
    /// `init[j]` and `terminal[j]` hold the `j`-th derivative at `0` and `T`.
    pub fn nth_derivative_rule(&self, init: &[f64], terminal: &[f64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("derivative order must be positive".into()));
        }
        for v in [init, terminal] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let (initial, terminal) = boundary_polys(init, terminal);
        Ok(self
            .mul_poly(&Polynomial::monomial(1.0, n))
            .add_base_poly(&-&initial)
            .add_terminal_poly(&terminal))
    }
}

/// `(Σ_k s^k init[n-k-1], Σ_k s^k terminal[n-k-1])`.
pub(crate) fn boundary_polys(init: &[f64], terminal: &[f64]) -> (Polynomial, Polynomial) {
    let n = init.len();
    let build = |v: &[f64]| Polynomial::new((0..n).map(|k| v[n - k - 1]).collect());
    (build(init), build(terminal))
}

/// Closed-form transform of a signal.
///
/// Each term `A t^m e^{σt} k(ωt)` is the `m`-th derivative with respect to
/// the rate `a = σ + iω` of `(1 - e^{-(s-a)T}) / (s - a)`:
///
/// `m!/(s-a)^{m+1} - e^{-sT} e^{aT} Σ_j (m!/j!) T^j (s-a)^j / (s-a)^{m+1}`,
///
/// projected onto the real or imaginary part for cosine and sine terms.
pub fn flt_of_signal(signal: &TimeSignal) -> FltExpr {
    let horizon = signal.horizon();
    let mut expr = FltExpr::zero(horizon).expect("signal horizon is valid");
    let mut poles = Vec::new();
    for term in signal.terms() {
        let a = term.exponent();
        let m = term.power as usize;
        let amp = Complex64::new(term.amplitude, 0.0);
        match term.kind {
            Kind::Const => poles.push(PoleTerm { c: amp, m, a }),
            // cos = (e^{iωt} + e^{-iωt})/2, sin = (e^{iωt} - e^{-iωt})/(2i)
            Kind::Cos => {
                poles.push(PoleTerm { c: amp * 0.5, m, a });
                poles.push(PoleTerm { c: amp * 0.5, m, a: a.conj() });
            }
            Kind::Sin => {
                let half = amp * Complex64::new(0.0, -0.5);
                poles.push(PoleTerm { c: half, m, a });
                poles.push(PoleTerm { c: -half, m, a: a.conj() });
            }
        }
        let (base, delayed) = term_transform(
            term.amplitude,
            term.power,
            term.exponent(),
            term.kind,
            horizon,
        );
        expr.base = expr.base.add(&base);
        expr.push_delayed(horizon, delayed);
    }
    expr.poles = Some(poles);
    expr
}

fn term_transform(
    amplitude: f64,
    m: u32,
    a: Complex64,
    kind: Kind,
    horizon: f64,
) -> (RationalFunction, RationalFunction) {
    let m = m as usize;
    let m_fact: f64 = (1..=m).map(|k| k as f64).product();
    let base_num = vec![Complex64::new(m_fact, 0.0)];

    // -e^{aT} Σ_j (m!/j!) T^j (s - a)^j
    let shift = [-a, Complex64::new(1.0, 0.0)];
    let mut power = vec![Complex64::new(1.0, 0.0)];
    let mut delayed_num = vec![Complex64::new(0.0, 0.0); m + 1];
    let eat = (a * horizon).exp();
    let mut j_fact = 1.0;
    for j in 0..=m {
        if j > 0 {
            j_fact *= j as f64;
            power = cpoly::mul(&power, &shift);
        }
        let w = -eat * (m_fact / j_fact) * horizon.powi(j as i32);
        for (k, &c) in power.iter().enumerate() {
            delayed_num[k] += w * c;
        }
    }

    if a.im == 0.0 {
        let poles = vec![a; m + 1];
        let real = |p: &[Complex64]| Polynomial::new(p.iter().map(|c| c.re * amplitude).collect());
        return (
            RationalFunction::from_poles_unreduced(real(&base_num), 1.0, poles.clone()),
            RationalFunction::from_poles_unreduced(real(&delayed_num), 1.0, poles),
        );
    }

    // P/(s-a)^{m+1} projected: numerator P(s)(s-ā)^{m+1} over ((s-a)(s-ā))^{m+1}.
    let conj_pow = cpoly::from_roots(&vec![a.conj(); m + 1]);
    let project = |p: &[Complex64]| {
        let w = cpoly::mul(p, &conj_pow);
        Polynomial::new(
            w.iter()
                .map(|c| amplitude * if kind == Kind::Sin { c.im } else { c.re })
                .collect(),
        )
    };
    let mut poles = vec![a; m + 1];
    poles.extend(std::iter::repeat_n(a.conj(), m + 1));
    (
        RationalFunction::from_poles_unreduced(project(&base_num), 1.0, poles.clone()),
        RationalFunction::from_poles_unreduced(project(&delayed_num), 1.0, poles),
    )
}
