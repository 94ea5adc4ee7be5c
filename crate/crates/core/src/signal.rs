//! Exponential-polynomial-trigonometric signals on a finite horizon `[0, T]`.
//!
//! A [`TimeSignal`] is a finite sum of terms `A * t^m * exp(σ t) * k(ω t)`
//! with `k` one of `1`, `cos`, `sin`. This class is closed under every
//! transform pair the crate knows in closed form.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Const,
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub amplitude: f64,
    pub power: u32,
    pub rate: f64,
    pub freq: f64,
    pub kind: Kind,
}

impl Term {
    pub fn new(amplitude: f64, power: u32, rate: f64, freq: f64, kind: Kind) -> Self {
        Term {
            amplitude,
            power,
            rate,
            freq,
            kind,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        match self.kind {
            Kind::Const => self.freq = 0.0,
            Kind::Cos if self.freq == 0.0 => self.kind = Kind::Const,
            Kind::Sin if self.freq == 0.0 => {
                self.kind = Kind::Const;
                self.amplitude = 0.0;
            }
            _ => {}
        }
        self
    }

    /// Complex rate `σ + iω`.
    pub fn exponent(&self) -> Complex64 {
        Complex64::new(self.rate, self.freq)
    }

    /// Project a complex quantity computed for `t^m e^{(σ+iω)t}` onto this
    /// term's real signal: real part for `1`/`cos`, imaginary part for `sin`.
    pub(crate) fn project(&self, z: Complex64) -> f64 {
        match self.kind {
            Kind::Const | Kind::Cos => self.amplitude * z.re,
            Kind::Sin => self.amplitude * z.im,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let envelope = self.amplitude * t.powi(self.power as i32) * (self.rate * t).exp();
        match self.kind {
            Kind::Const => envelope,
            Kind::Cos => envelope * (self.freq * t).cos(),
            Kind::Sin => envelope * (self.freq * t).sin(),
        }
    }
}

/// Largest accepted `|rate| * T`.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    terms: Vec<Term>,
    horizon: f64,
}

impl TimeSignal {
    pub fn new(terms: Vec<Term>, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon T must be finite and positive, got {horizon}"
            )));
        }
        let terms: Vec<Term> = terms
            .into_iter()
            .map(Term::normalized)
            .filter(|t| t.amplitude != 0.0)
            .collect();
        if let Some(t) = terms.iter().find(|t| (t.rate * horizon).abs() > MAX_EXPONENT) {
            return Err(Error::InvalidArgument(format!(
                "|rate * T| = {} exceeds {MAX_EXPONENT}; exp(rate * T) is out of double range",
                (t.rate * horizon).abs()
            )));
        }
        Ok(TimeSignal { terms, horizon })
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), horizon)
    }

    /// Unit step: `1` on `[0, T]`.
    pub fn step(horizon: f64) -> Result<Self> {
        Self::new(vec![Term::new(1.0, 0, 0.0, 0.0, Kind::Const)], horizon)
    }

    pub fn exponential(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![Term::new(1.0, 0, rate, 0.0, Kind::Const)], horizon)
    }

    pub fn sine(freq: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![Term::new(1.0, 0, 0.0, freq, Kind::Sin)], horizon)
    }

    pub fn cosine(freq: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![Term::new(1.0, 0, 0.0, freq, Kind::Cos)], horizon)
    }

    /// `Σ c_k t^k` from ascending coefficients.
    pub fn polynomial(coeffs: &[f64], horizon: f64) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| Term::new(c, k as u32, 0.0, 0.0, Kind::Const))
                .collect(),
            horizon,
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.terms.clone(), horizon)
    }

    pub fn scale(&self, factor: f64) -> Self {
        TimeSignal {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    amplitude: t.amplitude * factor,
                    ..*t
                })
                .filter(|t| t.amplitude != 0.0)
                .collect(),
            horizon: self.horizon,
        }
    }

    /// Sum of two signals on the same horizon.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.horizon != other.horizon {
            return Err(Error::InvalidArgument(format!(
                "horizons differ: {} vs {}",
                self.horizon, other.horizon
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::new(terms, self.horizon)
    }

    /// Value at `t`; signals are defined only on `[0, T]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.horizon;
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::Domain {
                t,
                horizon: self.horizon,
            });
        }
        Ok(self.value(t.clamp(0.0, self.horizon)))
    }

    /// Value of the closed-form expression without the domain check.
    pub(crate) fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.value(t)).sum()
    }

    /// `∫₀ᵀ tⁿ f(t) dt` in closed form.
    pub fn moment(&self, n: u32) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let j = power_exp_integral(n + term.power, term.exponent(), self.horizon);
                term.project(j)
            })
            .sum()
    }
}

/// `∫₀ᵀ t^k e^{a t} dt` for complex `a`.
///
/// Uses the forward recurrence `J_k = (T^k e^{aT} - k J_{k-1}) / a` when
/// `|a| T >= k`, where it is stable, and otherwise runs the backward
/// recurrence `J_{j-1} = (T^j e^{aT} - a J_j) / j` down from a high start
/// index, where it is stable.
pub(crate) fn power_exp_integral(k: u32, a: Complex64, horizon: f64) -> Complex64 {
    let t = horizon;
    let at = a * t;
    let eat = at.exp();
    if a.norm() == 0.0 {
        return Complex64::new(t.powi(k as i32 + 1) / (k as f64 + 1.0), 0.0);
    }
    if at.norm() >= k as f64 {
        let mut j = exprel(at) * t;
        let mut tk = 1.0;
        for i in 1..=k {
            tk *= t;
            j = (eat * tk - j * i as f64) / a;
        }
        return j;
    }
    let top = k + 40 + 2 * at.norm().ceil() as u32;
    let mut j = eat * t.powi(top as i32 + 1) / (top as f64 + 1.0);
    for i in (k + 1..=top).rev() {
        j = (eat * t.powi(i as i32) - a * j) / i as f64;
    }
    j
}

/// `(e^z - 1) / z`, accurate near zero.
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for i in 2..30 {
            term *= z / i as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

impl fmt::Display for TimeSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            let amp = if i == 0 {
                term.amplitude
            } else {
                if term.amplitude < 0.0 {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                term.amplitude.abs()
            };
            if amp != 1.0 || (term.power == 0 && term.rate == 0.0 && term.kind == Kind::Const) {
                factors.push(format!("{amp}"));
            }
            if term.power == 1 {
                factors.push("t".into());
            } else if term.power > 1 {
                factors.push(format!("t^{}", term.power));
            }
            if term.rate != 0.0 {
                factors.push(format!("exp({} t)", term.rate));
            }
            match term.kind {
                Kind::Const => {}
                Kind::Cos => factors.push(format!("cos({} t)", term.freq)),
                Kind::Sin => factors.push(format!("sin({} t)", term.freq)),
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

/// Parse the textual signal form on horizon `T`.
pub fn parse_signal(src: &str, horizon: f64) -> Result<TimeSignal> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::parse(0, "empty signal expression"));
    }
    let mut cur = Cursor::new(toks, src.len());
    let mut terms = Vec::new();
    let mut sign = if cur.eat('-') {
        -1.0
    } else {
        cur.eat('+');
        1.0
    };
    loop {
        let mut term = parse_term(&mut cur)?;
        term.amplitude *= sign;
        terms.push(term);
        if cur.eat('+') {
            sign = 1.0;
        } else if cur.eat('-') {
            sign = -1.0;
        } else {
            break;
        }
    }
    if cur.peek().is_some() {
        return Err(Error::parse(cur.offset(), "unexpected trailing input"));
    }
    TimeSignal::new(terms, horizon)
}

fn parse_term(cur: &mut Cursor) -> Result<Term> {
    let mut term = Term {
        amplitude: 1.0,
        power: 0,
        rate: 0.0,
        freq: 0.0,
        kind: Kind::Const,
    };
    let mut seen_factor = false;
    loop {
        let at = cur.offset();
        match cur.peek().cloned() {
            Some(Tok::Num(v)) => {
                cur.next();
                term.amplitude *= v;
            }
            Some(Tok::Ident(name)) => {
                cur.next();
                match name.as_str() {
                    "pi" => term.amplitude *= std::f64::consts::PI,
                    "t" => {
                        let mut p = 1;
                        if cur.eat('^') {
                            match cur.next() {
                                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => p = v as u32,
                                _ => {
                                    return Err(Error::parse(
                                        cur.offset(),
                                        "exponent of t must be a nonnegative integer",
                                    ))
                                }
                            }
                        }
                        term.power += p;
                    }
                    "exp" | "cos" | "sin" => {
                        cur.expect('(')?;
                        let (coef, has_t) = parse_linear(cur)?;
                        cur.expect(')')?;
                        match (name.as_str(), has_t) {
                            ("exp", true) => term.rate += coef,
                            ("exp", false) => term.amplitude *= coef.exp(),
                            (_, false) => {
                                term.amplitude *= if name == "cos" { coef.cos() } else { coef.sin() }
                            }
                            (_, true) => {
                                if term.kind != Kind::Const {
                                    return Err(Error::parse(
                                        at,
                                        "at most one cos/sin factor per term",
                                    ));
                                }
                                term.kind = if name == "cos" { Kind::Cos } else { Kind::Sin };
                                term.freq = coef;
                            }
                        }
                    }
                    other => return Err(Error::parse(at, format!("unknown name `{other}`"))),
                }
            }
            _ => {
                if !seen_factor {
                    return Err(Error::parse(at, "expected a term"));
                }
                return Ok(term);
            }
        }
        seen_factor = true;
        cur.eat('*');
    }
}

/// `[±] c1 [*] c2 ... [*] [t]`: returns the coefficient and whether `t` appeared.
fn parse_linear(cur: &mut Cursor) -> Result<(f64, bool)> {
    let mut coef = if cur.eat('-') { -1.0 } else { 1.0 };
    cur.eat('+');
    let mut has_t = false;
    let mut any = false;
    loop {
        match cur.peek().cloned() {
            Some(Tok::Num(v)) => coef *= v,
            Some(Tok::Ident(ref n)) if n == "pi" => coef *= std::f64::consts::PI,
            Some(Tok::Ident(ref n)) if n == "t" && !has_t => has_t = true,
            _ => break,
        }
        cur.next();
        any = true;
        cur.eat('*');
    }
    if !any {
        return Err(Error::parse(cur.offset(), "expected an argument like `6 t`"));
    }
    Ok((coef, has_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive_simpson_real, DEFAULT_ABS_TOL};

    #[test]
    fn eval_examples() {
        let step = TimeSignal::step(2.0).unwrap();
        assert_eq!(step.eval(1.0).unwrap(), 1.0);
        assert_eq!(TimeSignal::exponential(6.0, 1.0).unwrap().eval(0.0).unwrap(), 1.0);
        let s = TimeSignal::sine(std::f64::consts::PI, 1.0).unwrap();
        assert!((s.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_outside_horizon_is_domain_error() {
        let step = TimeSignal::step(1.0).unwrap();
        assert!(matches!(step.eval(1.5), Err(Error::Domain { .. })));
        assert!(matches!(step.eval(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn horizon_and_rate_are_validated() {
        assert!(TimeSignal::step(0.0).is_err());
        assert!(TimeSignal::step(-1.0).is_err());
        assert!(TimeSignal::step(f64::INFINITY).is_err());
        assert!(TimeSignal::exponential(-20000.0, 0.1).is_err());
        assert!(TimeSignal::exponential(6000.0, 0.1).is_ok());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(TimeSignal::step(1.0).unwrap().moment(0), 1.0);
        let e6 = TimeSignal::exponential(6.0, 1.0).unwrap().moment(0);
        let oracle = adaptive_simpson_real(|t| (6.0 * t).exp(), 0.0, 1.0, DEFAULT_ABS_TOL);
        assert!((e6 - oracle).abs() < 1e-10 * oracle);
        assert!((e6 - 67.071_465_582_122_52).abs() < 1e-9);
        assert!((TimeSignal::step(2.0).unwrap().moment(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn power_exp_integral_both_regimes() {
        // ∫₀¹ t^3 e^{-t} dt = 6 - 16/e
        let j = power_exp_integral(3, Complex64::new(-1.0, 0.0), 1.0);
        assert!((j.re - (6.0 - 16.0 / std::f64::consts::E)).abs() < 1e-14);
        // small |a| with high power: backward branch
        let j = power_exp_integral(12, Complex64::new(1e-3, 0.0), 1.0);
        let oracle = adaptive_simpson_real(|t| t.powi(12) * (1e-3 * t).exp(), 0.0, 1.0, 1e-15);
        assert!(((j.re - oracle) / oracle).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        let s = parse_signal("exp(6 t)", 1.0).unwrap();
        assert_eq!(s.terms(), &[Term::new(1.0, 0, 6.0, 0.0, Kind::Const)]);
        let s = parse_signal("2 * t^2 * exp(-1.5 t) * sin(3 t) - 1", 2.0).unwrap();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.terms()[0], Term::new(2.0, 2, -1.5, 3.0, Kind::Sin));
        assert_eq!(s.terms()[1].amplitude, -1.0);
        let back = parse_signal(&s.to_string(), 2.0).unwrap();
        assert_eq!(back, s);
        let s = parse_signal("sin(3.5 t)", 1.0).unwrap();
        assert_eq!(s.terms()[0].freq, 3.5);
        assert_eq!(parse_signal("sin(pi*t)", 1.0).unwrap().terms()[0].freq, std::f64::consts::PI);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_signal("", 1.0), Err(Error::Parse { .. })));
        assert!(matches!(parse_signal("exp(6 t", 1.0), Err(Error::Parse { .. })));
        assert!(matches!(parse_signal("cos(t) * sin(t)", 1.0), Err(Error::Parse { .. })));
        assert!(matches!(parse_signal("foo(t)", 1.0), Err(Error::Parse { .. })));
        assert!(matches!(parse_signal("t^-1", 1.0), Err(Error::Parse { .. })));
        assert!(matches!(parse_signal("1 +", 1.0), Err(Error::Parse { .. })));
    }
}
