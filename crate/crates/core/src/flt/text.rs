//! Text forms of transform expressions.
//!
//! `Display` writes the bracket form `[n]/[d] + exp(-s*1.0)*([n]/[d])`, which
//! [`parse_flt`] reads back exactly. [`FltExpr::pretty`] writes a
//! human-oriented form over the common denominator, such as
//! `(1 - exp(-s))/s`. The parser accepts a general quasi-polynomial grammar
//! in `s`, so both forms parse.

use std::fmt;

use super::{DelayedTerm, FltExpr};
use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};
use crate::poly::Polynomial;
use crate::rational::RationalFunction;

impl fmt::Display for FltExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for t in &self.delayed {
            write!(f, " + exp(-s*{:?})*({})", t.delay, t.factor)?;
        }
        Ok(())
    }
}

impl FltExpr {
    /// Common-denominator form, e.g. `(1 - exp(-s))/s`.
    pub fn pretty(&self) -> String {
        let (lcm, numerators) = self.common_form();
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (d, num) in numerators {
            let num = Polynomial::new(num.iter().map(|c| c.re).collect());
            if !num.is_zero() {
                parts.extend(delayed_poly_text(d, &num));
            }
        }
        let numerator = match parts.len() {
            0 => "0".to_string(),
            1 => join_signed(&parts),
            _ => format!("({})", join_signed(&parts)),
        };
        if lcm.is_empty() {
            return numerator;
        }
        let den = poly_text(&Polynomial::from_roots(&lcm, 1.0));
        let den = if den.contains(['+', '-']) {
            format!("({den})")
        } else {
            den
        };
        format!("{numerator}/{den}")
    }
}

fn num_text(v: f64) -> String {
    format!("{v}")
}

fn delay_text(d: f64) -> String {
    if d == 1.0 {
        "exp(-s)".to_string()
    } else {
        format!("exp(-s*{})", num_text(d))
    }
}

/// Signed monomials of `p`, dropping coefficients at rounding level.
fn monomials(p: &Polynomial) -> Vec<(bool, f64, usize)> {
    let cut = 1e-14 * p.max_abs();
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > cut)
        .map(|(k, &c)| (c < 0.0, c.abs(), k))
        .collect()
}

fn monomial_text(c: f64, k: usize) -> String {
    let power = match k {
        0 => String::new(),
        1 => "s".to_string(),
        _ => format!("s^{k}"),
    };
    match (c == 1.0, k) {
        (_, 0) => num_text(c),
        (true, _) => power,
        (false, _) => format!("{}*{power}", num_text(c)),
    }
}

fn join_signed(parts: &[(bool, String)]) -> String {
    let mut out = String::new();
    for (i, (neg, text)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(text);
    }
    out
}

fn poly_text(p: &Polynomial) -> String {
    let parts: Vec<(bool, String)> = monomials(p)
        .into_iter()
        .map(|(neg, c, k)| (neg, monomial_text(c, k)))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        join_signed(&parts)
    }
}

fn delayed_poly_text(d: f64, p: &Polynomial) -> Vec<(bool, String)> {
    let terms = monomials(p);
    if d == 0.0 {
        return terms
            .into_iter()
            .map(|(neg, c, k)| (neg, monomial_text(c, k)))
            .collect();
    }
    let e = delay_text(d);
    match terms.as_slice() {
        [] => Vec::new(),
        [(neg, c, k)] => {
            let text = if *c == 1.0 && *k == 0 {
                e
            } else {
                format!("{}*{e}", monomial_text(*c, *k))
            };
            vec![(*neg, text)]
        }
        _ => vec![(false, format!("{e}*({})", poly_text(p)))],
    }
}

/// Sum of `exp(-s d) R(s)` pieces, kept sorted by delay.
#[derive(Debug, Clone)]
struct Quasi(Vec<(f64, RationalFunction)>);

impl Quasi {
    fn rational(r: RationalFunction) -> Self {
        Quasi(vec![(0.0, r)])
    }

    fn constant(c: f64) -> Self {
        Self::rational(RationalFunction::constant(c))
    }

    fn add(mut self, other: Quasi) -> Self {
        for (d, r) in other.0 {
            match self.0.iter_mut().find(|(e, _)| *e == d) {
                Some((_, existing)) => *existing = existing.add(&r),
                None => self.0.push((d, r)),
            }
        }
        self.0.retain(|(d, r)| *d == 0.0 || !r.is_zero());
        self.0.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite delays"));
        self
    }

    fn scale(self, c: f64) -> Self {
        Quasi(self.0.into_iter().map(|(d, r)| (d, r.scale(c))).collect())
    }

    fn mul(&self, other: &Quasi) -> Self {
        let mut out = Quasi::constant(0.0);
        for (d1, r1) in &self.0 {
            for (d2, r2) in &other.0 {
                out = out.add(Quasi(vec![(d1 + d2, r1.mul(r2))]));
            }
        }
        out
    }

    /// The rational part when no delayed piece is present.
    fn base_only(&self) -> Option<&RationalFunction> {
        match self.0.as_slice() {
            [(d, r)] if *d == 0.0 => Some(r),
            [] => None,
            _ => None,
        }
    }

    fn recip(&self, at: usize) -> Result<Self> {
        let r = self
            .base_only()
            .ok_or_else(|| Error::parse(at, "can only divide by a rational function of s"))?;
        if r.is_zero() {
            return Err(Error::parse(at, "division by zero"));
        }
        let inv = RationalFunction::new(r.den().clone(), r.num().clone())
            .map_err(|e| Error::parse(at, e.to_string()))?;
        Ok(Quasi::rational(inv))
    }
}

/// Parse an expression in `s` with delays that are multiples of `horizon`.
///
/// Accepts numbers, `s`, `pi`, ascending coefficient lists `[c0, c1, ..]`,
/// `exp(c0 + c1*s)` with `c1 <= 0`, parentheses, `+ - * /` and integer
/// powers `^`. Division is only by rational functions of `s`.
pub fn parse_flt(src: &str, horizon: f64) -> Result<FltExpr> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::parse(0, "empty expression"));
    }
    let mut cur = Cursor::new(toks, src.len());
    let q = parse_sum(&mut cur)?;
    if cur.peek().is_some() {
        return Err(Error::parse(cur.offset(), "unexpected trailing input"));
    }
    let mut base = RationalFunction::zero();
    let mut delayed = Vec::new();
    for (d, r) in q.0 {
        if d == 0.0 {
            base = r;
        } else {
            delayed.push(DelayedTerm { delay: d, factor: r });
        }
    }
    FltExpr::new(horizon, base, delayed)
}

fn parse_sum(cur: &mut Cursor) -> Result<Quasi> {
    let mut acc = if cur.eat('-') {
        parse_product(cur)?.scale(-1.0)
    } else {
        cur.eat('+');
        parse_product(cur)?
    };
    loop {
        if cur.eat('+') {
            acc = acc.add(parse_product(cur)?);
        } else if cur.eat('-') {
            acc = acc.add(parse_product(cur)?.scale(-1.0));
        } else {
            return Ok(acc);
        }
    }
}

fn parse_product(cur: &mut Cursor) -> Result<Quasi> {
    let mut acc = parse_power(cur)?;
    loop {
        if cur.eat('*') {
            acc = acc.mul(&parse_power(cur)?);
        } else if cur.peek() == Some(&Tok::Sym('/')) {
            cur.next();
            let at = cur.offset();
            let divisor = parse_power(cur)?;
            acc = acc.mul(&divisor.recip(at)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_power(cur: &mut Cursor) -> Result<Quasi> {
    let at = cur.offset();
    let base = parse_atom(cur)?;
    if !cur.eat('^') {
        return Ok(base);
    }
    let negative = cur.eat('-');
    let exp_at = cur.offset();
    let n = match cur.next() {
        Some(Tok::Num(v)) if v.fract() == 0.0 && v <= 64.0 => v as u32,
        _ => return Err(Error::parse(exp_at, "exponent must be an integer")),
    };
    let base = if negative { base.recip(at)? } else { base };
    let mut out = Quasi::constant(1.0);
    for _ in 0..n {
        out = out.mul(&base);
    }
    Ok(out)
}

fn parse_atom(cur: &mut Cursor) -> Result<Quasi> {
    let at = cur.offset();
    match cur.next() {
        Some(Tok::Num(v)) => Ok(Quasi::constant(v)),
        Some(Tok::Sym('-')) => Ok(parse_power(cur)?.scale(-1.0)),
        Some(Tok::Sym('(')) => {
            let q = parse_sum(cur)?;
            cur.expect(')')?;
            Ok(q)
        }
        Some(Tok::Sym('[')) => {
            let mut coeffs = Vec::new();
            if !cur.eat(']') {
                loop {
                    let neg = cur.eat('-');
                    let num_at = cur.offset();
                    match cur.next() {
                        Some(Tok::Num(v)) => coeffs.push(if neg { -v } else { v }),
                        _ => return Err(Error::parse(num_at, "expected a number")),
                    }
                    if cur.eat(']') {
                        break;
                    }
                    cur.expect(',')?;
                }
            }
            Ok(Quasi::rational(RationalFunction::polynomial(Polynomial::new(coeffs))))
        }
        Some(Tok::Ident(name)) => match name.as_str() {
            "s" => Ok(Quasi::rational(RationalFunction::polynomial(Polynomial::monomial(1.0, 1)))),
            "pi" => Ok(Quasi::constant(std::f64::consts::PI)),
            "exp" => {
                cur.expect('(')?;
                let arg_at = cur.offset();
                let arg = parse_sum(cur)?;
                cur.expect(')')?;
                exp_of(&arg, arg_at)
            }
            other => Err(Error::parse(at, format!("unknown name `{other}`"))),
        },
        Some(Tok::Sym(c)) => Err(Error::parse(at, format!("unexpected `{c}`"))),
        None => Err(Error::parse(at, "unexpected end of input")),
    }
}

/// `exp(c0 + c1 s)` as a constant times a delay of `-c1`.
fn exp_of(arg: &Quasi, at: usize) -> Result<Quasi> {
    let linear = arg
        .base_only()
        .filter(|r| r.den().degree() == 0 && r.num().degree() <= 1)
        .ok_or_else(|| Error::parse(at, "exp argument must be linear in s"))?;
    let lead = linear.den().leading();
    let c = linear.num().coeffs();
    let c0 = c[0] / lead;
    let c1 = c.get(1).copied().unwrap_or(0.0) / lead;
    if c1 > 0.0 {
        return Err(Error::parse(at, "exp argument must have a nonpositive coefficient of s"));
    }
    Ok(Quasi(vec![(-c1, RationalFunction::constant(c0.exp()))]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flt::{flt_of_signal, EXCLUSION_TOL};
    use crate::{Complex64, TimeSignal};

    #[test]
    fn pretty_step() {
        let f = flt_of_signal(&TimeSignal::step(1.0).unwrap());
        assert_eq!(f.pretty(), "(1 - exp(-s))/s");
        let f = flt_of_signal(&TimeSignal::exponential(6.0, 0.5).unwrap());
        assert!(f.pretty().ends_with("/(-6 + s)"), "{}", f.pretty());
    }

    #[test]
    fn bracket_form_round_trips() {
        for src in ["1", "exp(6 t)", "sin(3.14159 t)", "2 t^2 exp(-t) cos(3 t) - 0.5"] {
            let f = flt_of_signal(&crate::parse_signal(src, 1.5).unwrap());
            let text = f.to_string();
            let back = parse_flt(&text, 1.5).unwrap();
            assert_eq!(back, f, "{text}");
        }
    }

    #[test]
    fn pretty_form_parses_to_same_values() {
        let f = flt_of_signal(&crate::parse_signal("t exp(2 t) + sin(2 t)", 1.0).unwrap());
        let back = parse_flt(&f.pretty(), 1.0).unwrap();
        for s in [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 3.0)] {
            let a = f.eval(s, EXCLUSION_TOL).unwrap();
            let b = back.eval(s, EXCLUSION_TOL).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm());
        }
    }

    #[test]
    fn grammar() {
        let f = parse_flt("(1 - exp(-s))^2/s^2", 1.0).unwrap();
        assert_eq!(f.delayed().len(), 2);
        assert_eq!(f.delayed()[1].delay, 2.0);
        let v = f.eval(Complex64::new(0.0, 0.0), EXCLUSION_TOL).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);

        let g = parse_flt("exp(2 - 0.5*s) * [1, 1]", 0.5).unwrap();
        assert_eq!(g.delayed()[0].factor.num().coeffs()[0], 2f64.exp());
    }

    #[test]
    fn parse_errors() {
        for src in ["", "exp(s)", "1/(exp(-s))", "s^0.5", "[1, ]", "q", "(1 + s"] {
            assert!(
                matches!(parse_flt(src, 1.0), Err(Error::Parse { .. })),
                "{src}"
            );
        }
        assert!(matches!(
            parse_flt("exp(-0.3*s)", 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
