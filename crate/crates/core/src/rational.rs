//! Reduced real rational functions with a cached pole list.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Two roots are the same root when `|r1 - r2| <= ROOT_MATCH_TOL * (1 + |r1|)`.
pub const ROOT_MATCH_TOL: f64 = 1e-9;

/// A numerator vanishes at a pole when `|num(r)|` is below this fraction of
/// the magnitude of the terms summed to evaluate it.
const CANCEL_TOL: f64 = 1e-12;

pub(crate) fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ROOT_MATCH_TOL * (1.0 + a.norm())
}

#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    poles: Vec<Complex64>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl RationalFunction {
    /// `num / den`, reduced. Fails when `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument(
                "rational function with zero denominator".into(),
            ));
        }
        let poles = if den.degree() == 0 {
            Vec::new()
        } else {
            den.roots()?
        };
        Ok(RationalFunction { num, den, poles }.reduced())
    }

    /// `num / (lead * prod (s - p))`. Complex poles must come in conjugate pairs.
    pub fn from_poles(num: Polynomial, lead: f64, poles: Vec<Complex64>) -> Self {
        assert!(lead != 0.0, "zero leading coefficient");
        let den = Polynomial::from_roots(&poles, lead);
        RationalFunction { num, den, poles }.reduced()
    }

    /// Like [`from_poles`](Self::from_poles) but without cancelling common
    /// roots, for callers that know the numerator is nonzero at every pole.
    pub(crate) fn from_poles_unreduced(num: Polynomial, lead: f64, poles: Vec<Complex64>) -> Self {
        let den = Polynomial::from_roots(&poles, lead);
        RationalFunction { num, den, poles }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::constant(1.0),
            poles: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Roots of the denominator, with multiplicity.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn scale(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(factor),
            den: self.den.clone(),
            poles: self.poles.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        RationalFunction {
            num: &self.num * p,
            den: self.den.clone(),
            poles: self.poles.clone(),
        }
        .reduced()
    }

    pub fn div_poly(&self, p: &Polynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidArgument("division by zero polynomial".into()));
        }
        let mut poles = self.poles.clone();
        if p.degree() > 0 {
            poles.extend(p.roots()?);
        }
        Ok(RationalFunction {
            num: self.num.clone(),
            den: &self.den * p,
            poles,
        }
        .reduced())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        RationalFunction {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
            poles,
        }
        .reduced()
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return RationalFunction {
                num: &self.num + &other.num,
                den: self.den.clone(),
                poles: self.poles.clone(),
            }
            .reduced();
        }
        // a pole of only one summand survives in the sum
        let shared = shared_poles(&self.poles, &other.poles);
        let (unmatched_self, extra_other) = split_poles(&self.poles, &other.poles);
        let lift_self = Polynomial::from_roots(&extra_other, 1.0);
        let lift_other = Polynomial::from_roots(&unmatched_self, self.den.leading() / other.den.leading());
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&extra_other);
        RationalFunction {
            num: &(&self.num * &lift_self) + &(&other.num * &lift_other),
            den: &self.den * &lift_self,
            poles,
        }
        .reduced_at(shared)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cancel every pole at which the numerator vanishes.
    fn reduced(self) -> Self {
        let all = self.poles.clone();
        self.reduced_at(all)
    }

    /// Cancel poles at which the numerator vanishes, testing only poles in
    /// `candidates` (with multiplicity).
    fn reduced_at(mut self, mut candidates: Vec<Complex64>) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let mut i = 0;
        while i < self.poles.len() && self.num.degree() > 0 {
            let r = self.poles[i];
            let Some(slot) = candidates.iter().position(|&c| same_root(c, r)) else {
                i += 1;
                continue;
            };
            let value = self.num.eval(r).norm();
            if value > CANCEL_TOL * self.num.eval_scale(r) {
                i += 1;
                continue;
            }
            let is_real = r.im.abs() <= ROOT_MATCH_TOL * (1.0 + r.norm());
            let partner = if is_real {
                None
            } else {
                (0..self.poles.len()).find(|&j| j != i && same_root(self.poles[j], r.conj()))
            };
            let factor = match (is_real, partner) {
                (true, _) => Polynomial::new(vec![-r.re, 1.0]),
                (false, Some(_)) if self.num.degree() >= 2 => {
                    Polynomial::new(vec![r.norm_sqr(), -2.0 * r.re, 1.0])
                }
                _ => {
                    i += 1;
                    continue;
                }
            };
            self.num = self.num.div_rem(&factor).0;
            candidates.remove(slot);
            if partner.is_some() {
                if let Some(k) = candidates.iter().position(|&c| same_root(c, r.conj())) {
                    candidates.remove(k);
                }
            }
            let lead = self.den.leading();
            match partner {
                Some(j) => {
                    let (a, b) = if i > j { (i, j) } else { (j, i) };
                    self.poles.remove(a);
                    self.poles.remove(b);
                }
                None => {
                    self.poles.remove(i);
                }
            }
            self.den = Polynomial::from_roots(&self.poles, lead);
        }
        self
    }
}

/// Poles of `a` matched by a pole of `b` (multiplicity-aware).
fn shared_poles(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let (unmatched, _) = split_poles(a, b);
    let (_, shared) = split_poles(&unmatched, a);
    shared
}

/// Returns the poles of `a` not matched by any pole of `b`, and the poles of
/// `b` not matched by any pole of `a` (multiplicity-aware).
pub(crate) fn split_poles(a: &[Complex64], b: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut used = vec![false; a.len()];
    let mut extra = Vec::new();
    for &q in b {
        match (0..a.len()).find(|&i| !used[i] && same_root(a[i], q)) {
            Some(i) => used[i] = true,
            None => extra.push(q),
        }
    }
    let unmatched = a
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(&p, _)| p)
        .collect();
    (unmatched, extra)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalFunction::new(Polynomial::constant(1.0), Polynomial::zero()).is_err());
    }

    #[test]
    fn common_root_cancels() {
        // (s^2 - 1) / (s - 1) -> s + 1
        let r = RationalFunction::new(
            Polynomial::new(vec![-1.0, 0.0, 1.0]),
            Polynomial::new(vec![-1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(r.den().degree(), 0);
        assert!((r.eval(c(2.0, 0.0)) - c(3.0, 0.0)).norm() < 1e-14);

        // s (s^2 + 4) / ((s^2 + 4)(s + 1)) -> s / (s + 1)
        let num = Polynomial::new(vec![0.0, 4.0, 0.0, 1.0]);
        let den = &Polynomial::new(vec![4.0, 0.0, 1.0]) * &Polynomial::new(vec![1.0, 1.0]);
        let r = RationalFunction::new(num, den).unwrap();
        assert_eq!(r.poles().len(), 1);
        assert!((r.eval(c(1.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn addition_over_distinct_denominators() {
        let a = RationalFunction::from_poles(Polynomial::constant(1.0), 1.0, vec![c(0.0, 0.0)]);
        let b = RationalFunction::from_poles(Polynomial::constant(2.0), 1.0, vec![c(-3.0, 0.0)]);
        let sum = a.add(&b);
        let s = c(0.4, 1.1);
        assert!((sum.eval(s) - (a.eval(s) + b.eval(s))).norm() < 1e-14);
        assert_eq!(sum.poles().len(), 2);

        // identical poles cancel to zero
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn shared_pole_is_not_duplicated() {
        let a = RationalFunction::from_poles(Polynomial::constant(1.0), 1.0, vec![c(0.0, 0.0), c(-2.0, 0.0)]);
        let b = RationalFunction::from_poles(Polynomial::constant(1.0), 1.0, vec![c(-2.0, 0.0)]);
        let sum = a.add(&b);
        assert_eq!(sum.poles().len(), 2);
        let s = c(-0.3, 0.9);
        assert!((sum.eval(s) - (a.eval(s) + b.eval(s))).norm() < 1e-14);
    }

    #[test]
    fn tiny_summand_keeps_its_poles() {
        // 1e-12/(s+1)^3 + 1/(s^2+4): the small term's poles cannot cancel
        let a = RationalFunction::from_poles(Polynomial::constant(1e-12), 1.0, vec![c(-1.0, 0.0); 3]);
        let b = RationalFunction::from_poles(Polynomial::constant(1.0), 1.0, vec![c(0.0, 2.0), c(0.0, -2.0)]);
        let sum = a.add(&b);
        assert_eq!(sum.poles().len(), 5);
        // monomial evaluation next to a triple root keeps only a few digits
        let s = c(-1.0 + 1e-3, 0.0);
        assert!((sum.eval(s) - b.eval(s) - a.eval(s)).norm() < 1e-2 * a.eval(s).norm());
    }
}
