//! Inversion through Maclaurin coefficients and the moment matrix.
//!
//! For `f(t) = Σ b_k t^k` on `[0, T]` the Maclaurin coefficients of the
//! transform are `a_n = (-1)^n / n! ∫ t^n f(t) dt`, so `M b = a` with
//! `M[n][k] = (-1)^n T^{n+k+1} / (n! (n+k+1))`. The solve is done on the
//! rescaled time `τ = t/T`, where the matrix is the Hilbert matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flt::FltExpr;
use crate::signal::{Kind, Term, TimeSignal};

/// Largest acceptable condition estimate.
pub const CONDITION_LIMIT: f64 = 1e17;

/// Relative residual `‖M b - a‖∞ / ‖a‖∞` accepted after a solve.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub order: usize,
    pub horizon: f64,
    pub entries: Vec<Vec<f64>>,
    /// 1-norm condition number of the rescaled (Hilbert) system.
    pub condition_estimate: f64,
}

impl MomentMatrix {
    pub fn new(horizon: f64, order: usize) -> Result<Self> {
        check_args(horizon, order)?;
        let mut entries = vec![vec![0.0; order]; order];
        let mut fact = 1.0;
        for (n, row) in entries.iter_mut().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for (k, e) in row.iter_mut().enumerate() {
                let p = (n + k + 1) as i32;
                *e = sign * horizon.powi(p) / (fact * p as f64);
            }
        }
        Ok(MomentMatrix {
            order,
            horizon,
            entries,
            condition_estimate: hilbert_condition(order),
        })
    }

    pub fn mul_vec(&self, b: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(b).map(|(m, x)| m * x).sum())
            .collect()
    }
}

fn check_args(horizon: f64, order: usize) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon T must be finite and positive, got {horizon}"
        )));
    }
    if order == 0 {
        return Err(Error::InvalidArgument("order N must be at least 1".into()));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact 1-norm condition number of the `order x order` Hilbert matrix,
/// from the closed-form integer inverse.
pub fn hilbert_condition(order: usize) -> f64 {
    let n = order;
    let norm_h = (1..=n).map(|i| (1..=n).map(|j| 1.0 / (i + j - 1) as f64).sum::<f64>()).fold(0.0, f64::max);
    let norm_inv = (1..=n)
        .map(|j| {
            (1..=n)
                .map(|i| {
                    (i + j - 1) as f64
                        * binomial(n + i - 1, n - j)
                        * binomial(n + j - 1, n - i)
                        * binomial(i + j - 2, i - 1).powi(2)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    norm_h * norm_inv
}

/// Largest order whose condition estimate stays within [`CONDITION_LIMIT`].
pub fn max_order() -> usize {
    (1..).take_while(|&n| hilbert_condition(n) <= CONDITION_LIMIT).last().unwrap_or(1)
}

/// `(N, condition estimate)` for each requested order.
pub fn condition_report(horizon: f64, orders: impl IntoIterator<Item = usize>) -> Result<Vec<(usize, f64)>> {
    orders
        .into_iter()
        .map(|n| MomentMatrix::new(horizon, n).map(|m| (n, m.condition_estimate)))
        .collect()
}

/// Reconstruction `f(t) = Σ b_k t^k` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSignal {
    pub coeffs: Vec<f64>,
    pub horizon: f64,
}

impl PolynomialSignal {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(-1e-12 * self.horizon..=self.horizon * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::Domain {
                t,
                horizon: self.horizon,
            });
        }
        Ok(self.coeffs.iter().rev().fold(0.0, |acc, &b| acc * t + b))
    }

    pub fn to_signal(&self) -> TimeSignal {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &b)| Term::new(b, k as u32, 0.0, 0.0, Kind::Const))
            .collect();
        TimeSignal::new(terms, self.horizon).expect("horizon already validated")
    }

    /// Values at `t_k = k T / K`, `k = 1..K`, divided by the value at `T`.
    pub fn sample_normalized(&self, count: usize) -> Result<Vec<f64>> {
        normalized_samples(|t| self.eval(t).expect("grid lies in [0, T]"), self.horizon, count)
    }

    /// Rows `(k, t_k, value, normalized)` on the same grid.
    pub fn sample_table(&self, count: usize) -> Result<Vec<(usize, f64, f64, f64)>> {
        let normalized = self.sample_normalized(count)?;
        Ok(normalized
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let t = sample_time(i + 1, self.horizon, count);
                (i + 1, t, self.eval(t).expect("grid lies in [0, T]"), v)
            })
            .collect())
    }
}

fn sample_time(k: usize, horizon: f64, count: usize) -> f64 {
    if k == count {
        horizon
    } else {
        k as f64 * horizon / count as f64
    }
}

/// Samples of `f` at `t_k = k T / K`, `k = 1..K`, divided by `f(T)`.
pub fn normalized_samples(f: impl Fn(f64) -> f64, horizon: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let last = f(horizon);
    if last == 0.0 || !last.is_finite() {
        return Err(Error::CannotNormalize);
    }
    Ok((1..=count).map(|k| f(sample_time(k, horizon, count)) / last).collect())
}

/// Recover `b_0..b_{N-1}` from the first `N` Maclaurin coefficients of `expr`.
pub fn invert_flt(expr: &FltExpr, order: usize) -> Result<PolynomialSignal> {
    let horizon = expr.horizon();
    let matrix = MomentMatrix::new(horizon, order)?;
    if matrix.condition_estimate > CONDITION_LIMIT {
        return Err(Error::OrderTooHigh {
            order,
            horizon,
            condition: matrix.condition_estimate,
            suggested: max_order(),
        });
    }
    let a = expr.taylor_coeffs(order - 1)?.coeffs;
    let coeffs = solve_moments(&a, horizon)?;

    let residual = matrix
        .mul_vec(&coeffs)
        .iter()
        .zip(&a)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::Degenerate(format!(
            "moment solve residual {residual:.3e} exceeds {RESIDUAL_TOL:e} of the coefficient norm {scale:.3e}"
        )));
    }
    Ok(PolynomialSignal { coeffs, horizon })
}

const REFINEMENT_STEPS: usize = 3;

/// `a * b` as an unevaluated sum `hi + lo`.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

/// `mu - H c` for the exact Hilbert matrix, accumulated in double-double.
fn hilbert_residual(mu: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
    let n = mu.len();
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let (mut hi, mut lo) = (mu[i], 0.0);
            for j in 0..n {
                let d = (i + j + 1) as f64;
                let h_hi = 1.0 / d;
                let h_lo = (-h_hi).mul_add(d, 1.0) / d;
                let (p, e) = two_prod(h_hi, c[j]);
                let (s, t) = two_sum(hi, -p);
                hi = s;
                lo += t - e - h_lo * c[j];
            }
            hi + lo
        }),
    )
}

/// Solve `M b = a` through the Hilbert system on `τ = t/T`, with iterative
/// refinement against the exact Hilbert entries.
fn solve_moments(a: &[f64], horizon: f64) -> Result<Vec<f64>> {
    let n = a.len();
    let hilbert = DMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64);
    let mut fact = 1.0;
    let mu = DVector::from_iterator(
        n,
        a.iter().enumerate().map(|(i, &ai)| {
            if i > 0 {
                fact *= i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact * ai / horizon.powi(i as i32 + 1)
        }),
    );
    let qr = hilbert.col_piv_qr();
    let singular = || Error::Degenerate("moment matrix is numerically singular".into());
    let mut c = qr.solve(&mu).ok_or_else(singular)?;
    for _ in 0..REFINEMENT_STEPS {
        let r = hilbert_residual(&mu, &c);
        c += qr.solve(&r).ok_or_else(singular)?;
    }
    Ok(c.iter()
        .enumerate()
        .map(|(k, &ck)| ck / horizon.powi(k as i32))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flt::flt_of_signal;

    #[test]
    fn matrix_entries() {
        let m = MomentMatrix::new(1.0, 4).unwrap();
        assert_eq!(m.entries[0], vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(m.entries[1], vec![-0.5, -1.0 / 3.0, -0.25, -0.2]);
        assert!((m.entries[2][0] - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(MomentMatrix::new(2.0, 1).unwrap().entries, vec![vec![2.0]]);
        assert!(MomentMatrix::new(1.0, 0).is_err());
    }

    #[test]
    fn hilbert_conditions() {
        assert_eq!(hilbert_condition(1), 1.0);
        assert!((hilbert_condition(4) - 28375.0).abs() < 1e-6);
        assert!(hilbert_condition(12) > 1e10);
        assert_eq!(max_order(), 12);
        let report = condition_report(1.0, 1..=14).unwrap();
        assert!(report.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn step_inverts_exactly() {
        let f = flt_of_signal(&TimeSignal::step(1.0).unwrap());
        for n in 1..=8 {
            let b = invert_flt(&f, n).unwrap().coeffs;
            assert!((b[0] - 1.0).abs() < 1e-8, "N {n}: {b:?}");
            assert!(b[1..].iter().all(|x| x.abs() < 1e-6), "N {n}: {b:?}");
        }
    }

    #[test]
    fn order_too_high() {
        let f = flt_of_signal(&TimeSignal::step(1.0).unwrap());
        match invert_flt(&f, 13) {
            Err(Error::OrderTooHigh { suggested, .. }) => assert_eq!(suggested, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normalization() {
        let ramp = PolynomialSignal {
            coeffs: vec![0.0, 1.0],
            horizon: 2.0,
        };
        assert_eq!(ramp.sample_normalized(4).unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        let one = PolynomialSignal {
            coeffs: vec![3.0],
            horizon: 1.0,
        };
        assert_eq!(one.sample_normalized(5).unwrap(), vec![1.0; 5]);
        let dead = PolynomialSignal {
            coeffs: vec![1.0, -1.0],
            horizon: 1.0,
        };
        assert_eq!(dead.sample_normalized(3), Err(Error::CannotNormalize));
    }

    #[test]
    fn exponential_rows() {
        let f = flt_of_signal(&TimeSignal::exponential(6.0, 1.0).unwrap());
        let row10 = invert_flt(&f, 10).unwrap().sample_normalized(10).unwrap();
        let paper = [0.00451518, 0.00823095, 0.0149953, 0.0273231, 0.0497887, 0.090718, 0.165299, 0.301198, 0.548813, 1.0];
        for (x, p) in row10.iter().zip(paper) {
            assert!((x - p).abs() < 5e-6, "{row10:?}");
        }
        let row4 = invert_flt(&f, 4).unwrap().sample_normalized(10).unwrap();
        assert!((row4[0] - 0.0133275).abs() < 5e-7, "{row4:?}");
    }
}
