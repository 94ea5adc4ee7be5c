//! Reference time-domain solutions of ODE chains.
//!
//! The modal route works on ordinary (infinite-horizon) Laplace transforms:
//! each stage output is `[Y_prev(s) + Σ p_k I_k(s)] / P(s)`, and with
//! simple poles `y(t) = Σ_r N(r)/D'(r) e^{rt}`. When two poles nearly
//! coincide the chain is integrated with classical RK4 instead.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::LinearSystem;
use crate::error::{Error, Result};
use crate::flt::flt_of_signal;
use crate::poly::Polynomial;
use crate::rational::RationalFunction;
use crate::signal::TimeSignal;

/// Poles closer than this (relative) send the oracle to RK4.
const NEAR_POLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Modal,
    Integrated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub method: OracleMethod,
    /// `values[stage][i]` is the output of `stage` at `grid[i]`.
    pub values: Vec<Vec<f64>>,
}

/// Outputs of every stage of `chain` driven by `input`, sampled on `grid`.
pub fn ode_oracle(chain: &[LinearSystem], input: &TimeSignal, grid: &[f64]) -> Result<OracleSolution> {
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    match modal(chain, input, grid)? {
        Some(values) => Ok(OracleSolution {
            method: OracleMethod::Modal,
            values,
        }),
        None => Ok(OracleSolution {
            method: OracleMethod::Integrated,
            values: integrate_chain(chain, input, grid),
        }),
    }
}

fn modal(chain: &[LinearSystem], input: &TimeSignal, grid: &[f64]) -> Result<Option<Vec<Vec<f64>>>> {
    let mut transform = flt_of_signal(input).base().clone();
    let mut out = Vec::with_capacity(chain.len());
    for sys in chain {
        let p = sys.coeffs.coeffs();
        let n = sys.order();
        let mut initial = vec![0.0; n];
        for (k, &pk) in p.iter().enumerate() {
            for (j, slot) in initial.iter_mut().enumerate().take(k) {
                *slot += pk * sys.init[k - j - 1];
            }
        }
        transform = transform
            .add(&RationalFunction::polynomial(Polynomial::new(initial)))
            .div_poly(&sys.coeffs)?;
        let poles = transform.poles();
        for (i, a) in poles.iter().enumerate() {
            if poles[i + 1..]
                .iter()
                .any(|b| (a - b).norm() <= NEAR_POLE_TOL * (1.0 + a.norm()))
            {
                return Ok(None);
            }
        }
        let num = transform.num();
        let dden = transform.den().derivative();
        let residues: Vec<(Complex64, Complex64)> = poles
            .iter()
            .map(|&r| (r, num.eval(r) / dden.eval(r)))
            .collect();
        out.push(
            grid.iter()
                .map(|&t| residues.iter().map(|&(r, c)| (c * (r * t).exp()).re).sum())
                .collect(),
        );
    }
    Ok(Some(out))
}

/// Classical RK4 on `y' = f(t, y)`, reporting the state at each grid time.
fn rk4<F>(f: F, y0: Vec<f64>, grid: &[f64], max_step: f64) -> Vec<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let axpy = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let mut t = 0.0;
    let mut y = y0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        let span = target - t;
        let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            let k1 = f(t, &y);
            let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
            let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
            let k4 = f(t + h, &axpy(&y, &k3, h));
            for i in 0..y.len() {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += h;
        }
        t = target;
        out.push(y.clone());
    }
    out
}

/// Step size resolving the fastest mode of the chain.
fn step_for(roots: impl Iterator<Item = Complex64>, grid: &[f64]) -> f64 {
    let fastest = roots.map(|r| r.norm()).fold(1.0, f64::max);
    let span = grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    (0.02 / fastest).min(span.max(1e-12) / 2000.0)
}

fn integrate_chain(chain: &[LinearSystem], input: &TimeSignal, grid: &[f64]) -> Vec<Vec<f64>> {
    let offsets: Vec<usize> = chain
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.order();
            Some(o)
        })
        .collect();
    let y0: Vec<f64> = chain.iter().flat_map(|s| s.init.iter().copied()).collect();
    let f = |t: f64, y: &[f64]| {
        let mut dy = vec![0.0; y.len()];
        let mut drive = input.value(t);
        for (sys, &o) in chain.iter().zip(&offsets) {
            let p = sys.coeffs.coeffs();
            let n = sys.order();
            for i in 0..n - 1 {
                dy[o + i] = y[o + i + 1];
            }
            let rest: f64 = (0..n).map(|k| p[k] * y[o + k]).sum();
            dy[o + n - 1] = (drive - rest) / p[n];
            drive = y[o];
        }
        dy
    };
    let roots = chain
        .iter()
        .flat_map(|s| s.coeffs.roots().unwrap_or_default())
        .chain(input.terms().iter().map(|t| t.exponent()));
    let states = rk4(f, y0, grid, step_for(roots, grid));
    offsets
        .iter()
        .map(|&o| states.iter().map(|y| y[o]).collect())
        .collect()
}

/// States of `x' = A x`, `x(0) = init`, sampled on `grid` by RK4.
pub fn state_space_oracle(a: &DMatrix<f64>, init: &[f64], grid: &[f64]) -> Vec<Vec<f64>> {
    let f = |_t: f64, x: &[f64]| {
        (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
            .collect()
    };
    let eig = a.complex_eigenvalues();
    rk4(f, init.to_vec(), grid, step_for(eig.iter().copied(), grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order(name: &str, pole: f64) -> LinearSystem {
        LinearSystem::new(name, Polynomial::new(vec![pole, 1.0]), vec![0.0]).unwrap()
    }

    #[test]
    fn plant_step_response() {
        let grid = [0.0, 0.02, 0.05, 0.1];
        let sol = ode_oracle(&[first_order("y", 50.0)], &TimeSignal::step(0.1).unwrap(), &grid).unwrap();
        assert_eq!(sol.method, OracleMethod::Modal);
        for (t, v) in grid.iter().zip(&sol.values[0]) {
            assert!((v - (1.0 - (-50.0 * t).exp()) / 50.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cascade_terminal_value() {
        let chain = [first_order("u", 60.0), first_order("y", 50.0)];
        let sol = ode_oracle(&chain, &TimeSignal::step(0.1).unwrap(), &[0.1]).unwrap();
        assert!((sol.values[1][0] - 3.23988692962940e-4).abs() < 1e-15);
        assert!((sol.values[0][0] - 0.0166253541303889).abs() < 1e-15);
    }

    #[test]
    fn rotation_pair() {
        // y'' + y = 0 gives (y, y') = (cos t, -sin t) and z = -y' = sin t
        let sys = LinearSystem::new("y", Polynomial::new(vec![1.0, 0.0, 1.0]), vec![1.0, 0.0]).unwrap();
        let grid = [0.5, 1.0, 2.0];
        let sol = ode_oracle(&[sys], &TimeSignal::zero(2.0).unwrap(), &grid).unwrap();
        for (t, v) in grid.iter().zip(&sol.values[0]) {
            assert!((v - t.cos()).abs() < 1e-14);
        }
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let x = state_space_oracle(&a, &[1.0, 0.0], &grid);
        for (t, x) in grid.iter().zip(&x) {
            assert!((x[0] - t.cos()).abs() < 1e-10);
            assert!((x[1] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn integration_fallback_matches_modal() {
        let chain = [first_order("u", 60.0), first_order("y", 60.0 * (1.0 + 1e-8))];
        let grid = [0.03, 0.1];
        let sol = ode_oracle(&chain, &TimeSignal::step(0.1).unwrap(), &grid).unwrap();
        assert_eq!(sol.method, OracleMethod::Integrated);
        // confluent closed form for c = p: y = (1 - e^{-ct}(1 + ct)) / c^2
        let c: f64 = 60.0;
        for (t, v) in grid.iter().zip(&sol.values[1]) {
            let exact = (1.0 - (-c * t).exp() * (1.0 + c * t)) / (c * c);
            assert!((v - exact).abs() < 1e-7 * exact, "{v} vs {exact}");
        }
    }
}
