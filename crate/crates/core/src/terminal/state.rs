//! Autonomous state-space systems `x' = A x`.
//!
//! Transforming each row gives `(sI - A) X = x(0) - exp(-sT) x(T)`, so
//! `X = adj(sI - A) [x(0) - exp(-sT) x(T)] / det(sI - A)`. All components
//! share the unknowns `x_j(T)`.

use nalgebra::DMatrix;

use super::{solve_terminal, SymbolicResponse, TerminalSystem};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub init: Vec<f64>,
    pub names: Vec<String>,
    pub horizon: f64,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, init: Vec<f64>, names: Vec<String>, horizon: f64) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::InvalidArgument("state matrix must be square and nonempty".into()));
        }
        for len in [init.len(), names.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, got: len });
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon T must be finite and positive, got {horizon}"
            )));
        }
        Ok(StateSpace {
            a,
            init,
            names,
            horizon,
        })
    }

    /// `det(sI - A)` and `adj(sI - A)` by the Faddeev–LeVerrier recursion.
    pub fn resolvent(&self) -> (Polynomial, Vec<Vec<Polynomial>>) {
        let n = self.a.nrows();
        let identity = DMatrix::<f64>::identity(n, n);
        // char poly s^n + c_{n-1} s^{n-1} + .. + c_0
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut mats = Vec::with_capacity(n);
        for k in 1..=n {
            m = &self.a * &m + &identity * c[n - k + 1];
            c[n - k] = -(&self.a * &m).trace() / k as f64;
            mats.push(m.clone());
        }
        // adj(sI - A) = Σ_{k=1..n} M_k s^{n-k}
        let adj = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut coeffs = vec![0.0; n];
                        for (k, mk) in mats.iter().enumerate() {
                            coeffs[n - 1 - k] = mk[(i, j)];
                        }
                        Polynomial::new(coeffs)
                    })
                    .collect()
            })
            .collect();
        (Polynomial::new(c), adj)
    }

    pub fn responses(&self) -> Result<Vec<SymbolicResponse>> {
        let (det, adj) = self.resolvent();
        let roots = det.roots()?;
        let n = self.a.nrows();
        Ok((0..n)
            .map(|i| {
                let mut known = Polynomial::zero();
                let mut unknowns = Vec::with_capacity(n);
                for (j, a) in adj[i].iter().enumerate() {
                    known = &known + &a.scale(self.init[j]);
                    unknowns.push((format!("{}(T)", self.names[j]), a.scale(-1.0)));
                }
                SymbolicResponse {
                    horizon: self.horizon,
                    roots: roots.clone(),
                    known: if known.is_zero() { Vec::new() } else { vec![(0.0, known)] },
                    unknowns,
                }
            })
            .collect())
    }

    /// Terminal state from analyticity of every component.
    pub fn terminal(&self) -> Result<TerminalSystem> {
        solve_terminal(&self.responses()?)
    }
}
