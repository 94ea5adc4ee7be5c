//! Terminal values of linear constant-coefficient ODEs from analyticity.
//!
//! Transforming `Σ p_k y^(k) = u` on `[0, T]` with the derivative rule gives
//!
//! `Y(s) = [U(s) + Σ_k p_k I_k(s) - exp(-sT) Σ_k p_k J_k(s)] / P(s)`
//!
//! where `I_k` holds the initial values and `J_k` the unknown terminal
//! values `y^(i)(T)`. `Y` has to be entire, so its numerator must vanish
//! (with the right multiplicity) at every root of the denominator. Each
//! such condition is linear in the unknowns.

mod design;
mod oracle;
mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flt::{series::{exp_shift, numerator_series}, verify_entire, DelayedTerm, FltExpr};
use crate::poly::Polynomial;
use crate::rational::{same_root, RationalFunction};

pub use design::{cascade, design_run, design_sweep, DesignRun, SweepRow, RISE_LEVEL};
pub use oracle::{ode_oracle, state_space_oracle, OracleMethod, OracleSolution};
pub use state::StateSpace;

/// Relative size below which a condition coefficient counts as zero.
const VANISH_TOL: f64 = 1e-10;

/// Relative singular-value floor for the terminal solve.
const RANK_TOL: f64 = 1e-10;

/// Tolerance handed to [`verify_entire`] after substitution.
pub const ENTIRE_TOL: f64 = 1e-6;

/// `Σ_k p_k y^(k) = u` with `init[i] = y^(i)(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    /// Name of the output; unknowns are reported as `name(T)`, `name'(T)`, ..
    pub name: String,
    pub coeffs: Polynomial,
    pub init: Vec<f64>,
}

impl LinearSystem {
    pub fn new(name: impl Into<String>, coeffs: Polynomial, init: Vec<f64>) -> Result<Self> {
        if coeffs.degree() == 0 {
            return Err(Error::InvalidArgument(
                "system polynomial must have degree at least 1".into(),
            ));
        }
        if init.len() != coeffs.degree() {
            return Err(Error::LengthMismatch {
                expected: coeffs.degree(),
                got: init.len(),
            });
        }
        Ok(LinearSystem {
            name: name.into(),
            coeffs,
            init,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.degree()
    }

    /// Identifier of the unknown `y^(i)(T)`.
    pub fn terminal_id(&self, i: usize) -> String {
        format!("{}{}(T)", self.name, "'".repeat(i))
    }
}

/// `Y(s) = [Σ_d exp(-s d) N_d(s) + exp(-sT) Σ_u c_u(s) x_u] / Π (s - r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicResponse {
    horizon: f64,
    roots: Vec<Complex64>,
    known: Vec<(f64, Polynomial)>,
    unknowns: Vec<(String, Polynomial)>,
}

impl SymbolicResponse {
    /// A known transform, with no unknowns.
    pub fn known(expr: &FltExpr) -> Self {
        let (roots, numerators) = expr.common_form();
        let mut out = SymbolicResponse {
            horizon: expr.horizon(),
            roots,
            known: Vec::new(),
            unknowns: Vec::new(),
        };
        for (d, n) in numerators {
            out.add_known(d, Polynomial::new(n.iter().map(|c| c.re).collect()));
        }
        out
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Denominator roots, with multiplicity.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn den(&self) -> Polynomial {
        Polynomial::from_roots(&self.roots, 1.0)
    }

    /// Known numerator pieces `(d, N_d)`.
    pub fn known_terms(&self) -> &[(f64, Polynomial)] {
        &self.known
    }

    /// Unknown ids with the polynomial multiplying `exp(-sT) x_u`.
    pub fn unknown_terms(&self) -> &[(String, Polynomial)] {
        &self.unknowns
    }

    fn add_known(&mut self, delay: f64, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.known.iter_mut().find(|(d, _)| *d == delay) {
            Some((_, q)) => *q = &*q + &p,
            None => self.known.push((delay, p)),
        }
        self.known
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite delays"));
    }

    fn add_unknown(&mut self, id: String, p: Polynomial) {
        match self.unknowns.iter_mut().find(|(u, _)| *u == id) {
            Some((_, q)) => *q = &*q + &p,
            None => self.unknowns.push((id, p)),
        }
    }

    /// Substitute values for the unknowns; missing ids count as zero.
    pub fn substitute(&self, ids: &[String], values: &[f64]) -> Result<FltExpr> {
        let mut known = self.clone();
        for (id, coeff) in &self.unknowns {
            let value = ids
                .iter()
                .position(|u| u == id)
                .map_or(0.0, |i| values[i]);
            known.add_known(self.horizon, coeff.scale(value));
        }
        let mut base = RationalFunction::zero();
        let mut delayed = Vec::new();
        for (d, n) in &known.known {
            let factor = RationalFunction::from_poles(n.clone(), 1.0, self.roots.clone());
            if *d == 0.0 {
                base = factor;
            } else {
                delayed.push(DelayedTerm { delay: *d, factor });
            }
        }
        FltExpr::new(self.horizon, base, delayed)
    }
}

/// Response of `sys` driven by `input`.
///
/// Terminal values of the input stay symbolic; the new unknowns are
/// `y(T) .. y^(n-1)(T)` named after the system.
pub fn system_function(sys: &LinearSystem, input: &SymbolicResponse) -> Result<SymbolicResponse> {
    let p = sys.coeffs.coeffs();
    let n = sys.order();
    let lead = p[n];
    let input_den = input.den();

    let mut roots = input.roots.clone();
    roots.extend(sys.coeffs.roots()?);
    let mut out = SymbolicResponse {
        horizon: input.horizon,
        roots,
        known: Vec::new(),
        unknowns: Vec::new(),
    };
    for (d, q) in &input.known {
        out.add_known(*d, q.scale(1.0 / lead));
    }
    for (id, q) in &input.unknowns {
        out.add_unknown(id.clone(), q.scale(1.0 / lead));
    }

    // Σ_k p_k I_k(s) with I_k(s) = Σ_{j<k} s^j y^(k-j-1)(0)
    let mut initial = vec![0.0; n];
    for (k, &pk) in p.iter().enumerate() {
        for (j, slot) in initial.iter_mut().enumerate().take(k) {
            *slot += pk * sys.init[k - j - 1];
        }
    }
    out.add_known(0.0, (&input_den * &Polynomial::new(initial)).scale(1.0 / lead));

    // coefficient of y^(i)(T): -Σ_{k>i} p_k s^{k-1-i}
    for i in 0..n {
        let c = Polynomial::new((i + 1..=n).map(|k| p[k]).collect());
        out.add_unknown(sys.terminal_id(i), (&input_den * &c).scale(-1.0 / lead));
    }
    Ok(out)
}

/// One analyticity condition: the `derivative`-th derivative of the
/// numerator vanishes at `root`, i.e. `Σ coeffs[u] x_u = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub root: Complex64,
    pub derivative: usize,
    pub coeffs: Vec<Complex64>,
    pub rhs: Complex64,
    /// Magnitude of the terms summed into the equation.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminalSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<Equation>,
    pub solution: Vec<f64>,
    /// Concrete responses after substitution, in input order.
    pub responses: Vec<FltExpr>,
}

impl TerminalSystem {
    pub fn value(&self, id: &str) -> Option<f64> {
        self.unknowns
            .iter()
            .position(|u| u == id)
            .map(|i| self.solution[i])
    }
}

/// Solve the terminal values of a single response.
pub fn terminal_conditions(resp: &SymbolicResponse) -> Result<TerminalSystem> {
    solve_terminal(std::slice::from_ref(resp))
}

/// Solve the terminal values shared by several responses.
///
/// Every denominator root contributes one equation per multiplicity order,
/// unless the known part and all unknown coefficients vanish there. The
/// stacked real system is solved in the least-squares sense; a rank
/// deficit is reported as underdetermined, and each substituted response
/// must pass [`verify_entire`].
pub fn solve_terminal(responses: &[SymbolicResponse]) -> Result<TerminalSystem> {
    let mut unknowns: Vec<String> = Vec::new();
    for r in responses {
        for (id, _) in &r.unknowns {
            if !unknowns.contains(id) {
                unknowns.push(id.clone());
            }
        }
    }
    let mut equations = Vec::new();
    for r in responses {
        equations.extend(conditions(r, &unknowns)?);
    }

    let solution = if unknowns.is_empty() {
        Vec::new()
    } else {
        solve_equations(&equations, unknowns.len())?
    };

    let mut concrete = Vec::with_capacity(responses.len());
    for r in responses {
        let expr = r.substitute(&unknowns, &solution)?;
        let report = verify_entire(&expr, ENTIRE_TOL);
        if let Some(bad) = report.roots.iter().find(|c| !c.pass) {
            return Err(Error::NonAnalytic(format!(
                "singularity remains at s = {}",
                bad.root
            )));
        }
        concrete.push(expr);
    }
    Ok(TerminalSystem {
        unknowns,
        equations,
        solution,
        responses: concrete,
    })
}

fn grouped_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match groups.iter_mut().find(|(g, _)| same_root(*g, r)) {
            Some((_, m)) => *m += 1,
            None => groups.push((r, 1)),
        }
    }
    groups
}

fn to_complex(p: &Polynomial) -> Vec<Complex64> {
    p.to_complex()
}

fn conditions(resp: &SymbolicResponse, unknowns: &[String]) -> Result<Vec<Equation>> {
    let known: Vec<(f64, Vec<Complex64>)> =
        resp.known.iter().map(|(d, p)| (*d, to_complex(p))).collect();
    let mut out = Vec::new();
    for (root, mult) in grouped_roots(&resp.roots) {
        // one common factor for the whole equation keeps exp(-s T) finite
        let shift = exp_shift(known.iter().map(|(d, _)| *d).chain([resp.horizon]), root);
        let (b, gb) = numerator_series(&known, root, mult, shift);
        let per_unknown: Vec<(usize, Vec<Complex64>, Vec<f64>)> = resp
            .unknowns
            .iter()
            .map(|(id, p)| {
                let idx = unknowns.iter().position(|u| u == id).expect("collected above");
                let (a, ga) = numerator_series(&[(resp.horizon, to_complex(p))], root, mult, shift);
                (idx, a, ga)
            })
            .collect();
        for j in 0..mult {
            let known_vanishes = b[j].norm() <= VANISH_TOL * gb[j];
            let unknowns_vanish = per_unknown
                .iter()
                .all(|(_, a, ga)| a[j].norm() <= VANISH_TOL * ga[j]);
            if unknowns_vanish {
                if known_vanishes {
                    continue;
                }
                return Err(Error::NonAnalytic(format!(
                    "numerator does not vanish at s = {root} and no unknown can cancel it"
                )));
            }
            let mut coeffs = vec![Complex64::new(0.0, 0.0); unknowns.len()];
            let mut scale = gb[j];
            for (idx, a, ga) in &per_unknown {
                coeffs[*idx] += a[j];
                scale = scale.max(ga[j]);
            }
            out.push(Equation {
                root,
                derivative: j,
                coeffs,
                rhs: -b[j],
                scale,
            });
        }
    }
    Ok(out)
}

fn solve_equations(equations: &[Equation], count: usize) -> Result<Vec<f64>> {
    if equations.is_empty() {
        return Err(Error::Underdetermined(format!(
            "{count} unknown(s) but no analyticity conditions"
        )));
    }
    let rows = 2 * equations.len();
    let mut a = DMatrix::zeros(rows, count);
    let mut b = DVector::zeros(rows);
    for (i, eq) in equations.iter().enumerate() {
        let w = 1.0 / eq.scale;
        for (j, c) in eq.coeffs.iter().enumerate() {
            a[(2 * i, j)] = c.re * w;
            a[(2 * i + 1, j)] = c.im * w;
        }
        b[2 * i] = eq.rhs.re * w;
        b[2 * i + 1] = eq.rhs.im * w;
    }
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * s_max)
        .count();
    if rank < count {
        return Err(Error::Underdetermined(format!(
            "{count} unknown(s) but only {rank} independent condition(s)"
        )));
    }
    let x = svd
        .solve(&b, RANK_TOL * s_max)
        .map_err(|e| Error::Underdetermined(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flt::flt_of_signal;
    use crate::signal::TimeSignal;

    fn first_order(name: &str, pole: f64) -> LinearSystem {
        LinearSystem::new(name, Polynomial::new(vec![pole, 1.0]), vec![0.0]).unwrap()
    }

    #[test]
    fn controller_response_shape() {
        let c = 60.0;
        let horizon = 0.1;
        let step = SymbolicResponse::known(&flt_of_signal(&TimeSignal::step(horizon).unwrap()));
        let u = system_function(&first_order("u", c), &step).unwrap();
        assert_eq!(u.den().coeffs(), &[0.0, c, 1.0]);
        assert_eq!(u.known_terms().len(), 2);
        assert_eq!(u.known_terms()[0].1.coeffs(), &[1.0]);
        assert_eq!(u.known_terms()[1].1.coeffs(), &[-1.0]);
        assert_eq!(u.unknown_terms()[0].0, "u(T)");
        assert_eq!(u.unknown_terms()[0].1.coeffs(), &[0.0, -1.0]);

        let sys = terminal_conditions(&u).unwrap();
        // s = 0 gives no equation
        assert_eq!(sys.equations.len(), 1);
        let expected = (1.0 - (-c * horizon).exp()) / c;
        assert!((sys.value("u(T)").unwrap() - expected).abs() <= 1e-13 * expected);
    }

    #[test]
    fn plant_response_shape() {
        let (c, p, horizon) = (60.0, 50.0, 0.1);
        let step = SymbolicResponse::known(&flt_of_signal(&TimeSignal::step(horizon).unwrap()));
        let u = system_function(&first_order("u", c), &step).unwrap();
        let y = system_function(&first_order("y", p), &u).unwrap();
        assert_eq!(y.roots().len(), 3);
        let ids: Vec<_> = y.unknown_terms().iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, ["u(T)", "y(T)"]);
        // -s(s+c) multiplies y(T)
        assert_eq!(y.unknown_terms()[1].1.coeffs(), &[0.0, -c, -1.0]);
    }

    #[test]
    fn zero_everything_gives_zero() {
        let zero = SymbolicResponse::known(&FltExpr::zero(1.0).unwrap());
        let y = system_function(&first_order("y", 3.0), &zero).unwrap();
        let sys = terminal_conditions(&y).unwrap();
        assert!(sys.value("y(T)").unwrap().abs() < 1e-15);
        assert!(sys.responses[0].is_zero());
    }

    #[test]
    fn second_order_oscillator() {
        // y'' + y = 0, y(0) = 1, y'(0) = 0
        let horizon = 1.3;
        let sys = LinearSystem::new("y", Polynomial::new(vec![1.0, 0.0, 1.0]), vec![1.0, 0.0]).unwrap();
        let zero = SymbolicResponse::known(&FltExpr::zero(horizon).unwrap());
        let y = system_function(&sys, &zero).unwrap();
        let t = terminal_conditions(&y).unwrap();
        assert!((t.value("y(T)").unwrap() - horizon.cos()).abs() < 1e-12);
        assert!((t.value("y'(T)").unwrap() + horizon.sin()).abs() < 1e-12);
    }

    #[test]
    fn repeated_root_uses_derivative_condition() {
        // y' + 2y = e^{-2t}: resonant input, root -2 twice
        let horizon = 0.7;
        let input = flt_of_signal(&TimeSignal::exponential(-2.0, horizon).unwrap());
        let y = system_function(&first_order("y", 2.0), &SymbolicResponse::known(&input)).unwrap();
        let t = terminal_conditions(&y).unwrap();
        let expected = horizon * (-2.0 * horizon).exp();
        assert!((t.value("y(T)").unwrap() - expected).abs() < 1e-10);
        assert!(t.equations.iter().any(|e| e.derivative == 1));
    }

    #[test]
    fn missing_unknown_is_non_analytic() {
        let bare = FltExpr::new(
            1.0,
            RationalFunction::new(Polynomial::constant(1.0), Polynomial::new(vec![1.0, 1.0])).unwrap(),
            vec![],
        )
        .unwrap();
        assert!(matches!(
            terminal_conditions(&SymbolicResponse::known(&bare)),
            Err(Error::NonAnalytic(_))
        ));
    }

    #[test]
    fn length_checks() {
        assert!(matches!(
            LinearSystem::new("y", Polynomial::new(vec![1.0, 0.0, 1.0]), vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(LinearSystem::new("y", Polynomial::constant(2.0), vec![]).is_err());
    }
}
