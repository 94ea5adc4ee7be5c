//! Stage-by-stage cascades and the controller/plant design run.

use super::{solve_terminal, system_function, LinearSystem, SymbolicResponse, TerminalSystem};
use crate::error::{Error, Result};
use crate::flt::{flt_of_signal, FltExpr};
use crate::inverse::{invert_flt, PolynomialSignal};
use crate::poly::Polynomial;
use crate::signal::TimeSignal;

/// Normalized plant level that marks the rise.
pub const RISE_LEVEL: f64 = 0.9;

const COINCIDE_TOL: f64 = 1e-9;

/// Feed `input` through `stages` in order.
///
/// Each stage's terminal values are resolved and substituted before its
/// output drives the next stage. Stages whose characteristic roots coincide
/// with an upstream stage's roots are rejected.
pub fn cascade(stages: &[LinearSystem], input: &FltExpr) -> Result<Vec<TerminalSystem>> {
    let mut upstream_roots = Vec::new();
    let mut signal = input.clone();
    let mut out = Vec::with_capacity(stages.len());
    for stage in stages {
        let roots = stage.coeffs.roots()?;
        for r in &roots {
            if let Some(u) = upstream_roots.iter().find(|u: &&num_complex::Complex64| {
                (*r - **u).norm() <= COINCIDE_TOL * r.norm().max(u.norm())
            }) {
                return Err(Error::Degenerate(format!(
                    "stage `{}` has root {r} coinciding with upstream root {u}",
                    stage.name
                )));
            }
        }
        upstream_roots.extend(roots);
        let response = system_function(stage, &SymbolicResponse::known(&signal))?;
        let solved = solve_terminal(std::slice::from_ref(&response))?;
        signal = solved.responses[0].clone();
        out.push(solved);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignRun {
    pub plant_pole: f64,
    pub controller_pole: f64,
    pub horizon: f64,
    pub u_terminal: f64,
    pub y_terminal: f64,
    pub controller_response: FltExpr,
    pub plant_response: FltExpr,
    pub controller: PolynomialSignal,
    pub plant: PolynomialSignal,
    /// `(k, t_k, value, normalized)` rows.
    pub controller_rows: Vec<(usize, f64, f64, f64)>,
    pub plant_rows: Vec<(usize, f64, f64, f64)>,
}

impl DesignRun {
    /// First 1-based sample index where the normalized plant output reaches
    /// [`RISE_LEVEL`].
    pub fn rise_index(&self) -> Option<usize> {
        self.plant_rows
            .iter()
            .find(|row| row.3 >= RISE_LEVEL)
            .map(|row| row.0)
    }
}

/// Step into the controller `u' + c u = r`, then the plant `y' + p y = u`,
/// both starting at rest; invert both outputs with `order` coefficients and
/// sample them at `count` points.
pub fn design_run(plant_pole: f64, controller_pole: f64, horizon: f64, order: usize, count: usize) -> Result<DesignRun> {
    for (name, v) in [("p", plant_pole), ("c", controller_pole)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let controller = LinearSystem::new("u", Polynomial::new(vec![controller_pole, 1.0]), vec![0.0])?;
    let plant = LinearSystem::new("y", Polynomial::new(vec![plant_pole, 1.0]), vec![0.0])?;
    let step = flt_of_signal(&TimeSignal::step(horizon)?);
    let stages = cascade(&[controller, plant], &step)?;
    let u_terminal = stages[0].value("u(T)").expect("controller unknown");
    let y_terminal = stages[1].value("y(T)").expect("plant unknown");
    let controller_response = stages[0].responses[0].clone();
    let plant_response = stages[1].responses[0].clone();
    let u = invert_flt(&controller_response, order)?;
    let y = invert_flt(&plant_response, order)?;
    Ok(DesignRun {
        plant_pole,
        controller_pole,
        horizon,
        u_terminal,
        y_terminal,
        controller_rows: u.sample_table(count)?,
        plant_rows: y.sample_table(count)?,
        controller: u,
        plant: y,
        controller_response,
        plant_response,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub controller_pole: f64,
    pub u_terminal: f64,
    pub y_terminal: f64,
    pub rise_index: Option<usize>,
}

/// One [`design_run`] per controller pole.
pub fn design_sweep(
    plant_pole: f64,
    controller_poles: &[f64],
    horizon: f64,
    order: usize,
    count: usize,
) -> Result<Vec<SweepRow>> {
    controller_poles
        .iter()
        .map(|&c| {
            let run = design_run(plant_pole, c, horizon, order, count)?;
            Ok(SweepRow {
                controller_pole: c,
                u_terminal: run.u_terminal,
                y_terminal: run.y_terminal,
                rise_index: run.rise_index(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_values_for_the_worked_example() {
        let run = design_run(50.0, 60.0, 0.1, 10, 10).unwrap();
        assert!((run.u_terminal - 0.0166253541303889).abs() < 1e-14);
        assert!((run.y_terminal - 3.23988692962940e-4).abs() < 1e-14);
        let run = design_run(50.0, 100.0, 0.1, 10, 10).unwrap();
        assert!((run.u_terminal - 0.00999954600070238).abs() < 1e-14);
        assert!((run.y_terminal - 1.97313901186318e-4).abs() < 1e-14);
    }

    #[test]
    fn coinciding_poles_are_rejected() {
        assert!(matches!(
            design_run(50.0, 50.0, 0.1, 10, 10),
            Err(Error::Degenerate(_))
        ));
        assert!(design_run(50.0, -1.0, 0.1, 10, 10).is_err());
    }

    #[test]
    fn plant_samples_rise_to_one() {
        let run = design_run(50.0, 60.0, 0.1, 10, 10).unwrap();
        let v: Vec<f64> = run.plant_rows.iter().map(|r| r.3).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
        assert_eq!(*v.last().unwrap(), 1.0);
    }
}
