use finlap::{
    cascade, design_run, flt_of_signal, normalized_samples, ode_oracle, parse_signal, solve_terminal,
    system_function, verify_entire, Complex64, LinearSystem, Polynomial, StateSpace, SymbolicResponse,
    TimeSignal, DMatrix,
};
use proptest::prelude::*;

fn first_order(name: &str, pole: f64) -> LinearSystem {
    LinearSystem::new(name, Polynomial::new(vec![pole, 1.0]), vec![0.0]).unwrap()
}

fn respond(sys: &LinearSystem, input: &TimeSignal) -> finlap::TerminalSystem {
    let resp = system_function(sys, &SymbolicResponse::known(&flt_of_signal(input))).unwrap();
    solve_terminal(&[resp]).unwrap()
}

/// Systems and inputs whose responses have known closed forms.
fn systems() -> Vec<(LinearSystem, &'static str)> {
    vec![
        (first_order("y", 2.0), "1"),
        (first_order("y", 50.0), "1"),
        (first_order("y", -1.5), "exp(-2 t)"),
        (first_order("y", 3.0), "sin(4 t)"),
        (first_order("y", 3.0), "exp(-3 t)"),
        (LinearSystem::new("y", Polynomial::new(vec![1.0, 0.0, 1.0]), vec![1.0, 0.0]).unwrap(), "0"),
        (LinearSystem::new("y", Polynomial::new(vec![2.0, 3.0, 1.0]), vec![0.5, -1.0]).unwrap(), "sin(2 t)"),
        (LinearSystem::new("y", Polynomial::new(vec![5.0, 2.0, 1.0]), vec![0.0, 0.0]).unwrap(), "1"),
        (LinearSystem::new("y", Polynomial::new(vec![6.0, 11.0, 6.0, 1.0]), vec![1.0, 0.0, 0.0]).unwrap(), "t"),
    ]
}

#[test]
fn substitution_restores_analyticity() {
    for horizon in [0.1, 1.0, 2.0] {
        for (sys, input) in systems() {
            let input = parse_signal(input, horizon).unwrap();
            let solved = respond(&sys, &input);
            let report = verify_entire(&solved.responses[0], 1e-6);
            assert!(report.passed(), "{:?} on [0, {horizon}]: {report:?}", sys.coeffs);
        }
    }
}

#[test]
fn terminal_values_match_the_oracle() {
    for horizon in [0.1, 1.0, 2.0] {
        for (sys, input) in systems() {
            let input = parse_signal(input, horizon).unwrap();
            let solved = respond(&sys, &input);
            let oracle = ode_oracle(std::slice::from_ref(&sys), &input, &[horizon]).unwrap();
            let got = solved.value("y(T)").unwrap();
            let want = oracle.values[0][0];
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-12), "{:?}: {got} vs {want}", sys.coeffs);
        }
    }
}

#[test]
fn design_example_tracks_the_oracle() {
    let (p, horizon) = (50.0, 0.1);
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 * horizon / 10.0).collect();
    for c in [60.0, 100.0] {
        let run = design_run(p, c, horizon, 10, 10).unwrap();
        let chain = [first_order("u", c), first_order("y", p)];
        let oracle = ode_oracle(&chain, &TimeSignal::step(horizon).unwrap(), &grid).unwrap();
        for (stage, rows) in [&run.controller_rows, &run.plant_rows].into_iter().enumerate() {
            let last = oracle.values[stage][9];
            for (row, want) in rows.iter().zip(&oracle.values[stage]) {
                assert!((row.3 - want / last).abs() <= 2e-3, "c = {c}, stage {stage}, k = {}", row.0);
            }
        }
    }
}

#[test]
fn fast_controller_approaches_the_plant_step() {
    let (p, horizon): (f64, f64) = (50.0, 0.1);
    let step = (1.0 - (-p * horizon).exp()) / p;
    let mut last = f64::INFINITY;
    for c in [1e2, 1e3, 1e4] {
        let run = design_run(p, c, horizon, 10, 10).unwrap();
        let gap = (c * run.y_terminal - step).abs() / step;
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-2, "{last}");
    let plant = normalized_samples(|t| 1.0 - (-p * t).exp(), horizon, 10).unwrap();
    let run = design_run(p, 1e4, horizon, 10, 10).unwrap();
    for (row, want) in run.plant_rows.iter().zip(plant) {
        assert!((row.3 - want).abs() < 2e-2, "k = {}: {} vs {want}", row.0, row.3);
    }
}

#[test]
fn first_order_has_one_condition() {
    let solved = respond(&first_order("y", 4.0), &TimeSignal::sine(3.0, 1.0).unwrap());
    assert_eq!(solved.unknowns, vec!["y(T)".to_string()]);
    assert_eq!(solved.equations.len(), 1);
    assert_eq!(solved.equations[0].root, Complex64::new(-4.0, 0.0));
}

#[test]
fn conjugate_condition_is_redundant() {
    // y'' + 2y' + 5y = 1, roots -1 ± 2i
    let sys = LinearSystem::new("y", Polynomial::new(vec![5.0, 2.0, 1.0]), vec![0.3, 0.0]).unwrap();
    let solved = respond(&sys, &TimeSignal::step(1.0).unwrap());
    let upper: Vec<_> = solved.equations.iter().filter(|e| e.root.im > 0.0).collect();
    let lower: Vec<_> = solved.equations.iter().filter(|e| e.root.im < 0.0).collect();
    assert_eq!((upper.len(), lower.len()), (1, 1));
    let (u, l) = (upper[0], lower[0]);
    for (a, b) in u.coeffs.iter().zip(&l.coeffs) {
        assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
    }
    // the upper equation alone, split into real and imaginary rows
    let (a, b) = (u.coeffs[0], u.coeffs[1]);
    let det = a.re * b.im - a.im * b.re;
    let x0 = (u.rhs.re * b.im - u.rhs.im * b.re) / det;
    let x1 = (a.re * u.rhs.im - a.im * u.rhs.re) / det;
    assert!((x0 - solved.solution[0]).abs() <= 1e-10 * x0.abs().max(1.0));
    assert!((x1 - solved.solution[1]).abs() <= 1e-10 * x1.abs().max(1.0));
}

#[test]
fn rotation_state_space() {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    for horizon in [0.5, 1.0, 2.0] {
        let sys = StateSpace::new(a.clone(), vec![1.0, 0.0], vec!["y".into(), "z".into()], horizon)
            .unwrap()
            .terminal()
            .unwrap();
        assert!((sys.value("y(T)").unwrap() - horizon.cos()).abs() <= 1e-10);
        assert!((sys.value("z(T)").unwrap() - horizon.sin()).abs() <= 1e-10);
        for r in &sys.responses {
            assert!(verify_entire(r, 1e-6).passed());
        }
    }
}

fn distinct(poles: &[f64]) -> bool {
    poles
        .iter()
        .enumerate()
        .all(|(i, a)| poles[i + 1..].iter().all(|b| (a - b).abs() > 1e-2 * a.abs().max(b.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_chains_match_the_oracle(
        poles in prop::collection::vec(0.5..80.0f64, 1..=3),
        input in prop_oneof![Just("1"), Just("exp(-2 t)"), Just("sin(3 t)"), Just("t")],
        horizon in prop_oneof![Just(0.1), Just(0.5), Just(1.0)],
    ) {
        prop_assume!(distinct(&poles));
        let chain: Vec<LinearSystem> =
            poles.iter().enumerate().map(|(i, &p)| first_order(&format!("y{i}"), p)).collect();
        let signal = parse_signal(input, horizon).unwrap();
        let stages = cascade(&chain, &flt_of_signal(&signal)).unwrap();
        let oracle = ode_oracle(&chain, &signal, &[horizon]).unwrap();
        for (i, stage) in stages.iter().enumerate() {
            let got = stage.value(&format!("y{i}(T)")).unwrap();
            let want = oracle.values[i][0];
            prop_assert!((got - want).abs() <= 1e-9 * want.abs(), "stage {}: {} vs {}", i, got, want);
        }
    }
}
