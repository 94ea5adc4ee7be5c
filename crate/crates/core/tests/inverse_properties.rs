use finlap::{flt_of_signal, invert_flt, normalized_samples, parse_signal, Error, TimeSignal};
use proptest::prelude::*;

const TRUE_ROW: [f64; 10] = [
    0.00451658, 0.00822975, 0.0149956, 0.0273237, 0.0497871, 0.090718, 0.165299, 0.301194, 0.548812, 1.0,
];

fn sup_error(f: &TimeSignal, order: usize) -> f64 {
    let g = invert_flt(&flt_of_signal(f), order).unwrap();
    let t = f.horizon();
    (0..=400)
        .map(|i| {
            let x = t * i as f64 / 400.0;
            (g.eval(x).unwrap() - f.eval(x).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn ten_coefficients_track_the_true_row() {
    let f = flt_of_signal(&parse_signal("exp(6 t)", 1.0).unwrap());
    let got = invert_flt(&f, 10).unwrap().sample_normalized(10).unwrap();
    for (k, (g, w)) in got.iter().zip(TRUE_ROW).enumerate() {
        assert!((g - w).abs() <= 5e-6, "k = {}: {g} vs {w}", k + 1);
    }
}

#[test]
fn exact_samples_reproduce_the_true_row() {
    let got = normalized_samples(|t| (6.0 * t).exp(), 1.0, 10).unwrap();
    for (g, w) in got.iter().zip(TRUE_ROW) {
        assert!((g - w).abs() <= 1e-6);
    }
}

#[test]
fn error_shrinks_with_order() {
    for src in ["exp(6 t)", "exp(-2 t)", "exp(3 t)", "2 exp(-5 t)", "exp(t)"] {
        for t in [0.5, 1.0, 2.0] {
            let f = parse_signal(src, t).unwrap();
            let errors: Vec<f64> = [4, 6, 8, 10].iter().map(|&n| sup_error(&f, n)).collect();
            // once truncation error falls below the solve's rounding floor the
            // sequence only has to stay under that floor
            let floor = 1e-9 * f.eval(t).unwrap().abs().max(f.eval(0.0).unwrap().abs());
            for w in errors.windows(2) {
                assert!(w[1] <= w[0].max(floor), "{src} on [0, {t}]: {errors:?}");
            }
        }
    }
}

#[test]
fn order_above_cap_is_refused() {
    let f = flt_of_signal(&TimeSignal::step(1.0).unwrap());
    assert!(matches!(invert_flt(&f, 20), Err(Error::OrderTooHigh { suggested: 12, .. })));
    assert!(invert_flt(&f, 0).is_err());
}

#[test]
fn step_inverts_exactly() {
    for t in [0.1, 1.0, 2.0] {
        let f = flt_of_signal(&TimeSignal::step(t).unwrap());
        let g = invert_flt(&f, 6).unwrap();
        assert!((g.coeffs[0] - 1.0).abs() < 1e-9);
        // compare on the function scale: b_k t^k
        for (k, b) in g.coeffs.iter().enumerate().skip(1) {
            assert!((b * t.powi(k as i32)).abs() < 1e-6, "{:?}", g.coeffs);
        }
    }
}

/// Largest coefficient error over `b` relative to `max |b_k|`.
fn round_trip_error(order: usize, coeffs: &[f64]) -> f64 {
    let f = TimeSignal::polynomial(coeffs, 1.0).unwrap();
    let g = invert_flt(&flt_of_signal(&f), order).unwrap();
    let scale = coeffs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    (0..order)
        .map(|k| (g.coeffs[k] - coeffs.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
        / scale
}

fn order_and_coeffs(max: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=max).prop_flat_map(|n| (Just(n), prop::collection::vec(-5.0..5.0f64, 1..=n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_round_trip((order, coeffs) in order_and_coeffs(7)) {
        prop_assume!(coeffs.iter().any(|b| b.abs() > 1e-3));
        prop_assert!(round_trip_error(order, &coeffs) <= 1e-7);
    }

    // N = 8 sits at the floor set by rounding the moments to double: the
    // 1-norm condition number is 3.4e10, so errors of a few 1e-7 remain
    // even with an exact solve.
    #[test]
    fn polynomial_round_trip_eight(coeffs in prop::collection::vec(-5.0..5.0f64, 1..=8)) {
        prop_assume!(coeffs.iter().any(|b| b.abs() > 1e-3));
        prop_assert!(round_trip_error(8, &coeffs) <= 4e-6);
    }
}
