mod common;

use common::{random_s, rng, CORPUS, HORIZONS};
use finlap::convolution::DEFAULT_INTERVALS;
use finlap::{convolution_gap, parse_signal, Complex64, TimeSignal};

fn full_tol(product: Complex64) -> f64 {
    1e-6 * (1.0 + product.norm())
}

#[test]
fn full_support_equality_on_corpus_pairs() {
    let mut rng = rng(11);
    for t in HORIZONS {
        for (i, f) in CORPUS.iter().enumerate() {
            for g in &CORPUS[i..] {
                let fs = parse_signal(f, t).unwrap();
                let gs = parse_signal(g, t).unwrap();
                let samples: Vec<Complex64> = (0..10).map(|_| random_s(&mut rng, 5.0)).collect();
                let report = convolution_gap(&fs, &gs, &samples, DEFAULT_INTERVALS, 1e-6).unwrap();
                for r in &report.rows {
                    assert!(
                        r.full_error() <= full_tol(r.product),
                        "{f} * {g} on [0, {t}] at {}: {} vs {}",
                        r.s,
                        r.product,
                        r.full
                    );
                }
            }
        }
    }
}

#[test]
fn step_step_gap_at_one() {
    let step = TimeSignal::step(1.0).unwrap();
    let r = &convolution_gap(&step, &step, &[Complex64::new(1.0, 0.0)], DEFAULT_INTERVALS, 1e-6)
        .unwrap()
        .rows[0];
    let e = std::f64::consts::E;
    assert!((r.product.re - (1.0 - 1.0 / e).powi(2)).abs() <= 1e-6);
    assert!((r.full - r.product).norm() <= 1e-6);
    assert!((r.restricted.re - (1.0 - 2.0 / e)).abs() <= 1e-6);
    assert!(r.gap() > 0.1);
}

#[test]
fn step_against_exponential() {
    let f = TimeSignal::step(1.0).unwrap();
    let g = TimeSignal::exponential(6.0, 1.0).unwrap();
    let r = &convolution_gap(&f, &g, &[Complex64::new(2.0, 0.0)], DEFAULT_INTERVALS, 1e-6)
        .unwrap()
        .rows[0];
    assert!(r.full_error() <= 1e-6, "{}", r.full_error());
    assert!(r.gap() > 1e-2, "{}", r.gap());
}

#[test]
fn halving_the_step_shrinks_the_error() {
    // a smooth pair whose error is well above rounding at these grids
    let f = parse_signal("exp(3 t) cos(5 t)", 1.0).unwrap();
    let g = parse_signal("t^2 exp(-t)", 1.0).unwrap();
    let s = [Complex64::new(0.5, 2.0), Complex64::new(-1.0, -3.0)];
    let errors: Vec<Vec<f64>> = [2048, 4096, 8192]
        .iter()
        .map(|&m| {
            convolution_gap(&f, &g, &s, m, 1e-6)
                .unwrap()
                .rows
                .iter()
                .map(|r| r.full_error())
                .collect()
        })
        .collect();
    let floor = 1e-12;
    for w in errors.windows(2) {
        for (coarse, fine) in w[0].iter().zip(&w[1]) {
            assert!(*fine <= floor || coarse / fine >= 4.0, "{errors:?}");
        }
    }
}
