mod common;

use common::corpus;
use finlap::quad::adaptive_simpson_rel;
use finlap::TimeSignal;
use proptest::prelude::*;

fn quadrature_moment(f: &TimeSignal, n: u32) -> f64 {
    adaptive_simpson_rel(
        |t| finlap::Complex64::new(t.powi(n as i32) * f.eval(t).unwrap(), 0.0),
        0.0,
        f.horizon(),
        1e-13,
    )
    .re
}

fn abs_moment(f: &TimeSignal, n: u32) -> f64 {
    f.terms()
        .iter()
        .map(|term| {
            adaptive_simpson_rel(
                |t| finlap::Complex64::new(t.powi(n as i32) * term.value(t).abs(), 0.0),
                0.0,
                f.horizon(),
                1e-10,
            )
            .re
        })
        .sum()
}

#[test]
fn corpus_moments_match_quadrature() {
    for (name, f) in corpus() {
        for n in 0..=6 {
            let got = f.moment(n);
            let want = quadrature_moment(&f, n);
            let scale = want.abs().max(abs_moment(&f, n));
            assert!((got - want).abs() <= 1e-10 * scale, "{name}, n = {n}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_quadrature(f in common::signal(), n in 0u32..=6) {
        let got = f.moment(n);
        let want = quadrature_moment(&f, n);
        // oscillating terms can cancel, so measure against the moment of |terms|
        let scale = want.abs().max(abs_moment(&f, n));
        prop_assert!((got - want).abs() <= 1e-10 * scale, "{got} vs {want}");
    }

    #[test]
    fn moment_is_linear(
        terms in prop::collection::vec(common::term(), 1..4),
        others in prop::collection::vec(common::term(), 1..4),
        t in common::horizon(),
        alpha in -3.0..3.0f64,
        beta in -3.0..3.0f64,
        n in 0u32..=8,
    ) {
        let f = TimeSignal::new(terms, t).unwrap();
        let g = TimeSignal::new(others, t).unwrap();
        let combo = f.scale(alpha).add(&g.scale(beta)).unwrap();
        let want = alpha * f.moment(n) + beta * g.moment(n);
        let scale = (alpha * f.moment(n)).abs() + (beta * g.moment(n)).abs();
        prop_assert!((combo.moment(n) - want).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }
}
