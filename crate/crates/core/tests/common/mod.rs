#![allow(dead_code)]

use finlap::{parse_signal, Complex64, Kind, Term, TimeSignal};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const HORIZONS: [f64; 3] = [0.1, 1.0, 2.0];

/// Signals with known transform pairs, by source text.
pub const CORPUS: [&str; 12] = [
    "1",
    "t",
    "t^2",
    "exp(6 t)",
    "exp(-2 t)",
    "sin(3.14159 t)",
    "cos(2 t)",
    "t exp(-t)",
    "exp(-t) cos(3 t)",
    "2 t exp(-t) cos(3 t)",
    "t^2 sin(2 t) - 0.5 exp(4 t)",
    "t^4 exp(-10 t) + 3 sin(20 t)",
];

pub fn corpus() -> Vec<(String, TimeSignal)> {
    let mut out = Vec::new();
    for src in CORPUS {
        for t in HORIZONS {
            out.push((format!("{src} on [0, {t}]"), parse_signal(src, t).unwrap()));
        }
    }
    out
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform point in the disk `|s| <= radius`.
pub fn random_s(rng: &mut StdRng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

pub fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

pub fn term() -> impl Strategy<Value = Term> {
    (
        -3.0..3.0f64,
        0u32..=4,
        -10.0..10.0f64,
        0.0..20.0f64,
        prop_oneof![Just(Kind::Const), Just(Kind::Cos), Just(Kind::Sin)],
    )
        .prop_map(|(a, m, sigma, omega, kind)| Term::new(a, m, sigma, omega, kind))
}

pub fn horizon() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(1.0), Just(2.0)]
}

pub fn signal() -> impl Strategy<Value = TimeSignal> {
    (prop::collection::vec(term(), 1..4), horizon())
        .prop_map(|(terms, t)| TimeSignal::new(terms, t).unwrap())
}

pub fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| Complex64::new(re, im))
}
