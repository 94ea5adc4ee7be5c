//! Fixtures shared by the criterion benches.

use finlap::{parse_signal, TimeSignal};

/// The exponential used throughout the inversion tables: `e^{6t}` on `[0, 1]`.
pub fn table_exponential() -> TimeSignal {
    TimeSignal::exponential(6.0, 1.0).expect("valid horizon")
}

/// A signal mixing every term kind.
pub fn mixed_signal() -> TimeSignal {
    parse_signal("2 t exp(-t) cos(3 t) + t^2 sin(2 t) - 0.5 exp(4 t)", 1.5).expect("valid signal")
}
