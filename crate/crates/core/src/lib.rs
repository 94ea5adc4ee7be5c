//! Finite Laplace transform toolkit.
//!
//! Transforms of exponential-polynomial-trigonometric signals on a finite
//! horizon `[0, T]` are entire functions of `s`. This crate builds them in
//! closed form, evaluates them everywhere (including at removable
//! singularities), inverts them through their Maclaurin coefficients and a
//! moment matrix, resolves terminal values of linear ODE chains by enforcing
//! analyticity, and measures how the convolution theorem fails on `[0, T]`.

pub mod convolution;
pub mod error;
pub mod flt;
pub mod inverse;
mod lex;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod signal;
pub mod terminal;

pub use convolution::{convolution_gap, convolve, GapReport, GapRow, SampledSignal};
pub use error::{Error, Result};
pub use flt::{
    contour_integral, flt_of_signal, parse_flt, residue_counterexample, verify_entire, DelayedTerm,
    EntireReport, FltExpr, RootCheck, TaylorCoeffs,
};
pub use nalgebra::DMatrix;
pub use num_complex::Complex64;
pub use inverse::{
    condition_report, invert_flt, normalized_samples, MomentMatrix, PolynomialSignal,
};
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use signal::{parse_signal, Kind, Term, TimeSignal};
pub use terminal::{
    cascade, design_run, design_sweep, ode_oracle, solve_terminal, system_function, terminal_conditions,
    DesignRun, LinearSystem, StateSpace, SweepRow, SymbolicResponse, TerminalSystem,
};
