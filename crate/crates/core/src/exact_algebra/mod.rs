//! Exact arithmetic over the Gaussian rationals Q(i) and one-variable rational functions.

mod parse;
mod poly;
mod rational;
mod scalar;

pub use parse::{parse_gaussian, parse_rational};
pub use poly::{horner, Poly};
pub use rational::{tame_symbol_value, RationalFunction, POLE_TOL};
pub use scalar::{two_pi_i_pow, GaussianRational, Scalar, TwistedInteger, TWO_PI_I};

/// Maximal polynomial degree accepted in numerators and denominators.
pub const DEGREE_CAP: usize = 32;
