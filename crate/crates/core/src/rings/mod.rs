//! Exact coefficient arithmetic: rationals, multivariate polynomials and
//! z-truncated series.

mod poly;
mod rational;
mod series;

pub use poly::{Generator, Monomial, Polynomial};
pub(crate) use poly::missing;
pub use rational::{binomial, factorial, Rational};
pub use series::{bell_sequence, xi_derivative, ZSeries};
