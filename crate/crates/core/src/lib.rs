//! Estimation of linear functionals of a positive random variable's density
//! from samples contaminated by an independent multiplicative error
//! `Y = X·U`, using empirical Mellin transforms with a spectral cut-off and a
//! data-driven Goldenshluger–Lepski choice of the cut-off.

pub mod adaptive;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod functionals;
pub mod gamma;
pub mod mellin;
pub mod quadrature;
pub mod simulation;

pub use error::{Error, Result};
