//! Mellin-transform machinery: the analytic catalog of error densities,
//! numeric forward/inverse transforms, multiplicative convolution and the
//! error-density metadata used by the estimator.

mod catalog;
mod decay;
mod density;
mod transform;

pub use catalog::{ErrorModel, Interval};
pub use decay::{decay_class_g, DecayClass, DecayShape};
pub use density::DensityFn;
pub use transform::{
    analytic_mellin, check_hermitian, inverse_mellin, mult_convolution, numeric_mellin, numeric_mellin_with,
    sobolev_integral, ConvolutionOptions, ConvolutionValue, MellinEstimate, MellinOptions,
};

use crate::error::Result;

/// `E(U^r)` for the error variable `U`.
pub fn error_moment(model: &ErrorModel, r: f64) -> Result<f64> {
    model.moment(r)
}

/// `sup_x x^{2c-1} g(x)`; `f64::INFINITY` when unbounded.
pub fn g_weighted_sup(model: &ErrorModel, c: f64) -> Result<f64> {
    model.weighted_sup(c)
}
