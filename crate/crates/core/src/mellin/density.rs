use super::catalog::ErrorModel;
use super::transform::{mult_convolution, ConvolutionOptions};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_line, Tolerance};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability density on `(0, ∞)` given by an evaluator and a support
/// interval outside which it vanishes.
#[derive(Clone)]
pub struct DensityFn {
    name: String,
    support: (f64, f64),
    eval: Eval,
}

impl fmt::Debug for DensityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFn")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

/// Mass tolerance checked at construction.
pub const MASS_TOLERANCE: f64 = 1e-6;

impl DensityFn {
    /// Wraps `eval` and checks that it integrates to one over `support`.
    pub fn new<F>(name: impl Into<String>, support: (f64, f64), eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let density = Self::from_parts(name.into(), support, Arc::new(eval))?;
        let mass = density.mass()?;
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain(format!(
                "density '{}' integrates to {mass}, expected 1 within {MASS_TOLERANCE}",
                density.name
            )));
        }
        Ok(density)
    }

    fn from_parts(name: String, support: (f64, f64), eval: Eval) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::domain(format!("invalid support [{lo}, {hi}] for density '{name}'")));
        }
        Ok(Self { name, support, eval })
    }

    /// Catalog density. The closed form is trusted, so no mass check runs.
    pub fn from_model(model: &ErrorModel) -> Self {
        let m = *model;
        Self {
            name: m.to_string(),
            support: m.support(),
            eval: Arc::new(move |x| m.pdf(x)),
        }
    }

    /// Density of the product `X1·X2` of independent variables with
    /// densities `h1` and `h2`, evaluated by quadrature on demand.
    pub fn product(h1: &DensityFn, h2: &DensityFn) -> Result<Self> {
        let (a1, b1) = h1.support;
        let (a2, b2) = h2.support;
        let name = format!("({})*({})", h1.name, h2.name);
        let (p, q) = (h1.clone(), h2.clone());
        let opts = ConvolutionOptions::default();
        let eval: Eval = Arc::new(move |y| mult_convolution(&p, &q, y, opts).map(|v| v.value).unwrap_or(f64::NAN));
        let upper = if b1.is_finite() && b2.is_finite() { b1 * b2 } else { f64::INFINITY };
        let density = Self::from_parts(name, (a1 * a2, upper), eval)?;
        let mass = density.mass()?;
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain(format!("product density integrates to {mass}")));
        }
        Ok(density)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.support.0 || x >= self.support.1 {
            0.0
        } else {
            (self.eval)(x)
        }
    }

    /// Support in log coordinates `u = ln x`.
    pub(crate) fn log_support(&self) -> (f64, f64) {
        let (lo, hi) = self.support;
        let ulo = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
        (ulo, hi.ln())
    }

    /// A point in log coordinates from which tail marching starts.
    pub(crate) fn log_anchor(&self) -> f64 {
        let (ulo, uhi) = self.log_support();
        match (ulo.is_finite(), uhi.is_finite()) {
            (true, true) => 0.5 * (ulo + uhi),
            (true, false) => ulo + 1.0,
            (false, true) => uhi - 1.0,
            (false, false) => 0.0,
        }
    }

    fn mass(&self) -> Result<f64> {
        let (ulo, uhi) = self.log_support();
        let est = integrate_line(
            |u| {
                let x = u.exp();
                Complex64::new(self.eval(x) * x, 0.0)
            },
            ulo,
            uhi,
            self.log_anchor(),
            1.0,
            Tolerance::new(1e-10, 1e-10),
            1e-14,
        )?;
        Ok(est.value.re)
    }
}
