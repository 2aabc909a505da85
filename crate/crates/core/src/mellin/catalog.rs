//! Parametric families with closed-form Mellin transforms.
//!
//! The same catalog describes both the known error density `g` and the
//! synthetic targets `f` used by the simulation harness.

use crate::error::{Error, Result};
use crate::gamma::{ln_abs_gamma, ln_gamma};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Open interval of admissible development points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn above(lo: f64) -> Self {
        Self { lo, hi: f64::INFINITY }
    }

    pub fn below(hi: f64) -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Describes which bound `x` violates, or `None` if it is inside.
    pub fn violation(&self, x: f64) -> Option<String> {
        if !x.is_finite() {
            Some(format!("{x} is not finite"))
        } else if x <= self.lo {
            Some(format!("requires c > {}, got c = {x}", self.lo))
        } else if x >= self.hi {
            Some(format!("requires c < {}, got c = {x}", self.hi))
        } else {
            None
        }
    }
}

/// Known densities with analytic Mellin transforms.
///
/// `Beta { b }` is the density `b(1-x)^{b-1}` on `(0,1)`; `b = 1` is the
/// uniform error of multiplicative censoring and `b = 2` the triangular
/// density `2(1-x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    Beta { b: u32 },
    ScaledLogGamma { mu: f64, a: f64, lambda: f64 },
    Gamma { d: f64 },
    Weibull { m: f64 },
    Lognormal { mu: f64, lambda: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("parameter {name} must be positive and finite, got {v}")))
    }
}

impl ErrorModel {
    pub fn uniform() -> Self {
        ErrorModel::Beta { b: 1 }
    }

    pub fn exponential() -> Self {
        ErrorModel::Gamma { d: 1.0 }
    }

    /// Checks the parameter constraints of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ErrorModel::Beta { b } => {
                if b == 0 {
                    return Err(Error::domain("Beta parameter b must be a positive integer"));
                }
                Ok(())
            }
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                if !mu.is_finite() {
                    return Err(Error::domain("ScaledLogGamma mu must be finite"));
                }
                positive("a", a)?;
                positive("lambda", lambda)
            }
            ErrorModel::Gamma { d } => positive("d", d),
            ErrorModel::Weibull { m } => positive("m", m),
            ErrorModel::Lognormal { mu, lambda } => {
                if !mu.is_finite() {
                    return Err(Error::domain("Lognormal mu must be finite"));
                }
                positive("lambda", lambda)
            }
        }
    }

    /// Development points `c` for which `x^{c-1} g(x)` is integrable.
    pub fn admissible(&self) -> Interval {
        match *self {
            ErrorModel::Beta { .. } => Interval::above(0.0),
            ErrorModel::ScaledLogGamma { lambda, .. } => Interval::below(lambda + 1.0),
            ErrorModel::Gamma { d } => Interval::above(1.0 - d),
            ErrorModel::Weibull { m } => Interval::above(1.0 - m),
            ErrorModel::Lognormal { .. } => Interval::REAL_LINE,
        }
    }

    pub fn check_c(&self, c: f64) -> Result<()> {
        self.validate()?;
        match self.admissible().violation(c) {
            None => Ok(()),
            Some(msg) => Err(Error::domain(format!("{self}: {msg}"))),
        }
    }

    /// Support of the density as `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ErrorModel::Beta { .. } => (0.0, 1.0),
            ErrorModel::ScaledLogGamma { mu, .. } => (mu.exp(), f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Complex logarithm of the Mellin transform, without the domain check.
    /// Working in log space keeps super-smooth transforms representable far
    /// into the tails.
    pub(crate) fn ln_mellin_unchecked(&self, c: f64, t: f64) -> Complex64 {
        let s = Complex64::new(c - 1.0, t);
        match *self {
            ErrorModel::Beta { b } => (1..=b)
                .map(|j| {
                    let j = j as f64;
                    j.ln() - (s + j).ln()
                })
                .sum(),
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                let base = Complex64::new(lambda - c + 1.0, -t);
                a * lambda.ln() + mu * s - a * base.ln()
            }
            ErrorModel::Gamma { d } => ln_gamma(s + d) - ln_abs_gamma(Complex64::new(d, 0.0)),
            ErrorModel::Weibull { m } => ln_gamma(s / m + 1.0),
            ErrorModel::Lognormal { mu, lambda } => mu * s + lambda * lambda * s * s / 2.0,
        }
    }

    /// `ln M_c[g](t)` (complex logarithm), checked against the admissible range.
    pub fn ln_mellin(&self, c: f64, t: f64) -> Result<Complex64> {
        self.check_c(c)?;
        let v = self.ln_mellin_unchecked(c, t);
        if v.re.is_nan() || v.im.is_nan() || v.re == f64::INFINITY {
            return Err(Error::domain(format!("Mellin transform of {self} not finite at c={c}, t={t}")));
        }
        Ok(v)
    }

    /// `ln |M_c[g](t)|`.
    pub fn ln_abs_mellin(&self, c: f64, t: f64) -> Result<f64> {
        Ok(self.ln_mellin(c, t)?.re)
    }

    /// Closed-form Mellin transform `M_c[g](t)`.
    pub fn mellin(&self, c: f64, t: f64) -> Result<Complex64> {
        let v = self.ln_mellin(c, t)?.exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::domain(format!("Mellin transform of {self} overflows at t={t}")));
        }
        Ok(v)
    }

    /// Probability density at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || !x.is_finite() {
            return 0.0;
        }
        match *self {
            ErrorModel::Beta { b } => {
                if x >= 1.0 {
                    0.0
                } else {
                    b as f64 * (1.0 - x).powi(b as i32 - 1)
                }
            }
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                let z = x.ln() - mu;
                if z <= 0.0 {
                    return 0.0;
                }
                let ln_norm = a * lambda.ln() - ln_abs_gamma(Complex64::new(a, 0.0));
                (ln_norm + lambda * mu - (lambda + 1.0) * x.ln() + (a - 1.0) * z.ln()).exp()
            }
            ErrorModel::Gamma { d } => {
                let ln_norm = ln_abs_gamma(Complex64::new(d, 0.0));
                ((d - 1.0) * x.ln() - x - ln_norm).exp()
            }
            ErrorModel::Weibull { m } => m * x.powf(m - 1.0) * (-x.powf(m)).exp(),
            ErrorModel::Lognormal { mu, lambda } => {
                let z = (x.ln() - mu) / lambda;
                (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * lambda * x)
            }
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match *self {
            ErrorModel::Beta { b } => {
                if x >= 1.0 {
                    1.0
                } else {
                    1.0 - (1.0 - x).powi(b as i32)
                }
            }
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                let z = x.ln() - mu;
                if z <= 0.0 {
                    0.0
                } else {
                    statrs::function::gamma::gamma_lr(a, lambda * z)
                }
            }
            ErrorModel::Gamma { d } => statrs::function::gamma::gamma_lr(d, x),
            ErrorModel::Weibull { m } => -(-x.powf(m)).exp_m1(),
            ErrorModel::Lognormal { mu, lambda } => {
                let z = (x.ln() - mu) / lambda;
                0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
            }
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Laplace transform `E exp(-s X)` where a closed form is available.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("Laplace argument must be positive, got {s}")));
        }
        match *self {
            ErrorModel::Gamma { d } => Ok((1.0 + s).powf(-d)),
            ErrorModel::Beta { b } => Ok(beta_laplace(b, s)),
            _ => Err(Error::Unsupported(format!("no closed-form Laplace transform for {self}"))),
        }
    }

    /// `E X^r`, via the Mellin transform at `c = r + 1`, `t = 0`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        self.validate()?;
        if self.admissible().violation(r + 1.0).is_some() {
            return Err(Error::domain(format!("moment of order {r} of {self} diverges")));
        }
        Ok(self.ln_mellin_unchecked(r + 1.0, 0.0).re.exp())
    }

    /// Essential supremum of `x ↦ x^{2c-1} g(x)`; `f64::INFINITY` flags an
    /// unbounded product.
    pub fn weighted_sup(&self, c: f64) -> Result<f64> {
        self.check_c(c)?;
        let e = 2.0 * c - 1.0;
        let v = match *self {
            ErrorModel::Beta { b } => {
                let b = b as f64;
                if e < 0.0 {
                    f64::INFINITY
                } else if e == 0.0 || b == 1.0 {
                    // x^e (1-x)^{b-1} on (0,1): value b at x→0 when e=0,
                    // value 1 at x→1 when b=1
                    b
                } else {
                    let x = e / (e + b - 1.0);
                    b * x.powf(e) * (1.0 - x).powf(b - 1.0)
                }
            }
            ErrorModel::Gamma { d } => {
                let p = e + d - 1.0;
                let ln_gd = ln_abs_gamma(Complex64::new(d, 0.0));
                if p < 0.0 {
                    f64::INFINITY
                } else if p == 0.0 {
                    (-ln_gd).exp()
                } else {
                    (p * p.ln() - p - ln_gd).exp()
                }
            }
            ErrorModel::Weibull { m } => {
                let p = e + m - 1.0;
                if p < 0.0 {
                    f64::INFINITY
                } else if p == 0.0 {
                    m
                } else {
                    let q = p / m;
                    m * (q * q.ln() - q).exp()
                }
            }
            ErrorModel::Lognormal { mu, lambda } => {
                let w = 2.0 * c - 2.0;
                (w * mu + w * w * lambda * lambda / 2.0).exp() / ((2.0 * PI).sqrt() * lambda)
            }
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                // In z = ln x - mu: C e^{(2c-2-λ)(z+μ)} z^{a-1} e^{λμ}, z > 0.
                let beta = lambda + 2.0 - 2.0 * c;
                let ln_norm = a * lambda.ln() - ln_abs_gamma(Complex64::new(a, 0.0)) + lambda * mu;
                if a < 1.0 || beta < 0.0 || (beta == 0.0 && a > 1.0) {
                    f64::INFINITY
                } else if a == 1.0 {
                    (ln_norm - beta * mu).exp()
                } else {
                    let z = (a - 1.0) / beta;
                    (ln_norm - beta * (z + mu) + (a - 1.0) * z.ln()).exp()
                }
            }
        };
        Ok(v)
    }

    /// Draws one variate using the inverse CDF where it is explicit.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        match *self {
            ErrorModel::Beta { b } => -((-u).ln_1p() / b as f64).exp_m1(),
            ErrorModel::ScaledLogGamma { mu, a, lambda } => {
                let g = if a == 1.0 {
                    -u.ln()
                } else {
                    rand_distr::Gamma::new(a, 1.0)
                        .expect("validated shape")
                        .sample(rng)
                };
                (mu + g / lambda).exp()
            }
            ErrorModel::Gamma { d } => {
                if d == 1.0 {
                    -u.ln()
                } else {
                    rand_distr::Gamma::new(d, 1.0).expect("validated shape").sample(rng)
                }
            }
            ErrorModel::Weibull { m } => (-u.ln()).powf(1.0 / m),
            ErrorModel::Lognormal { mu, lambda } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + lambda * z).exp()
            }
        }
    }
}

/// `b ∫_0^1 (1-x)^{b-1} e^{-sx} dx`.
fn beta_laplace(b: u32, s: f64) -> f64 {
    if s >= b as f64 {
        // A_k = 1/s - (k/s) A_{k-1}, stable once s exceeds k.
        let mut a = -(-s).exp_m1() / s;
        for k in 1..b {
            a = 1.0 / s - (k as f64 / s) * a;
        }
        b as f64 * a
    } else {
        // Σ_k (-s)^k b! / (k+b)!
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut k = 0u32;
        while term.abs() > 1e-17 * sum.abs() {
            k += 1;
            term *= -s / (k + b) as f64;
            sum += term;
        }
        sum
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ErrorModel::Beta { b } => write!(f, "beta:{b}"),
            ErrorModel::ScaledLogGamma { mu, a, lambda } => write!(f, "loggamma:{mu}:{a}:{lambda}"),
            ErrorModel::Gamma { d } => write!(f, "gamma:{d}"),
            ErrorModel::Weibull { m } => write!(f, "weibull:{m}"),
            ErrorModel::Lognormal { mu, lambda } => write!(f, "lognormal:{mu}:{lambda}"),
        }
    }
}

impl FromStr for ErrorModel {
    type Err = Error;

    /// Parses `name:param[:param...]`, e.g. `beta:1`, `gamma:2.0`,
    /// `lognormal:0:1`, `weibull:1.5`, `loggamma:0:2:1`, `uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let params: Vec<f64> = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("cannot parse parameter '{p}' in error spec '{s}'")))
            })
            .collect::<Result<_>>()?;
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::input(format!(
                    "error spec '{s}': '{name}' takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let model = match name.as_str() {
            "uniform" => {
                arity(0)?;
                ErrorModel::uniform()
            }
            "beta" => {
                arity(1)?;
                let b = params[0];
                if b.fract() != 0.0 || b < 1.0 || b > u32::MAX as f64 {
                    return Err(Error::input(format!("beta parameter must be a positive integer, got {b}")));
                }
                ErrorModel::Beta { b: b as u32 }
            }
            "gamma" => {
                arity(1)?;
                ErrorModel::Gamma { d: params[0] }
            }
            "exp" | "exponential" => {
                arity(0)?;
                ErrorModel::exponential()
            }
            "weibull" => {
                arity(1)?;
                ErrorModel::Weibull { m: params[0] }
            }
            "lognormal" => {
                arity(2)?;
                ErrorModel::Lognormal {
                    mu: params[0],
                    lambda: params[1],
                }
            }
            "loggamma" | "scaled_log_gamma" | "pareto" => {
                if name == "pareto" {
                    arity(2)?;
                    ErrorModel::ScaledLogGamma {
                        mu: params[0],
                        a: 1.0,
                        lambda: params[1],
                    }
                } else {
                    arity(3)?;
                    ErrorModel::ScaledLogGamma {
                        mu: params[0],
                        a: params[1],
                        lambda: params[2],
                    }
                }
            }
            other => return Err(Error::input(format!("unknown error family '{other}'"))),
        };
        model.validate().map_err(|e| Error::input(e.to_string()))?;
        Ok(model)
    }
}
