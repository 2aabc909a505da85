//! Decay envelopes of Mellin transforms: polynomial (smooth) and
//! exponential (super-smooth) classes with fitted bracketing constants.

use super::catalog::ErrorModel;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum DecayShape {
    /// `(1+t²)^{-γ/2}`
    Smooth { gamma: f64 },
    /// `(1+t²)^{-γ/2} exp(-λ|t|^ρ)`
    SuperSmooth { gamma: f64, lambda: f64, rho: f64 },
}

impl DecayShape {
    pub fn gamma(&self) -> f64 {
        match *self {
            DecayShape::Smooth { gamma } | DecayShape::SuperSmooth { gamma, .. } => gamma,
        }
    }

    pub fn ln_envelope(&self, t: f64) -> f64 {
        let poly = -0.5 * self.gamma() * (t * t).ln_1p();
        match *self {
            DecayShape::Smooth { .. } => poly,
            DecayShape::SuperSmooth { lambda, rho, .. } => poly - lambda * t.abs().powf(rho),
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.ln_envelope(t).exp()
    }
}

/// A decay shape together with constants `c_low ≤ c_up` such that
/// `c_low·env(t) ≤ |M(t)| ≤ c_up·env(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayClass {
    pub shape: DecayShape,
    pub c_low: f64,
    pub c_up: f64,
}

/// Sampling window used when fitting bracketing constants.
pub const FIT_WINDOW: f64 = 200.0;
const FIT_POINTS: usize = 8001;
/// Relative widening applied to the sampled extremes.
const FIT_MARGIN: f64 = 1e-3;

impl DecayClass {
    /// Fits `c_low`, `c_up` by sampling `ln|M(t)| - ln env(t)` on `[0, 200]`.
    pub fn fit<F: Fn(f64) -> f64>(shape: DecayShape, ln_abs: F) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..FIT_POINTS {
            let t = FIT_WINDOW * i as f64 / (FIT_POINTS - 1) as f64;
            let r = ln_abs(t) - shape.ln_envelope(t);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Self {
            shape,
            c_low: lo.exp() * (1.0 - FIT_MARGIN),
            c_up: hi.exp() * (1.0 + FIT_MARGIN),
        }
    }

    pub fn exact(shape: DecayShape) -> Self {
        Self {
            shape,
            c_low: 1.0,
            c_up: 1.0,
        }
    }

    pub fn upper(&self, t: f64) -> f64 {
        self.c_up * self.shape.envelope(t)
    }

    pub fn lower(&self, t: f64) -> f64 {
        self.c_low * self.shape.envelope(t)
    }

    /// Smallest `T` (capped at `1e5`) with `env(T) < tol·env(0)`.
    pub fn truncation_point(&self, tol: f64) -> f64 {
        const CAP: f64 = 1e5;
        let target = tol.ln() + self.shape.ln_envelope(0.0);
        if self.shape.ln_envelope(CAP) >= target {
            return CAP;
        }
        let (mut a, mut b) = (0.0, CAP);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.shape.ln_envelope(m) < target {
                b = m;
            } else {
                a = m;
            }
        }
        b
    }
}

/// Decay class of the catalog transform `M_c[g]`.
///
/// Polynomial exponents follow Stirling's formula
/// `|Γ(x+it)| ~ √(2π)|t|^{x-1/2} e^{-π|t|/2}`.
pub fn decay_class_g(model: &ErrorModel, c: f64) -> Result<DecayClass> {
    model.check_c(c)?;
    let shape = match *model {
        ErrorModel::Beta { b } => DecayShape::Smooth { gamma: b as f64 },
        ErrorModel::ScaledLogGamma { a, .. } => DecayShape::Smooth { gamma: a },
        ErrorModel::Gamma { d } => DecayShape::SuperSmooth {
            gamma: -(c + d - 1.5),
            lambda: PI / 2.0,
            rho: 1.0,
        },
        ErrorModel::Weibull { m } => DecayShape::SuperSmooth {
            gamma: -(2.0 * c - 2.0 + m) / (2.0 * m),
            lambda: PI / (2.0 * m),
            rho: 1.0,
        },
        ErrorModel::Lognormal { lambda, .. } => DecayShape::SuperSmooth {
            gamma: 0.0,
            lambda: lambda * lambda / 2.0,
            rho: 2.0,
        },
    };
    Ok(DecayClass::fit(shape, |t| model.ln_mellin_unchecked(c, t).re))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        let d = decay_class_g(&ErrorModel::Beta { b: 2 }, 0.7).unwrap();
        assert_eq!(d.shape, DecayShape::Smooth { gamma: 2.0 });
        let d = decay_class_g(&ErrorModel::Lognormal { mu: 0.0, lambda: 1.0 }, 1.0).unwrap();
        assert_eq!(
            d.shape,
            DecayShape::SuperSmooth {
                gamma: 0.0,
                lambda: 0.5,
                rho: 2.0
            }
        );
        let d = decay_class_g(&ErrorModel::Gamma { d: 1.0 }, 1.0).unwrap();
        assert_eq!(
            d.shape,
            DecayShape::SuperSmooth {
                gamma: -0.5,
                lambda: PI / 2.0,
                rho: 1.0
            }
        );
    }

    #[test]
    fn weibull_one_coincides_with_exponential() {
        for &c in &[0.4, 1.0, 2.2] {
            let w = decay_class_g(&ErrorModel::Weibull { m: 1.0 }, c).unwrap();
            let g = decay_class_g(&ErrorModel::Gamma { d: 1.0 }, c).unwrap();
            match (w.shape, g.shape) {
                (
                    DecayShape::SuperSmooth { gamma: a, lambda: l1, rho: r1 },
                    DecayShape::SuperSmooth { gamma: b, lambda: l2, rho: r2 },
                ) => {
                    assert!((a - b).abs() < 1e-14 && (l1 - l2).abs() < 1e-14 && r1 == r2);
                }
                other => panic!("unexpected shapes {other:?}"),
            }
        }
    }

    #[test]
    fn envelopes_bracket_on_off_grid_points() {
        let models = [
            (ErrorModel::Beta { b: 1 }, 1.0),
            (ErrorModel::Beta { b: 3 }, 0.5),
            (ErrorModel::ScaledLogGamma { mu: 0.3, a: 1.5, lambda: 2.0 }, 1.0),
            (ErrorModel::Gamma { d: 2.0 }, 1.0),
            (ErrorModel::Weibull { m: 1.5 }, 0.8),
            (ErrorModel::Weibull { m: 0.7 }, 1.2),
            (ErrorModel::Lognormal { mu: 0.1, lambda: 0.6 }, 1.0),
        ];
        for (m, c) in models {
            let d = decay_class_g(&m, c).unwrap();
            assert!(d.c_low <= d.c_up);
            for i in 0..2000 {
                let t = 0.0123 + 0.09991 * i as f64;
                let v = m.ln_abs_mellin(c, t).unwrap();
                let env = d.shape.ln_envelope(t);
                assert!(v >= d.c_low.ln() + env - 1e-12, "{m} lower at t={t}");
                assert!(v <= d.c_up.ln() + env + 1e-12, "{m} upper at t={t}");
            }
            // the polynomial exponent is right when the ratio flattens out
            let r1 = m.ln_abs_mellin(c, 100.0).unwrap() - d.shape.ln_envelope(100.0);
            let r2 = m.ln_abs_mellin(c, 200.0).unwrap() - d.shape.ln_envelope(200.0);
            assert!((r1 - r2).abs() < 0.05, "{m}: ratio drifts {r1} -> {r2}");
        }
    }

    #[test]
    fn truncation_point_reaches_tolerance() {
        let d = DecayClass::exact(DecayShape::Smooth { gamma: 1.0 });
        let t = d.truncation_point(1e-3);
        assert!((d.shape.envelope(t) - 1e-3).abs() < 1e-9);
        let d = DecayClass::exact(DecayShape::Smooth { gamma: 0.0 });
        assert_eq!(d.truncation_point(1e-3), 1e5);
    }
}
