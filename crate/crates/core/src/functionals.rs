//! Target functionals `θ(f) = (1/2π) ∫ Ψ(-t) M_c[f](t) dt` and their
//! kernels `Ψ`: point evaluation of the density, the c.d.f., the survival
//! function and the Laplace transform, plus caller-supplied kernels.

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::mellin::{check_hermitian, DecayShape, ErrorModel, Interval};
use crate::quadrature::{integrate, Tolerance};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Decay of `|Ψ|`: polynomial `(1+t²)^{-p/2}` or additionally
/// `exp(-μ|t|^R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum PsiDecay {
    Psi1 { p: f64 },
    Psi2 { p: f64, mu: f64, r: f64 },
}

impl PsiDecay {
    pub fn p(&self) -> f64 {
        match *self {
            PsiDecay::Psi1 { p } | PsiDecay::Psi2 { p, .. } => p,
        }
    }

    pub fn ln_envelope(&self, t: f64) -> f64 {
        let poly = -0.5 * self.p() * (t * t).ln_1p();
        match *self {
            PsiDecay::Psi1 { .. } => poly,
            PsiDecay::Psi2 { mu, r, .. } => poly - mu * t.abs().powf(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Parametric,
    Nonparametric,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Parametric => f.write_str("parametric"),
            Regime::Nonparametric => f.write_str("nonparametric"),
        }
    }
}

type PsiFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A caller-supplied kernel with its declared decay and admissible `c`.
#[derive(Clone)]
pub struct CustomPsi {
    name: String,
    psi: PsiFn,
    decay: PsiDecay,
    constraint: Interval,
}

impl CustomPsi {
    /// Checks `conj(Ψ(t)) = Ψ(-t)` on a sample of points before accepting.
    pub fn new<F>(name: impl Into<String>, psi: F, decay: PsiDecay, constraint: Interval) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        check_hermitian(&psi, 50.0, 1e-10)?;
        Ok(Self {
            name: name.into(),
            psi: Arc::new(psi),
            decay,
            constraint,
        })
    }
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalSpec {
    Density {
        x0: f64,
    },
    Cdf {
        x0: f64,
    },
    Survival {
        x0: f64,
    },
    Laplace {
        x0: f64,
    },
    #[serde(skip)]
    Custom(CustomPsi),
}

impl fmt::Debug for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalSpec::Custom(c) => write!(f, "Custom({})", c.name),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalSpec::Density { x0 } => write!(f, "density({x0})"),
            FunctionalSpec::Cdf { x0 } => write!(f, "cdf({x0})"),
            FunctionalSpec::Survival { x0 } => write!(f, "survival({x0})"),
            FunctionalSpec::Laplace { x0 } => write!(f, "laplace({x0})"),
            FunctionalSpec::Custom(c) => write!(f, "custom({})", c.name),
        }
    }
}

fn check_point(x0: f64) -> Result<()> {
    if x0.is_finite() && x0 > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("evaluation point x0 must be positive and finite, got {x0}")))
    }
}

impl FunctionalSpec {
    pub fn density(x0: f64) -> Result<Self> {
        check_point(x0)?;
        Ok(FunctionalSpec::Density { x0 })
    }

    pub fn cdf(x0: f64) -> Result<Self> {
        check_point(x0)?;
        Ok(FunctionalSpec::Cdf { x0 })
    }

    pub fn survival(x0: f64) -> Result<Self> {
        check_point(x0)?;
        Ok(FunctionalSpec::Survival { x0 })
    }

    pub fn laplace(x0: f64) -> Result<Self> {
        check_point(x0)?;
        Ok(FunctionalSpec::Laplace { x0 })
    }

    /// Builds a named kind, as used by the command line.
    pub fn from_name(name: &str, x0: f64) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "density" => Self::density(x0),
            "cdf" => Self::cdf(x0),
            "survival" => Self::survival(x0),
            "laplace" => Self::laplace(x0),
            other => Err(Error::input(format!("unknown functional '{other}'"))),
        }
    }

    /// Re-checks invariants of a deserialized value.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FunctionalSpec::Density { x0 }
            | FunctionalSpec::Cdf { x0 }
            | FunctionalSpec::Survival { x0 }
            | FunctionalSpec::Laplace { x0 } => check_point(x0),
            FunctionalSpec::Custom(_) => Ok(()),
        }
    }

    /// Development points for which `Ψ` represents the functional.
    ///
    /// Point evaluation of the density additionally needs `M_c[f]`
    /// integrable; that depends on `f` and is left to the caller.
    pub fn c_constraint(&self) -> Interval {
        match self {
            FunctionalSpec::Density { .. } => Interval::REAL_LINE,
            FunctionalSpec::Cdf { .. } | FunctionalSpec::Laplace { .. } => Interval::below(1.0),
            FunctionalSpec::Survival { .. } => Interval::above(1.0),
            FunctionalSpec::Custom(c) => c.constraint,
        }
    }

    pub fn check_c(&self, c: f64) -> Result<()> {
        self.validate()?;
        match self.c_constraint().violation(c) {
            None => Ok(()),
            Some(msg) => Err(Error::domain(format!("{self}: {msg}"))),
        }
    }

    /// `ln Ψ(t)` without the constraint check; used in the estimator's
    /// inner loops where super-smooth kernels would underflow.
    pub(crate) fn ln_psi_unchecked(&self, c: f64, t: f64) -> Complex64 {
        let s = Complex64::new(1.0 - c, t);
        match self {
            FunctionalSpec::Density { x0 } => Complex64::new(-c, t) * x0.ln(),
            FunctionalSpec::Cdf { x0 } => s * x0.ln() - s.ln(),
            FunctionalSpec::Survival { x0 } => s * x0.ln() - s.ln() + Complex64::new(0.0, PI),
            FunctionalSpec::Laplace { x0 } => -s * x0.ln() + ln_gamma(s),
            FunctionalSpec::Custom(cp) => (cp.psi)(t).ln(),
        }
    }

    pub fn ln_psi(&self, c: f64, t: f64) -> Result<Complex64> {
        self.check_c(c)?;
        Ok(self.ln_psi_unchecked(c, t))
    }

    /// `Ψ(t)` at development point `c`.
    pub fn psi(&self, c: f64, t: f64) -> Result<Complex64> {
        self.check_c(c)?;
        if let FunctionalSpec::Custom(cp) = self {
            return Ok((cp.psi)(t));
        }
        Ok(self.ln_psi_unchecked(c, t).exp())
    }

    /// Decay class of `|Ψ|` at `c`.
    ///
    /// For the Laplace kernel, `|Γ(1-c+it)| ~ √(2π)|t|^{1/2-c}e^{-π|t|/2}`
    /// gives `p = c - 1/2`.
    pub fn decay(&self, c: f64) -> PsiDecay {
        match self {
            FunctionalSpec::Density { .. } => PsiDecay::Psi1 { p: 0.0 },
            FunctionalSpec::Cdf { .. } | FunctionalSpec::Survival { .. } => PsiDecay::Psi1 { p: 1.0 },
            FunctionalSpec::Laplace { .. } => PsiDecay::Psi2 {
                p: c - 0.5,
                mu: PI / 2.0,
                r: 1.0,
            },
            FunctionalSpec::Custom(cp) => cp.decay,
        }
    }

    /// Ground truth `θ(f)` for a catalog target.
    pub fn true_value(&self, target: &ErrorModel) -> Result<f64> {
        match *self {
            FunctionalSpec::Density { x0 } => Ok(target.pdf(x0)),
            FunctionalSpec::Cdf { x0 } => Ok(target.cdf(x0)),
            FunctionalSpec::Survival { x0 } => Ok(1.0 - target.cdf(x0)),
            FunctionalSpec::Laplace { x0 } => target.laplace(x0),
            FunctionalSpec::Custom(_) => Err(Error::Unsupported(
                "no closed-form value for a custom functional".into(),
            )),
        }
    }

    /// `θ_k(f) = (1/2π) ∫_{-k}^{k} Ψ(-t) M_c[f](t) dt` for a catalog target,
    /// the expectation of the cut-off estimator at `k`.
    pub fn truncated_value(&self, target: &ErrorModel, c: f64, k: f64) -> Result<f64> {
        self.check_c(c)?;
        target.check_c(c)?;
        if k <= 0.0 {
            return Ok(0.0);
        }
        let freq = match self {
            FunctionalSpec::Density { x0 }
            | FunctionalSpec::Cdf { x0 }
            | FunctionalSpec::Survival { x0 }
            | FunctionalSpec::Laplace { x0 } => x0.ln().abs(),
            FunctionalSpec::Custom(_) => 0.0,
        };
        let tol = Tolerance::new(1e-13, 1e-12).resolving_frequency(freq).with_max_panel(1.0);
        let est = integrate(
            |t| {
                let ln = self.ln_psi_unchecked(c, -t) + target.ln_mellin_unchecked(c, t);
                ln.exp()
            },
            0.0,
            k,
            tol,
        )?;
        Ok(est.value.re / PI)
    }
}

/// Parametric versus nonparametric behaviour of `Δ_{Ψ,g}`: the former when
/// `|Ψ/M_c[g]|²` is integrable over the whole line.
pub fn regime_classify(psi: &PsiDecay, g: &DecayShape) -> Regime {
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let parametric = match (*psi, *g) {
        (PsiDecay::Psi1 { p }, DecayShape::Smooth { gamma }) => 2.0 * p - 2.0 * gamma > 1.0,
        (PsiDecay::Psi1 { .. }, DecayShape::SuperSmooth { .. }) => false,
        (PsiDecay::Psi2 { .. }, DecayShape::Smooth { .. }) => true,
        (PsiDecay::Psi2 { p, mu, r }, DecayShape::SuperSmooth { gamma, lambda, rho }) => {
            if same(r, rho) {
                if same(mu, lambda) {
                    2.0 * p - 2.0 * gamma > 1.0
                } else {
                    mu > lambda
                }
            } else {
                r > rho
            }
        }
    };
    if parametric {
        Regime::Parametric
    } else {
        Regime::Nonparametric
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;
    use approx::assert_relative_eq;

    fn all(x0: f64) -> Vec<(FunctionalSpec, f64)> {
        vec![
            (FunctionalSpec::density(x0).unwrap(), 1.0),
            (FunctionalSpec::cdf(x0).unwrap(), 0.4),
            (FunctionalSpec::survival(x0).unwrap(), 1.6),
            (FunctionalSpec::laplace(x0).unwrap(), 0.3),
        ]
    }

    #[test]
    fn kernel_examples() {
        let one = Complex64::new(1.0, 0.0);
        let d = FunctionalSpec::density(1.0).unwrap();
        for &t in &[-3.0, 0.0, 7.5] {
            assert!((d.psi(1.0, t).unwrap() - one).norm() < 1e-15);
        }
        assert!((FunctionalSpec::cdf(1.0).unwrap().psi(0.0, 0.0).unwrap() - one).norm() < 1e-15);
        assert!((FunctionalSpec::survival(1.0).unwrap().psi(2.0, 0.0).unwrap() - one).norm() < 1e-15);
        assert!((FunctionalSpec::laplace(1.0).unwrap().psi(0.0, 0.0).unwrap() - one).norm() < 1e-14);
    }

    #[test]
    fn kernels_match_direct_formulas() {
        let (x0, c, t) = (2.3, 0.4, 1.7);
        let s = Complex64::new(1.0 - c, t);
        let xs = Complex64::new(x0, 0.0);
        let cdf = xs.powc(s) / s;
        assert!((FunctionalSpec::cdf(x0).unwrap().psi(c, t).unwrap() - cdf).norm() < 1e-13);
        let lap = xs.powc(-s) * gamma(s);
        assert!((FunctionalSpec::laplace(x0).unwrap().psi(c, t).unwrap() - lap).norm() < 1e-13);
        let dens = xs.powc(Complex64::new(-1.3, t));
        assert!((FunctionalSpec::density(x0).unwrap().psi(1.3, t).unwrap() - dens).norm() < 1e-13);
    }

    #[test]
    fn constraints() {
        assert!(FunctionalSpec::cdf(1.0).unwrap().psi(1.0, 0.0).is_err());
        assert!(FunctionalSpec::laplace(1.0).unwrap().psi(1.5, 0.0).is_err());
        assert!(FunctionalSpec::survival(1.0).unwrap().psi(1.0, 0.0).is_err());
        assert!(FunctionalSpec::density(1.0).unwrap().psi(-3.0, 0.0).is_ok());
        for name in ["density", "cdf", "survival", "laplace"] {
            assert!(FunctionalSpec::from_name(name, 0.0).is_err());
            assert!(FunctionalSpec::from_name(name, -1.0).is_err());
        }
    }

    #[test]
    fn hermitian_symmetry() {
        for (spec, c) in all(1.7) {
            for i in 0..=200 {
                let t = -50.0 + 0.5 * i as f64;
                let a = spec.psi(c, t).unwrap();
                let b = spec.psi(c, -t).unwrap();
                assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1e-300), "{spec} t={t}");
            }
        }
    }

    #[test]
    fn decay_examples() {
        assert_eq!(FunctionalSpec::density(2.0).unwrap().decay(1.0), PsiDecay::Psi1 { p: 0.0 });
        assert_eq!(FunctionalSpec::survival(2.0).unwrap().decay(2.0), PsiDecay::Psi1 { p: 1.0 });
        assert_eq!(
            FunctionalSpec::laplace(1.0).unwrap().decay(0.0),
            PsiDecay::Psi2 {
                p: -0.5,
                mu: PI / 2.0,
                r: 1.0
            }
        );
    }

    #[test]
    fn envelope_ratio_is_stable() {
        for (spec, c) in all(1.3) {
            let decay = spec.decay(c);
            let ratio = |t: f64| spec.ln_psi(c, t).unwrap().re - decay.ln_envelope(t);
            // constants fitted on [1, 200], then checked for stability
            let samples: Vec<f64> = (0..=400).map(|i| ratio(1.0 + 199.0 * i as f64 / 400.0)).collect();
            let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for i in 0..100 {
                let r = ratio(100.0 + 1.01 * i as f64);
                assert!(r >= lo - 0.05 && r <= hi + 0.05, "{spec}");
            }
            // the tail ratio settles within 5%
            assert!((ratio(150.0) - ratio(200.0)).abs() < 0.05, "{spec}");
        }
    }

    #[test]
    fn regime_examples() {
        let np = Regime::Nonparametric;
        assert_eq!(
            regime_classify(&PsiDecay::Psi1 { p: 1.0 }, &DecayShape::Smooth { gamma: 1.0 }),
            np
        );
        assert_eq!(
            regime_classify(
                &PsiDecay::Psi2 {
                    p: 1.0,
                    mu: PI / 2.0,
                    r: 1.0
                },
                &DecayShape::Smooth { gamma: 2.0 }
            ),
            Regime::Parametric
        );
        assert_eq!(
            regime_classify(&PsiDecay::Psi1 { p: 0.0 }, &DecayShape::Smooth { gamma: 1.0 }),
            np
        );
        assert_eq!(
            regime_classify(&PsiDecay::Psi1 { p: 1.0 }, &DecayShape::Smooth { gamma: 0.2 }),
            Regime::Parametric
        );
        let ss = DecayShape::SuperSmooth {
            gamma: 0.0,
            lambda: 0.5,
            rho: 2.0,
        };
        assert_eq!(regime_classify(&PsiDecay::Psi1 { p: 5.0 }, &ss), np);
        let lap = PsiDecay::Psi2 {
            p: 0.0,
            mu: PI / 2.0,
            r: 1.0,
        };
        assert_eq!(regime_classify(&lap, &ss), np);
    }

    #[test]
    fn true_values() {
        let e = ErrorModel::exponential();
        assert_relative_eq!(FunctionalSpec::density(1.0).unwrap().true_value(&e).unwrap(), (-1f64).exp());
        assert_relative_eq!(
            FunctionalSpec::survival(1.0).unwrap().true_value(&e).unwrap(),
            (-1f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(FunctionalSpec::laplace(1.0).unwrap().true_value(&e).unwrap(), 0.5);
        for target in [e, ErrorModel::Beta { b: 2 }, ErrorModel::Lognormal { mu: 0.2, lambda: 0.7 }] {
            for &x0 in &[0.3, 1.0, 2.5] {
                let s = FunctionalSpec::survival(x0).unwrap().true_value(&target).unwrap();
                let f = FunctionalSpec::cdf(x0).unwrap().true_value(&target).unwrap();
                assert_eq!(s + f, 1.0);
            }
        }
    }

    #[test]
    fn truncated_value_converges_to_cdf() {
        // c = 1/2, x0 = 1, Exp(1): (1/2π)∫_{-200}^{200} Ψ(-t) Γ(1/2+it) dt ≈ 1 - 1/e
        let spec = FunctionalSpec::cdf(1.0).unwrap();
        let v = spec.truncated_value(&ErrorModel::exponential(), 0.5, 200.0).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 2e-2, "{v}");
    }

    #[test]
    fn custom_kernel_must_be_hermitian() {
        let ok = CustomPsi::new(
            "cos",
            |t: f64| Complex64::new((t).cos() / (1.0 + t * t), 0.0),
            PsiDecay::Psi1 { p: 2.0 },
            Interval::REAL_LINE,
        );
        assert!(ok.is_ok());
        let bad = CustomPsi::new(
            "odd",
            |t: f64| Complex64::new(t, 0.0),
            PsiDecay::Psi1 { p: -1.0 },
            Interval::REAL_LINE,
        );
        assert!(matches!(bad, Err(Error::Contract(_))));
        let spec = FunctionalSpec::Custom(ok.unwrap());
        assert_eq!(spec.decay(0.3), PsiDecay::Psi1 { p: 2.0 });
        assert!(spec.true_value(&ErrorModel::uniform()).is_err());
    }
}
