use super::montecarlo::{mc_mse, McReport};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::estimator::regime_of;
use crate::functionals::Regime;
use crate::mellin::{decay_class_g, sobolev_integral, DecayClass, DecayShape, ErrorModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// `n^{1/(2s+2γ)}`.
pub fn theoretical_cutoff(s: f64, gamma: f64, n: u64) -> f64 {
    (n as f64).powf(1.0 / (2.0 * s + 2.0 * gamma))
}

/// Exponent of the risk in `n`: `-1` in the parametric regime, otherwise
/// `-(2s+2p-1)/(2s+2γ)`.
pub fn theory_slope(s: f64, p: f64, gamma: f64, regime: Regime) -> f64 {
    match regime {
        Regime::Parametric => -1.0,
        Regime::Nonparametric => -(2.0 * s + 2.0 * p - 1.0) / (2.0 * s + 2.0 * gamma),
    }
}

/// `‖(1+t²)^{s/2} M‖_{L²}`, infinite when the decay class makes it diverge.
pub fn sobolev_seminorm<H: Fn(f64) -> Complex64>(mellin_of_f: H, decay: &DecayClass, s: f64) -> Result<f64> {
    Ok(sobolev_integral(mellin_of_f, decay, s, 1e-6)?.sqrt())
}

/// [`sobolev_seminorm`] of a catalog density at `c`.
pub fn target_sobolev_seminorm(target: &ErrorModel, c: f64, s: f64) -> Result<f64> {
    let decay = decay_class_g(target, c)?;
    sobolev_seminorm(|t| target.ln_mellin_unchecked(c, t).exp(), &decay, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope.
    pub slope_ci: [f64; 2],
}

/// Ordinary least squares of `ln mse` on `ln n`.
pub fn fit_rate(n_list: &[usize], mse: &[f64]) -> Result<RateFit> {
    if n_list.len() != mse.len() || n_list.len() < 3 {
        return Err(Error::input("rate fit needs at least three (n, mse) pairs"));
    }
    if let Some(bad) = mse.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::Degenerate(format!("mse must be positive to take logs, got {bad}")));
    }
    let x: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = mse.iter().map(|m| m.ln()).collect();
    let m = x.len() as f64;
    let xm = x.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all n are equal".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let df = m - 2.0;
    let se = (rss / df / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Degenerate(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(RateFit {
        slope,
        intercept,
        slope_ci: [slope - t * se, slope + t * se],
    })
}

/// A scenario evaluated over several sample sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePlan {
    /// Its `n` is replaced by each entry of `n_list`.
    pub scenario: Scenario,
    pub n_list: Vec<usize>,
    /// Mellin–Sobolev smoothness of the target, used for the theoretical
    /// slope in the nonparametric regime.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
}

pub const MIN_RATE_REPLICATIONS: usize = 200;

impl RatePlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.len() < 3 {
            return Err(Error::input("n_list needs at least three sample sizes"));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("n_list must be strictly increasing"));
        }
        if self.scenario.replications < MIN_RATE_REPLICATIONS {
            return Err(Error::input(format!(
                "rate experiments need at least {MIN_RATE_REPLICATIONS} replications, got {}",
                self.scenario.replications
            )));
        }
        if let Some(s) = self.smoothness {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::input(format!("smoothness must be positive, got {s}")));
            }
        }
        self.scenario.validate()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    pub n_list: Vec<usize>,
    pub mse_by_n: Vec<f64>,
    pub stderr_by_n: Vec<f64>,
    /// Mean selected (or oracle) cut-off at each `n`.
    pub k_by_n: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci: [f64; 2],
    pub regime: Regime,
    /// `null` when the regime is nonparametric and either no smoothness
    /// was given or the error is super-smooth.
    pub theory_slope: Option<f64>,
}

pub fn rate_experiment(plan: &RatePlan) -> Result<RateReport> {
    plan.validate()?;
    let sc = &plan.scenario;
    let runs: Vec<McReport> = plan
        .n_list
        .iter()
        .map(|&n| mc_mse(&sc.with_n(n)))
        .collect::<Result<_>>()?;
    let mse: Vec<f64> = runs.iter().map(|r| r.mse).collect();
    let fit = fit_rate(&plan.n_list, &mse)?;
    let regime = regime_of(&sc.functional, &sc.error, sc.c)?;
    let shape = decay_class_g(&sc.error, sc.c)?.shape;
    let theory = match (regime, shape, plan.smoothness) {
        (Regime::Parametric, _, _) => Some(-1.0),
        (Regime::Nonparametric, DecayShape::Smooth { gamma }, Some(s)) => {
            Some(theory_slope(s, sc.functional.decay(sc.c).p(), gamma, regime))
        }
        _ => None,
    };
    Ok(RateReport {
        n_list: plan.n_list.clone(),
        mse_by_n: mse,
        stderr_by_n: runs.iter().map(|r| r.stderr).collect(),
        k_by_n: runs.iter().map(|r| r.mean_k).collect(),
        slope: fit.slope,
        intercept: fit.intercept,
        slope_ci: fit.slope_ci,
        regime,
        theory_slope: theory,
    })
}
