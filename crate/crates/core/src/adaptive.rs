//! Goldenshluger–Lepski choice of the cut-off.
//!
//! ```text
//! K_n  = {k ∈ ℕ : ‖g‖ Δ(k) ≤ n, k ≤ √n / (ln n)²}
//! V̂(k) = 2χ ‖g‖ σ̂ Δ(k) ln(n) / n
//! Â(k) = max_{k' ∈ K_n, k' > k} ((θ̂_{k'} - θ̂_k)² - V̂(k'))₊
//! k̂    = argmin_{k ∈ K_n} Â(k) + V̂(k)
//! ```
//!
//! with `‖g‖ = sup_x x^{2c-1} g(x)` and `σ̂ = n⁻¹ Σ Y_j^{2(c-1)} / E U^{2(c-1)}`.

use crate::error::{Error, Result};
use crate::estimator::{delta_unit_steps, CutoffEstimator, Sample};
use crate::functionals::FunctionalSpec;
use crate::mellin::ErrorModel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Smallest `χ` covered by the oracle inequality.
pub const CERTIFIED_CHI: f64 = 72.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// `k ≤ √n / (ln n)²`
    Theoretical,
    /// `k ≤ √n`
    Practical,
}

impl FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theoretical" => Ok(GridMode::Theoretical),
            "practical" => Ok(GridMode::Practical),
            other => Err(Error::input(format!("unknown grid mode '{other}'"))),
        }
    }
}

impl fmt::Display for GridMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridMode::Theoretical => "theoretical",
            GridMode::Practical => "practical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub chi: f64,
    pub grid_mode: GridMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k_override: Option<u32>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            chi: CERTIFIED_CHI,
            grid_mode: GridMode::Theoretical,
            max_k_override: None,
        }
    }
}

impl SelectionConfig {
    pub fn practical(chi: f64) -> Self {
        Self {
            chi,
            grid_mode: GridMode::Practical,
            max_k_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::input(format!("chi must be finite and nonnegative, got {}", self.chi)));
        }
        if self.grid_mode == GridMode::Theoretical && self.chi < CERTIFIED_CHI {
            return Err(Error::Assumption(format!(
                "theoretical mode requires chi >= {CERTIFIED_CHI}, got {}; use the practical grid to calibrate chi",
                self.chi
            )));
        }
        if self.max_k_override == Some(0) {
            return Err(Error::input("max_k_override must be at least 1"));
        }
        Ok(())
    }

    /// Whether the configuration is the one the oracle inequality covers.
    pub fn certified(&self) -> bool {
        self.grid_mode == GridMode::Theoretical && self.chi >= CERTIFIED_CHI
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    /// `1..=K`, contiguous.
    pub grid: Vec<u32>,
    /// `Δ(k)` for each grid point.
    pub delta: Vec<f64>,
    /// Set when the constraints left nothing and `{1}` was substituted.
    pub fallback: bool,
}

fn grid_cap(n: usize, config: &SelectionConfig) -> u32 {
    let nf = n as f64;
    let cap = match config.grid_mode {
        GridMode::Theoretical => nf.sqrt() / nf.ln().powi(2),
        GridMode::Practical => nf.sqrt(),
    };
    let cap = cap.floor().min(u32::MAX as f64) as u32;
    match config.max_k_override {
        Some(m) => cap.min(m),
        None => cap,
    }
}

pub fn g_norm(model: &ErrorModel, c: f64) -> Result<f64> {
    let g_sup = model.weighted_sup(c)?;
    if !g_sup.is_finite() {
        return Err(Error::Assumption(format!(
            "sup_x x^(2c-1) g(x) is unbounded for {model} at c = {c}"
        )));
    }
    Ok(g_sup)
}

pub fn admissible_set(
    n: usize,
    spec: &FunctionalSpec,
    model: &ErrorModel,
    c: f64,
    config: &SelectionConfig,
) -> Result<AdmissibleSet> {
    config.validate()?;
    if n < 2 {
        return Err(Error::input(format!("selection needs n >= 2, got {n}")));
    }
    let g_sup = g_norm(model, c)?;
    let kmax = grid_cap(n, config);
    let limit = n as f64 / g_sup;
    let mut delta = delta_unit_steps(spec, model, c, kmax, limit)?;
    // guard against rounding in `n/‖g‖`
    while delta.last().is_some_and(|d| g_sup * d > n as f64) {
        delta.pop();
    }
    if delta.is_empty() {
        let d1 = crate::estimator::delta_psi_g(spec, model, c, 1.0)?;
        return Ok(AdmissibleSet {
            grid: vec![1],
            delta: vec![d1],
            fallback: true,
        });
    }
    Ok(AdmissibleSet {
        grid: (1..=delta.len() as u32).collect(),
        delta,
        fallback: false,
    })
}

/// `σ̂ = n⁻¹ Σ Y_j^{2(c-1)} / E U^{2(c-1)}`.
pub fn sigma_hat(sample: &Sample, model: &ErrorModel, c: f64) -> Result<f64> {
    let r = 2.0 * (c - 1.0);
    let denom = model.moment(r)?;
    Ok(sample.moment(r) / denom)
}

/// `V̂(k) = 2χ ‖g‖ σ̂ Δ(k) ln(n)/n`.
pub fn v_hat(chi: f64, g_sup: f64, sigma_hat: f64, delta_k: f64, n: usize) -> f64 {
    2.0 * chi * penalty_base(g_sup, sigma_hat, delta_k, n)
}

/// `V(k) = χ ‖g‖ σ Δ(k) ln(n)/n` with the true `σ = E X^{2(c-1)}`.
pub fn v_true(chi: f64, g_sup: f64, sigma: f64, delta_k: f64, n: usize) -> f64 {
    chi * penalty_base(g_sup, sigma, delta_k, n)
}

fn penalty_base(g_sup: f64, sigma: f64, delta_k: f64, n: usize) -> f64 {
    let nf = n as f64;
    g_sup * sigma * delta_k * nf.ln() / nf
}

/// `Â(k)` for `k = grid[i]`; `theta` and `v_hat` are aligned with `grid`.
pub fn a_hat(i: usize, theta: &[f64], v_hat: &[f64]) -> f64 {
    (i + 1..theta.len())
        .map(|j| {
            let d = theta[j] - theta[i];
            (d * d - v_hat[j]).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Index of the smallest value; ties go to the first.
pub fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerK {
    pub k: u32,
    pub theta_hat: f64,
    pub delta: f64,
    pub v_hat: f64,
    pub a_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub k_hat: u32,
    pub theta_hat: f64,
    pub sigma_hat: f64,
    pub n: usize,
    pub chi: f64,
    pub grid_mode: GridMode,
    pub certified: bool,
    pub fallback: bool,
    pub grid: Vec<u32>,
    pub per_k: Vec<PerK>,
}

/// Everything in the selection rule that does not depend on the data,
/// computed once per `(n, Ψ, g, c, config)`.
#[derive(Debug, Clone)]
pub struct Selector {
    n: usize,
    config: SelectionConfig,
    g_sup: f64,
    set: AdmissibleSet,
    estimator: CutoffEstimator,
}

impl Selector {
    pub fn new(n: usize, spec: &FunctionalSpec, model: &ErrorModel, c: f64, config: SelectionConfig) -> Result<Self> {
        let estimator = CutoffEstimator::new(spec.clone(), *model, c)?;
        let set = admissible_set(n, spec, model, c, &config)?;
        // the σ̂ denominator must exist before any data arrives
        model.moment(2.0 * (c - 1.0))?;
        Ok(Self {
            n,
            config,
            g_sup: g_norm(model, c)?,
            set,
            estimator,
        })
    }

    pub fn admissible(&self) -> &AdmissibleSet {
        &self.set
    }

    pub fn g_sup(&self) -> f64 {
        self.g_sup
    }

    pub fn select(&self, sample: &Sample) -> Result<SelectionReport> {
        if sample.n() != self.n {
            return Err(Error::input(format!(
                "selector prepared for n = {}, sample has n = {}",
                self.n,
                sample.n()
            )));
        }
        let ks: Vec<f64> = self.set.grid.iter().map(|&k| k as f64).collect();
        let theta = self.estimator.path(sample, &ks)?.theta;
        let sigma = sigma_hat(sample, self.estimator.model(), self.estimator.c())?;
        let v: Vec<f64> = self
            .set
            .delta
            .iter()
            .map(|&d| v_hat(self.config.chi, self.g_sup, sigma, d, self.n))
            .collect();
        let a: Vec<f64> = (0..theta.len()).map(|i| a_hat(i, &theta, &v)).collect();
        let objective: Vec<f64> = a.iter().zip(&v).map(|(a, v)| a + v).collect();
        let best = argmin_first(&objective);
        let per_k = (0..theta.len())
            .map(|i| PerK {
                k: self.set.grid[i],
                theta_hat: theta[i],
                delta: self.set.delta[i],
                v_hat: v[i],
                a_hat: a[i],
            })
            .collect();
        Ok(SelectionReport {
            k_hat: self.set.grid[best],
            theta_hat: theta[best],
            sigma_hat: sigma,
            n: self.n,
            chi: self.config.chi,
            grid_mode: self.config.grid_mode,
            certified: self.config.certified(),
            fallback: self.set.fallback,
            grid: self.set.grid.clone(),
            per_k,
        })
    }
}

pub fn select_k(
    sample: &Sample,
    spec: &FunctionalSpec,
    model: &ErrorModel,
    c: f64,
    config: SelectionConfig,
) -> Result<SelectionReport> {
    Selector::new(sample.n(), spec, model, c, config)?.select(sample)
}
