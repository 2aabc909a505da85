use super::rng::{stream, Role};
use crate::adaptive::SelectionConfig;
use crate::error::{Error, Result};
use crate::estimator::Sample;
use crate::functionals::FunctionalSpec;
use crate::mellin::ErrorModel;
use serde::{Deserialize, Serialize};

/// How each replication chooses its cut-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    /// Goldenshluger–Lepski rule.
    Adaptive(SelectionConfig),
    FixedK { k: f64 },
    /// `k = n^exponent`.
    PowerLaw { exponent: f64 },
    /// The grid point with the smallest Monte Carlo risk, evaluated on
    /// shared samples.
    Oracle { grid: Vec<f64> },
}

impl Selection {
    pub fn validate(&self) -> Result<()> {
        match self {
            Selection::Adaptive(cfg) => cfg.validate(),
            Selection::FixedK { k } => {
                if *k > 0.0 && k.is_finite() {
                    Ok(())
                } else {
                    Err(Error::input(format!("fixed cut-off must be positive, got {k}")))
                }
            }
            Selection::PowerLaw { exponent } => {
                if exponent.is_finite() {
                    Ok(())
                } else {
                    Err(Error::input("power-law exponent must be finite"))
                }
            }
            Selection::Oracle { grid } => {
                if grid.is_empty() {
                    return Err(Error::input("oracle grid is empty"));
                }
                if grid.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
                    return Err(Error::input("oracle grid points must be positive"));
                }
                if grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::input("oracle grid must be strictly increasing"));
                }
                Ok(())
            }
        }
    }
}

/// A simulation design: `Y = X·U` with `X` from `target`, `U` from `error`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub target: ErrorModel,
    pub error: ErrorModel,
    pub functional: FunctionalSpec,
    pub c: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        self.error.validate()?;
        self.functional.validate()?;
        self.selection.validate()?;
        if !self.c.is_finite() {
            return Err(Error::input(format!("c must be finite, got {}", self.c)));
        }
        if self.n == 0 {
            return Err(Error::input("n must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::input("replications must be at least 1"));
        }
        self.functional.check_c(self.c)?;
        self.error.check_c(self.c)?;
        // the estimator's variance involves E X^{2(c-1)}
        self.target.moment(2.0 * (self.c - 1.0)).map_err(|e| {
            Error::Assumption(format!("target {} has no finite moment of order 2(c-1) at c = {}: {e}", self.target, self.c))
        })?;
        Ok(())
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

/// One replication's data, with the latent `X` kept for diagnostics.
#[derive(Debug, Clone)]
pub struct Draw {
    pub sample: Sample,
    pub x: Vec<f64>,
}

/// The `replication`-th sample of `scenario`; a pure function of
/// `(seed, replication)` and the models.
pub fn draw_sample(scenario: &Scenario, replication: u64) -> Result<Draw> {
    let mut rx = stream(scenario.seed, replication, Role::Target);
    let mut ru = stream(scenario.seed, replication, Role::Error);
    let x: Vec<f64> = (0..scenario.n).map(|_| scenario.target.sample(&mut rx)).collect();
    let y: Vec<f64> = x.iter().map(|&xi| xi * scenario.error.sample(&mut ru)).collect();
    let sample = Sample::new(y).map_err(|e| Error::Degenerate(format!("replication {replication}: {e}")))?;
    Ok(Draw { sample, x })
}
