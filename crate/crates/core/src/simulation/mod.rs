//! Monte Carlo experiments: scenarios, reproducible sampling of `Y = X·U`,
//! risk estimation, oracle cut-offs and convergence-rate regressions.

mod montecarlo;
mod rates;
pub mod rng;
mod scenario;

pub use montecarlo::{
    mc_mse, mc_mse_with, mean_and_stderr, oracle_cutoff, replicate, CurvePoint, McReport, OracleResult, Record,
};
pub use rates::{
    fit_rate, rate_experiment, sobolev_seminorm, target_sobolev_seminorm, theoretical_cutoff, theory_slope, RateFit,
    RatePlan, RateReport,
};
pub use scenario::{draw_sample, Draw, Scenario, Selection};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool with `threads` workers (`None`: rayon's
/// default). Results do not depend on the choice.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::input("thread count must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
