use super::scenario::{draw_sample, Draw, Scenario, Selection};
use crate::adaptive::{argmin_first, Selector};
use crate::error::{Error, Result};
use crate::estimator::{CutoffEstimator, Sample};
use crate::functionals::Regime;
use crate::quadrature::pairwise_sum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One line of the per-replication CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub replication: u64,
    pub k: f64,
    pub theta_hat: f64,
    pub theta_true: f64,
    pub squared_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: f64,
    pub mse: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub k_star: f64,
    pub mse: f64,
    pub stderr: f64,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub scenario: Scenario,
    pub theta_true: f64,
    pub mse: f64,
    /// Jackknife standard error of `mse`; `null` with one replication.
    pub stderr: f64,
    pub mean_theta_hat: f64,
    pub mean_k: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleResult>,
    #[serde(skip)]
    pub records: Vec<Record>,
}

/// Mean and jackknife standard error of the mean, summed pairwise in index
/// order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    let total = pairwise_sum(values);
    let mean = total / r as f64;
    if r < 2 {
        return (mean, f64::NAN);
    }
    let rf = r as f64;
    let loo: Vec<f64> = values.iter().map(|v| (total - v) / (rf - 1.0)).collect();
    let loo_mean = pairwise_sum(&loo) / rf;
    let dev: Vec<f64> = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).collect();
    (mean, ((rf - 1.0) / rf * pairwise_sum(&dev)).sqrt())
}

/// Runs `f` on every replication in parallel; results come back in
/// replication order whatever the thread count.
pub fn replicate<T, F>(scenario: &Scenario, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &Draw) -> Result<T> + Sync,
{
    (0..scenario.replications as u64)
        .into_par_iter()
        .map(|r| {
            let draw = draw_sample(scenario, r)?;
            f(r, &draw)
        })
        .collect()
}

/// Monte Carlo risk of an arbitrary estimator returning `(k, θ̂)`.
pub fn mc_mse_with<F>(scenario: &Scenario, estimator: F) -> Result<McReport>
where
    F: Fn(&Sample) -> Result<(f64, f64)> + Sync,
{
    scenario.validate()?;
    let theta_true = scenario.functional.true_value(&scenario.target)?;
    let fits = replicate(scenario, |_, d| estimator(&d.sample))?;
    let records: Vec<Record> = fits
        .iter()
        .enumerate()
        .map(|(r, &(k, theta_hat))| record(scenario.n, r as u64, k, theta_hat, theta_true))
        .collect();
    Ok(summarise(scenario, theta_true, records, None))
}

fn record(n: usize, replication: u64, k: f64, theta_hat: f64, theta_true: f64) -> Record {
    let e = theta_hat - theta_true;
    Record {
        n,
        replication,
        k,
        theta_hat,
        theta_true,
        squared_error: e * e,
    }
}

fn summarise(scenario: &Scenario, theta_true: f64, records: Vec<Record>, oracle: Option<OracleResult>) -> McReport {
    let se: Vec<f64> = records.iter().map(|r| r.squared_error).collect();
    let th: Vec<f64> = records.iter().map(|r| r.theta_hat).collect();
    let ks: Vec<f64> = records.iter().map(|r| r.k).collect();
    let (mse, stderr) = mean_and_stderr(&se);
    McReport {
        scenario: scenario.clone(),
        theta_true,
        mse,
        stderr,
        mean_theta_hat: pairwise_sum(&th) / th.len() as f64,
        mean_k: pairwise_sum(&ks) / ks.len() as f64,
        oracle,
        records,
    }
}

/// Monte Carlo risk of the scenario's estimator.
pub fn mc_mse(scenario: &Scenario) -> Result<McReport> {
    scenario.validate()?;
    let est = CutoffEstimator::new(scenario.functional.clone(), scenario.error, scenario.c)?;
    match &scenario.selection {
        Selection::FixedK { k } => {
            let k = *k;
            mc_mse_with(scenario, |s| Ok((k, est.estimate(s, k)?)))
        }
        Selection::PowerLaw { exponent } => {
            let k = (scenario.n as f64).powf(*exponent);
            mc_mse_with(scenario, |s| Ok((k, est.estimate(s, k)?)))
        }
        Selection::Adaptive(cfg) => {
            let selector = Selector::new(scenario.n, &scenario.functional, &scenario.error, scenario.c, *cfg)?;
            mc_mse_with(scenario, |s| {
                let r = selector.select(s)?;
                Ok((r.k_hat as f64, r.theta_hat))
            })
        }
        Selection::Oracle { grid } => {
            let theta_true = scenario.functional.true_value(&scenario.target)?;
            let (oracle, paths) = oracle_paths(scenario, &est, grid, theta_true)?;
            let at = grid.iter().position(|&k| k == oracle.k_star).unwrap_or(0);
            let records = paths
                .iter()
                .enumerate()
                .map(|(r, p)| record(scenario.n, r as u64, oracle.k_star, p[at], theta_true))
                .collect();
            Ok(summarise(scenario, theta_true, records, Some(oracle)))
        }
    }
}

/// Grid point with the smallest Monte Carlo risk; ties go to the smallest
/// `k`. In the parametric regime the curve flattens, and the smallest `k`
/// within one stderr of the risk at the largest grid point is taken.
/// Every `k` is evaluated on the same samples.
pub fn oracle_cutoff(scenario: &Scenario, grid: &[f64]) -> Result<OracleResult> {
    scenario.validate()?;
    Selection::Oracle { grid: grid.to_vec() }.validate()?;
    let est = CutoffEstimator::new(scenario.functional.clone(), scenario.error, scenario.c)?;
    let theta_true = scenario.functional.true_value(&scenario.target)?;
    Ok(oracle_paths(scenario, &est, grid, theta_true)?.0)
}

fn argmax_k(grid: &[f64]) -> usize {
    (0..grid.len()).max_by(|&a, &b| grid[a].total_cmp(&grid[b])).unwrap_or(0)
}

fn oracle_paths(
    scenario: &Scenario,
    est: &CutoffEstimator,
    grid: &[f64],
    theta_true: f64,
) -> Result<(OracleResult, Vec<Vec<f64>>)> {
    if grid.is_empty() {
        return Err(Error::input("oracle grid is empty"));
    }
    let paths = replicate(scenario, |_, d| Ok(est.path(&d.sample, grid)?.theta))?;
    let curve: Vec<CurvePoint> = grid
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let se: Vec<f64> = paths.iter().map(|p| (p[i] - theta_true).powi(2)).collect();
            let (mse, stderr) = mean_and_stderr(&se);
            CurvePoint { k, mse, stderr }
        })
        .collect();
    let best = match est.regime()? {
        // flat curve: smallest k within one stderr of the level at the largest k
        Regime::Parametric => {
            let flat = curve[argmax_k(grid)];
            *curve
                .iter()
                .filter(|p| (p.mse - flat.mse).abs() <= flat.stderr)
                .min_by(|a, b| a.k.total_cmp(&b.k))
                .unwrap_or(&flat)
        }
        Regime::Nonparametric => {
            let mses: Vec<f64> = curve.iter().map(|p| p.mse).collect();
            curve[argmin_first(&mses)]
        }
    };
    Ok((
        OracleResult {
            k_star: best.k,
            mse: best.mse,
            stderr: best.stderr,
            curve,
        },
        paths,
    ))
}
