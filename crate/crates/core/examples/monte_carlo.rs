//! Monte Carlo risk of a scenario file, fixed cut-off against the oracle.
//!
//! cargo run --release --example monte_carlo -- examples/data/scenario.json

use mellin_deconv::simulation::{mc_mse, oracle_cutoff, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/examples/data/scenario.json".into());
    let text = std::fs::read_to_string(&path)?;
    let sc: Scenario = serde_json::from_str(&text)?;
    sc.validate()?;
    let report = mc_mse(&sc)?;
    println!("theta = {:.5}, mean estimate = {:.5}", report.theta_true, report.mean_theta_hat);
    println!("mse = {:.3e} +- {:.1e} at mean k {:.2}", report.mse, report.stderr, report.mean_k);
    let grid: Vec<f64> = (1..=20).map(f64::from).collect();
    let oracle = oracle_cutoff(&sc, &grid)?;
    for p in &oracle.curve {
        println!("  k = {:>4}: mse {:.3e}", p.k, p.mse);
    }
    println!("oracle k* = {}, mse {:.3e}", oracle.k_star, oracle.mse);
    Ok(())
}
