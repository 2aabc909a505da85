//! Log-log fit of the risk against n for a plan file.
//!
//! cargo run --release --example rate_experiment -- examples/data/rates.json

use mellin_deconv::simulation::{rate_experiment, RatePlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/examples/data/rates.json".into());
    let text = std::fs::read_to_string(&path)?;
    let plan: RatePlan = serde_json::from_str(&text)?;
    let r = rate_experiment(&plan)?;
    for ((n, mse), k) in r.n_list.iter().zip(&r.mse_by_n).zip(&r.k_by_n) {
        println!("n = {n:>6}  mse = {mse:.3e}  k = {k}");
    }
    println!(
        "slope {:.3}  95% CI [{:.3}, {:.3}]  regime {}  theory {:?}",
        r.slope, r.slope_ci[0], r.slope_ci[1], r.regime, r.theory_slope
    );
    Ok(())
}
