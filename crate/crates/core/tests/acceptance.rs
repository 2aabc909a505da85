//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any attainable criterion fails.

use mellin_deconv::adaptive::SelectionConfig;
use mellin_deconv::estimator::{delta_psi_g, delta_psi_g_many, CutoffEstimator};
use mellin_deconv::functionals::FunctionalSpec;
use mellin_deconv::mellin::{analytic_mellin, numeric_mellin, DensityFn, ErrorModel};
use mellin_deconv::simulation::{
    draw_sample, mc_mse, mean_and_stderr, oracle_cutoff, rate_experiment, replicate, target_sobolev_seminorm,
    RatePlan, Scenario, Selection,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

/// Calibrated penalty constant for the practical grid.
const CHI_PRACTICAL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the criterion cannot hold as stated; the reason is printed.
    infeasible: Option<&'static str>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        infeasible: None,
    }
}

const T_GRID: [f64; 9] = [0.0, 0.5, -0.5, 1.0, -1.0, 5.0, -5.0, 20.0, -20.0];

fn catalog() -> Outcome {
    let settings = [
        ErrorModel::Beta { b: 1 },
        ErrorModel::Beta { b: 2 },
        ErrorModel::Beta { b: 5 },
        ErrorModel::ScaledLogGamma { mu: 0.0, a: 1.0, lambda: 1.0 },
        ErrorModel::ScaledLogGamma { mu: 0.3, a: 2.0, lambda: 1.5 },
        ErrorModel::ScaledLogGamma { mu: -0.2, a: 0.5, lambda: 3.0 },
        ErrorModel::Gamma { d: 4.0 },
        ErrorModel::Gamma { d: 6.0 },
        ErrorModel::Gamma { d: 10.0 },
        ErrorModel::Weibull { m: 1.5 },
        ErrorModel::Weibull { m: 3.0 },
        ErrorModel::Weibull { m: 6.0 },
        ErrorModel::Lognormal { mu: 0.0, lambda: 0.1 },
        ErrorModel::Lognormal { mu: 0.3, lambda: 0.2 },
        ErrorModel::Lognormal { mu: -0.5, lambda: 0.25 },
    ];
    let mut worst = (0.0f64, String::new());
    for m in settings {
        let h = DensityFn::from_model(&m);
        for t in T_GRID {
            let a = analytic_mellin(&m, 1.0, t).unwrap();
            let rel = match numeric_mellin(&h, 1.0, t) {
                Ok(n) => (n.value - a).norm() / a.norm(),
                Err(_) => f64::INFINITY,
            };
            if !(rel <= worst.0) {
                worst = (rel, format!("{m} t={t}"));
            }
        }
    }
    // strongly super-smooth settings: |M(20)| lies below the binary64
    // cancellation floor, so only the absolute error is meaningful
    let mut info = Vec::new();
    for m in [ErrorModel::exponential(), ErrorModel::Lognormal { mu: 0.0, lambda: 1.0 }] {
        let h = DensityFn::from_model(&m);
        let a = analytic_mellin(&m, 1.0, 20.0).unwrap();
        let n = numeric_mellin(&h, 1.0, 20.0).unwrap().value;
        info.push(format!("{m}: |M(20)| = {:.1e}, abs err {:.1e}", a.norm(), (n - a).norm()));
    }
    outcome(
        worst.0 <= 1e-6,
        format!("max rel err {:.2e} at {} (tol 1e-6); info: {}", worst.0, worst.1, info.join("; ")),
    )
}

fn multiplication_theorem() -> Outcome {
    let unif = DensityFn::from_model(&ErrorModel::uniform());
    let mut worst_abs = 0.0f64;
    let mut worst_rel = 0.0f64;
    for target in [ErrorModel::exponential(), ErrorModel::Beta { b: 2 }] {
        let f = DensityFn::from_model(&target);
        let conv = DensityFn::product(&f, &unif).unwrap();
        for t in T_GRID {
            let prod = analytic_mellin(&target, 1.0, t).unwrap() * analytic_mellin(&ErrorModel::uniform(), 1.0, t).unwrap();
            let num = numeric_mellin(&conv, 1.0, t).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let err = (num - prod).norm();
            worst_abs = worst_abs.max(if err.is_nan() { f64::INFINITY } else { err });
            if prod.norm() > 1e-8 {
                worst_rel = worst_rel.max(err / prod.norm());
            }
        }
    }
    outcome(
        worst_abs <= 1e-4,
        format!("max |numeric - product| {worst_abs:.2e} (tol 1e-4); rel err where |M| > 1e-8: {worst_rel:.1e}"),
    )
}

fn closed_form_delta() -> Outcome {
    let mut worst = 0.0f64;
    for x0 in [0.5, 1.0, 2.0] {
        let spec = FunctionalSpec::density(x0).unwrap();
        for k in [0.5, 1.0, 5.0, 20.0] {
            let d = delta_psi_g(&spec, &ErrorModel::uniform(), 1.0, k).unwrap();
            let exact = (k + k * k * k / 3.0) / (PI * x0 * x0);
            worst = worst.max((d - exact).abs() / exact);
        }
    }
    outcome(worst <= 1e-8, format!("max rel err {worst:.2e} (tol 1e-8)"))
}

fn exp_unif(n: usize, replications: usize, seed: u64, selection: Selection) -> Scenario {
    Scenario {
        target: ErrorModel::exponential(),
        error: ErrorModel::uniform(),
        functional: FunctionalSpec::density(1.0).unwrap(),
        c: 1.0,
        n,
        replications,
        seed,
        selection,
    }
}

fn unbiasedness() -> Outcome {
    let k = 3.0;
    let sc = exp_unif(10_000, 200, 4, Selection::FixedK { k });
    let est = CutoffEstimator::new(sc.functional.clone(), sc.error, sc.c).unwrap();
    let theta: Vec<f64> = replicate(&sc, |_, d| est.estimate(&d.sample, k)).unwrap();
    let (mean, se) = mean_and_stderr(&theta);
    let oracle = sc.functional.truncated_value(&sc.target, sc.c, k).unwrap();
    let z = (mean - oracle) / se;
    outcome(
        z.abs() <= 3.0,
        format!("mean {mean:.5}, theta_k {oracle:.5}, stderr {se:.2e}, |z| = {:.2} (tol 3)", z.abs()),
    )
}

fn consistency() -> Outcome {
    let mut mses = Vec::new();
    for n in [500, 2000, 8000] {
        let r = mc_mse(&exp_unif(n, 300, 5, Selection::PowerLaw { exponent: 0.25 })).unwrap();
        mses.push((n, r.mse, r.stderr));
    }
    let decreasing = mses.windows(2).all(|w| w[1].1 < w[0].1);
    let text: Vec<String> = mses.iter().map(|(n, m, s)| format!("n={n}: {m:.3e}±{s:.1e}")).collect();
    outcome(decreasing, format!("mse {} (strictly decreasing required)", text.join(", ")))
}

fn triangular_scenario(n: usize, replications: usize, seed: u64, selection: Selection) -> Scenario {
    Scenario {
        target: ErrorModel::Beta { b: 2 },
        error: ErrorModel::uniform(),
        functional: FunctionalSpec::density(1.0).unwrap(),
        c: 1.0,
        n,
        replications,
        seed,
        selection,
    }
}

fn nonparametric_rate() -> Outcome {
    let grid: Vec<f64> = (4..=128).map(|i| i as f64 * 0.25).collect();
    let plan = RatePlan {
        scenario: triangular_scenario(1000, 300, 6, Selection::Oracle { grid }),
        n_list: vec![1000, 4000, 16_000],
        smoothness: Some(1.5),
    };
    let r = rate_experiment(&plan).unwrap();
    let theory = r.theory_slope.unwrap();
    outcome(
        (r.slope - theory).abs() <= 0.15,
        format!(
            "slope {:.3} (95% CI [{:.3}, {:.3}]), theory {theory}, oracle k {:?} (tol 0.15)",
            r.slope, r.slope_ci[0], r.slope_ci[1], r.k_by_n
        ),
    )
}

fn laplace_scenario(c: f64, error: ErrorModel, n: usize, k: f64) -> Scenario {
    Scenario {
        target: ErrorModel::exponential(),
        error,
        functional: FunctionalSpec::laplace(1.0).unwrap(),
        c,
        n,
        replications: 300,
        seed: 7,
        selection: Selection::FixedK { k },
    }
}

fn parametric_regime() -> Outcome {
    // as stated: c = 0 with a Beta(2) error
    let spec = FunctionalSpec::laplace(1.0).unwrap();
    let g = ErrorModel::Beta { b: 2 };
    let delta = delta_psi_g_many(&spec, &g, 0.0, &[100.0, 200.0]);
    let scenario = laplace_scenario(0.0, g, 1000, 20.0).validate();
    let detail = format!(
        "Delta at c=0: {}; scenario: {}",
        delta.map(|d| format!("{d:?}")).unwrap_or_else(|e| e.to_string()),
        scenario.map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())
    );
    Outcome {
        pass: false,
        detail,
        infeasible: Some(
            "M_0[g] diverges for Beta(2) (needs c > 0), and E X^{-2} = inf for Exp(1); see 7b for the same design at c = 0.75",
        ),
    }
}

fn parametric_regime_admissible_c() -> Outcome {
    let c = 0.75;
    let spec = FunctionalSpec::laplace(1.0).unwrap();
    let g = ErrorModel::Beta { b: 2 };
    let d = delta_psi_g_many(&spec, &g, c, &[100.0, 200.0]).unwrap();
    let k = 10.0;
    let nm: Vec<f64> = [1000usize, 10_000]
        .iter()
        .map(|&n| mc_mse(&laplace_scenario(c, g, n, k)).unwrap().mse * n as f64)
        .collect();
    let ratio = nm[1] / nm[0];
    let saturated = d[1] - d[0] <= 1e-6;
    outcome(
        saturated && (0.3..=3.0).contains(&ratio),
        format!(
            "c = {c}: Delta(200)-Delta(100) = {:.1e} (tol 1e-6), n*mse at k={k}: {:.3e} -> {:.3e}, ratio {ratio:.3} (range [0.3, 3])",
            d[1] - d[0],
            nm[0],
            nm[1]
        ),
    )
}

fn adaptive_oracle() -> Outcome {
    let n = 2000;
    let base = triangular_scenario(n, 500, 8, Selection::FixedK { k: 1.0 });
    let set = mellin_deconv::adaptive::admissible_set(
        n,
        &base.functional,
        &base.error,
        base.c,
        &SelectionConfig::practical(CHI_PRACTICAL),
    )
    .unwrap();
    let grid: Vec<f64> = set.grid.iter().map(|&k| k as f64).collect();
    let oracle = oracle_cutoff(&base, &grid).unwrap();
    let run = |chi: f64| {
        mc_mse(&Scenario {
            selection: Selection::Adaptive(SelectionConfig::practical(chi)),
            ..base.clone()
        })
        .unwrap()
    };
    let adaptive = run(CHI_PRACTICAL);
    let certified = run(72.0);
    let ratio = adaptive.mse / oracle.mse;
    let sane = adaptive.mse >= oracle.mse - 2.0 * oracle.stderr;
    outcome(
        ratio <= 6.0,
        format!(
            "chi = {CHI_PRACTICAL}: mse {:.3e} vs oracle {:.3e} at k* = {} (grid 1..{}), ratio {ratio:.2} (tol 6), mean k_hat {:.2}; \
             adaptive >= oracle - 2 se: {sane}; info: chi = 72 gives ratio {:.2}",
            adaptive.mse,
            oracle.mse,
            oracle.k_star,
            grid.len(),
            adaptive.mean_k,
            certified.mse / oracle.mse
        ),
    )
}

fn sobolev_membership() -> Outcome {
    let tri = ErrorModel::Beta { b: 2 };
    let a = target_sobolev_seminorm(&tri, 1.0, 1.4).unwrap();
    let b = target_sobolev_seminorm(&tri, 1.0, 1.6).unwrap();
    outcome(
        a.is_finite() && b == f64::INFINITY,
        format!("s = 1.4: {a:.6}, s = 1.6: {b}"),
    )
}

fn run_cli(args: &[&str], threads: usize) -> bool {
    Command::new(env!("CARGO_BIN_EXE_mellin-deconv"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let scenario = serde_json::to_string_pretty(&triangular_scenario(
        300,
        40,
        10,
        Selection::Adaptive(SelectionConfig::practical(CHI_PRACTICAL)),
    ))
    .unwrap();
    std::fs::write(p("scenario.json"), scenario).unwrap();
    let plan = RatePlan {
        scenario: exp_unif(100, 200, 11, Selection::PowerLaw { exponent: 0.25 }),
        n_list: vec![100, 200, 400],
        smoothness: None,
    };
    std::fs::write(p("plan.json"), serde_json::to_string_pretty(&plan).unwrap()).unwrap();

    let read = |path: &Path| std::fs::read(path).unwrap();
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in [1usize, 2, 8] {
        let sim = p(&format!("sim{threads}.json"));
        let sim_csv = p(&format!("sim{threads}.csv"));
        let rates = p(&format!("rates{threads}.json"));
        let rates_csv = p(&format!("rates{threads}.csv"));
        let s = |x: &Path| x.to_str().unwrap().to_string();
        let ok = run_cli(
            &["simulate", &s(&p("scenario.json")), "--output", &s(&sim), "--csv", &s(&sim_csv)],
            threads,
        ) && run_cli(
            &["rates", &s(&p("plan.json")), "--output", &s(&rates), "--csv", &s(&rates_csv)],
            threads,
        );
        if !ok {
            return outcome(false, format!("CLI run failed with {threads} threads"));
        }
        outputs.push(vec![read(&sim), read(&sim_csv), read(&rates), read(&rates_csv)]);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        identical,
        format!("simulate and rates JSON/CSV byte-identical across 1, 2, 8 threads: {identical}"),
    )
}

fn main() {
    // keep sample generation honest: a draw is a pure function of its index
    let probe = exp_unif(5, 1, 1, Selection::FixedK { k: 1.0 });
    assert_eq!(draw_sample(&probe, 0).unwrap().sample, draw_sample(&probe, 0).unwrap().sample);

    let criteria: Vec<(&str, &str, fn() -> Outcome)> = vec![
        ("1", "catalog Mellin transforms, analytic vs numeric", catalog),
        ("2", "multiplication theorem", multiplication_theorem),
        ("3", "closed-form Delta", closed_form_delta),
        ("4", "unbiasedness of the truncated estimator", unbiasedness),
        ("5", "consistency with k_n = n^(1/4)", consistency),
        ("6", "nonparametric rate, target 2(1-x)", nonparametric_rate),
        ("7", "parametric regime, Laplace(1), Beta(2), c = 0", parametric_regime),
        ("7b", "parametric regime at admissible c (supplementary)", parametric_regime_admissible_c),
        ("8", "adaptive rule vs oracle cut-off", adaptive_oracle),
        ("9", "Mellin-Sobolev membership of 2(1-x)", sobolev_membership),
        ("10", "determinism across thread counts", determinism),
    ];
    let mut hard_failures = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = match o.infeasible {
            Some(reason) => format!(" [infeasible as stated: {reason}]"),
            None => String::new(),
        };
        println!("{status} {id:>3}  {name}: {}{note} ({secs:.1}s)", o.detail);
        if !o.pass && o.infeasible.is_none() {
            hard_failures += 1;
        }
    }
    if hard_failures > 0 {
        println!("{hard_failures} attainable criterion(s) failed");
        std::process::exit(1);
    }
}
