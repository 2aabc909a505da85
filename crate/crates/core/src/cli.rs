//! The `mellin-deconv` command line.
//!
//! Exit status: 0 success, 2 malformed input, 3 violated assumption
//! (inadmissible `c`, unbounded weighted sup-norm, divergent moments),
//! 4 numerical failure.

use crate::adaptive::{select_k, GridMode, SelectionConfig, CERTIFIED_CHI};
use crate::error::{Error, Result};
use crate::estimator::{delta_psi_g_many, regime_of, theta_hat, Sample};
use crate::functionals::{FunctionalSpec, PsiDecay, Regime};
use crate::mellin::{decay_class_g, DecayClass, ErrorModel};
use crate::simulation::{mc_mse, rate_experiment, with_threads, McReport, RatePlan, RateReport, Scenario};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

const ERROR_HELP: &str = "Error density U as name:param[:param...]. \
Smooth (polynomial Mellin decay): beta:b (density b(1-x)^(b-1) on (0,1), c > 0), uniform (= beta:1), \
loggamma:mu:a:lambda (c < lambda+1), pareto:mu:lambda. \
Super-smooth (exponential Mellin decay): gamma:d (c > 1-d), exp (= gamma:1), weibull:m (c > 1-m), \
lognormal:mu:lambda (any c).";

const C_HELP: &str = "Development point c of the Mellin transform. Must be admissible for the error density \
(see --error) and for the functional: cdf and laplace need c < 1, survival needs c > 1, density accepts any c.";

const FUNCTIONAL_HELP: &str = "Functional of the density f of X to estimate at --x0: density f(x0), \
cdf F(x0), survival 1-F(x0) or laplace E exp(-x0 X). density and cdf/survival have polynomially decaying \
kernels, laplace an exponentially decaying one.";

#[derive(Debug, Parser)]
#[command(
    name = "mellin-deconv",
    version,
    about = "Estimate linear functionals of the density of X from samples of Y = X*U with known error density",
    after_help = "Exit status: 0 success, 2 malformed input, 3 violated assumption, 4 numerical failure."
)]
pub struct Cli {
    /// Worker threads for simulations (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral cut-off estimate at a fixed k, or with --adaptive the data-driven choice of k.
    Estimate(EstimateArgs),
    /// Data-driven cut-off selection; prints the full per-k table.
    Select(SelectArgs),
    /// Variance proxy Delta(k) = (1/2pi) int_{-k}^{k} |Psi/M_c[g]|^2.
    Delta(DeltaArgs),
    /// Parametric or nonparametric behaviour of Delta for a functional and error density.
    Regime(ModelArgs),
    /// Monte Carlo risk of a scenario file.
    Simulate(SimulateArgs),
    /// Convergence-rate experiment over several sample sizes.
    Rates(RatesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FunctionalKind {
    Density,
    Cdf,
    Survival,
    Laplace,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridArg {
    /// k <= sqrt(n)/ln(n)^2, requires chi >= 72
    Theoretical,
    /// k <= sqrt(n), any chi >= 0, reports are flagged non-certified
    Practical,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, help = FUNCTIONAL_HELP)]
    functional: FunctionalKind,
    /// Evaluation point, x0 > 0.
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, allow_negative_numbers = true, help = C_HELP)]
    c: f64,
    #[arg(long, help = ERROR_HELP)]
    error: String,
}

#[derive(Debug, Args)]
struct SelectionArgs {
    /// Penalty constant chi; the oracle inequality needs chi >= 72 (the default).
    #[arg(long)]
    chi: Option<f64>,
    /// Candidate grid. The error density must have sup_x x^(2c-1) g(x) < infinity.
    #[arg(long, value_enum, default_value = "theoretical")]
    grid: GridArg,
    /// Upper bound on the candidate cut-offs.
    #[arg(long)]
    max_k: Option<u32>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("cutoff").required(true).args(["k", "adaptive"])))]
struct EstimateArgs {
    /// Sample file: one positive number per line.
    input: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Fixed spectral cut-off k > 0.
    #[arg(long)]
    k: Option<f64>,
    /// Choose k from the data.
    #[arg(long)]
    adaptive: bool,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Sample file: one positive number per line.
    input: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DeltaArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Cut-offs k >= 0; repeat or separate with commas.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1..)]
    k: Vec<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario JSON (target, error, functional, c, n, replications, seed, selection).
    scenario: PathBuf,
    /// JSON report path; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Per-replication CSV: n,replication,k,theta_hat,theta_true,squared_error.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RatesArgs {
    /// Rate plan JSON: {"scenario": {...}, "n_list": [...], "smoothness": s}.
    plan: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Plot-ready CSV: log_n,log_mse,stderr (stderr of log mse).
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(FunctionalSpec, ErrorModel, f64)> {
        let name = match self.functional {
            FunctionalKind::Density => "density",
            FunctionalKind::Cdf => "cdf",
            FunctionalKind::Survival => "survival",
            FunctionalKind::Laplace => "laplace",
        };
        let spec = FunctionalSpec::from_name(name, self.x0).map_err(as_input)?;
        let model: ErrorModel = self.error.parse()?;
        model.validate().map_err(as_input)?;
        if !self.c.is_finite() {
            return Err(Error::Input(format!("c must be finite, got {}", self.c)));
        }
        spec.check_c(self.c)?;
        model.check_c(self.c)?;
        Ok((spec, model, self.c))
    }
}

fn as_input(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Input(m),
        other => other,
    }
}

impl SelectionArgs {
    fn config(&self) -> Result<SelectionConfig> {
        let cfg = SelectionConfig {
            chi: self.chi.unwrap_or(CERTIFIED_CHI),
            grid_mode: match self.grid {
                GridArg::Theoretical => GridMode::Theoretical,
                GridArg::Practical => GridMode::Practical,
            },
            max_k_override: self.max_k,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses one positive number per line; blank lines are skipped.
pub fn parse_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Input(format!("line {}: cannot parse '{line}' as a number", i + 1)))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Input(format!("line {}: value must be positive and finite, got {line}", i + 1)));
        }
        values.push(v);
    }
    Sample::new(values)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

/// Deserializes JSON and reports schema violations with a JSON pointer.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => write!(pointer, "/{index}").unwrap(),
                Segment::Map { key } => write!(pointer, "/{}", key.replace('~', "~0").replace('/', "~1")).unwrap(),
                Segment::Enum { variant } => write!(pointer, "/{variant}").unwrap(),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        if pointer.is_empty() {
            pointer.push('/');
        }
        Error::Input(format!("schema violation at {pointer}: {}", e.inner()))
    })
}

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>, stdout: &mut dyn std::io::Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("cannot write to standard output: {e}"))),
    }
}

pub fn records_csv(report: &McReport) -> String {
    let mut out = String::from("n,replication,k,theta_hat,theta_true,squared_error\n");
    for r in &report.records {
        writeln!(out, "{},{},{},{},{},{}", r.n, r.replication, r.k, r.theta_hat, r.theta_true, r.squared_error).unwrap();
    }
    out
}

/// `log_n,log_mse,stderr` where `stderr` is the delta-method standard error
/// of `log mse`, i.e. `stderr(mse)/mse`.
pub fn rates_csv(report: &RateReport) -> String {
    let mut out = String::from("log_n,log_mse,stderr\n");
    for ((n, m), s) in report.n_list.iter().zip(&report.mse_by_n).zip(&report.stderr_by_n) {
        writeln!(out, "{},{},{}", (*n as f64).ln(), m.ln(), s / m).unwrap();
    }
    out
}

#[derive(Serialize)]
struct DeltaValue {
    k: f64,
    delta: f64,
}

#[derive(Serialize)]
struct DeltaReport {
    functional: String,
    error: String,
    c: f64,
    regime: Regime,
    values: Vec<DeltaValue>,
}

#[derive(Serialize)]
struct RegimeReport {
    functional: String,
    error: String,
    c: f64,
    psi_decay: PsiDecay,
    error_decay: DecayClass,
    regime: Regime,
}

fn run_command(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    match cli.command {
        Command::Estimate(a) => {
            if let Some(k) = a.k {
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Error::Input(format!("--k must be positive and finite, got {k}")));
                }
            }
            let (spec, model, c) = a.model.resolve()?;
            let config = if a.adaptive { Some(a.selection.config()?) } else { None };
            let sample = parse_sample(&read_text(&a.input)?)?;
            match (a.k, config) {
                (Some(k), _) => emit(&theta_hat(&sample, &spec, &model, c, k)?, a.output.as_deref(), stdout),
                (None, Some(cfg)) => emit(&select_k(&sample, &spec, &model, c, cfg)?, a.output.as_deref(), stdout),
                (None, None) => Err(Error::Input("either --k or --adaptive is required".into())),
            }
        }
        Command::Select(a) => {
            let (spec, model, c) = a.model.resolve()?;
            let cfg = a.selection.config()?;
            let sample = parse_sample(&read_text(&a.input)?)?;
            emit(&select_k(&sample, &spec, &model, c, cfg)?, a.output.as_deref(), stdout)
        }
        Command::Delta(a) => {
            let (spec, model, c) = a.model.resolve()?;
            let mut ks = a.k.clone();
            if ks.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
                return Err(Error::Input("--k values must be nonnegative and finite".into()));
            }
            ks.sort_by(f64::total_cmp);
            let values = delta_psi_g_many(&spec, &model, c, &ks)?;
            let report = DeltaReport {
                functional: spec.to_string(),
                error: model.to_string(),
                c,
                regime: regime_of(&spec, &model, c)?,
                values: ks.into_iter().zip(values).map(|(k, delta)| DeltaValue { k, delta }).collect(),
            };
            emit(&report, a.output.as_deref(), stdout)
        }
        Command::Regime(a) => {
            let (spec, model, c) = a.resolve()?;
            let report = RegimeReport {
                functional: spec.to_string(),
                error: model.to_string(),
                c,
                psi_decay: spec.decay(c),
                error_decay: decay_class_g(&model, c)?,
                regime: regime_of(&spec, &model, c)?,
            };
            emit(&report, None, stdout)
        }
        Command::Simulate(a) => {
            let scenario: Scenario = parse_json(&read_text(&a.scenario)?)?;
            scenario.validate()?;
            let report = with_threads(cli.threads, || mc_mse(&scenario))??;
            if let Some(csv) = &a.csv {
                write_atomic(csv, records_csv(&report).as_bytes())?;
            }
            emit(&report, a.output.as_deref(), stdout)
        }
        Command::Rates(a) => {
            let plan: RatePlan = parse_json(&read_text(&a.plan)?)?;
            plan.validate()?;
            let report = with_threads(cli.threads, || rate_experiment(&plan))??;
            if let Some(csv) = &a.csv {
                write_atomic(csv, rates_csv(&report).as_bytes())?;
            }
            emit(&report, a.output.as_deref(), stdout)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let sink: &mut dyn std::io::Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run_command(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "mellin-deconv: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_parsing_reports_lines() {
        assert_eq!(parse_sample("1\n2\n\n3\n").unwrap().n(), 3);
        let e = parse_sample("1\nabc\n").unwrap_err();
        assert_eq!(e.to_string(), "invalid input: line 2: cannot parse 'abc' as a number");
        let e = parse_sample("1\n2\n-4\n").unwrap_err();
        assert!(e.to_string().contains("line 3"));
        assert!(parse_sample("\n\n").is_err());
    }

    #[test]
    fn json_errors_carry_a_pointer() {
        let text = r#"{"scenario": {"target": {"kind": "beta", "b": 2}}, "n_list": [1, "x"]}"#;
        let e = parse_json::<RatePlan>(text).unwrap_err();
        assert!(matches!(e, Error::Input(_)));
        assert!(e.to_string().contains("schema violation at /"), "{e}");
        let e = parse_json::<Scenario>(r#"{"target": {"kind": "beta", "b": -1}}"#).unwrap_err();
        assert!(e.to_string().contains("/target"), "{e}");
    }

    #[test]
    fn exit_codes() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["mellin-deconv", "--help"], &mut out, &mut err), 0);
        assert_eq!(run(["mellin-deconv", "nonsense"], &mut out, &mut err), 2);
        let args = [
            "mellin-deconv", "regime", "--functional", "cdf", "--x0", "1", "--c", "2", "--error", "beta:1",
        ];
        assert_eq!(run(args, &mut out, &mut err), 3);
        let args = [
            "mellin-deconv", "regime", "--functional", "laplace", "--x0", "1", "--c", "0.5", "--error", "beta:1",
        ];
        out.clear();
        assert_eq!(run(args, &mut out, &mut err), 0);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"regime\": \"parametric\""), "{text}");
    }
}
