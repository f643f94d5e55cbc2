mod model_spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use randsum::cumulants::{
    analytic_cumulants, bernstein_check, index_cumulant_check, k_statistics, mdp_speed_threshold, random_sum_cumulants,
    statulevicius_check, MAX_EMPIRICAL_ORDER,
};
use randsum::models::{Cgf, RandomSumSpec, SummandModel};
use randsum::rng::{run_blocks, Sampling};
use randsum::verify::{
    limit_law_check, rate_curve_experiment, read_config, theoretical_rate, write_rate_table, write_report, write_rows,
    ExperimentConfig, IndexFamily, TheoryRate,
};
use randsum::Error;

use model_spec::ModelSpec;

#[derive(Parser)]
#[command(
    name = "randsum",
    version,
    about = "Rate functions, tail simulations and cumulant diagnostics for random sums"
)]
struct Cli {
    /// Overrides the seed of the config (or of the command's own sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = "RANDSUM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a theoretical rate function.
    RateTable {
        #[arg(long, value_enum)]
        theory: TheoryArg,
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[arg(long, value_enum, default_value = "gaussian")]
        summand: SummandArg,
        /// Defaults to the index the theory is stated for.
        #[arg(long, value_enum)]
        index: Option<IndexArg>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the tail estimators of a config and write the rate table.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV path; a `.json` metadata sidecar is written next to it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analytic cumulants, condition checks and optional k-statistics.
    Cumulants {
        /// e.g. `rademacher`, `poisson:100`, `geometric:0.01+gaussian`.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// Statulevičius exponent.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Candidate Bernstein constant.
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        /// Candidate index-cumulant constant.
        #[arg(long, default_value_t = 1.0)]
        k2: f64,
        /// Candidate Statulevičius constant; defaults to the fitted one.
        #[arg(long)]
        delta: Option<f64>,
        /// Draw this many samples for k-statistics (0 disables).
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a config and write `report.csv` and `report.json` into a directory.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Kolmogorov-Smirnov distance of `Z_{k,0}` to its limit law.
    LimitLaw {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Quadratic,
    GeometricMdp,
    PoissonLdp,
    CramerComposition,
}

impl TheoryArg {
    fn rate(self) -> TheoryRate {
        match self {
            TheoryArg::Quadratic => TheoryRate::Quadratic,
            TheoryArg::GeometricMdp => TheoryRate::GeometricMdp,
            TheoryArg::PoissonLdp => TheoryRate::PoissonLdp,
            TheoryArg::CramerComposition => TheoryRate::CramerComposition,
        }
    }

    fn default_index(self) -> Option<IndexFamily> {
        match self {
            TheoryArg::Quadratic => None,
            TheoryArg::GeometricMdp => Some(IndexFamily::Geometric),
            TheoryArg::PoissonLdp | TheoryArg::CramerComposition => Some(IndexFamily::Poisson),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SummandArg {
    Gaussian,
    Rademacher,
    ShiftedExponential,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Poisson,
    Geometric,
    Deterministic,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Io { .. } | Error::InvalidModel(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn emit_json(output: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes") + "\n";
    emit(output, text.as_bytes())
}

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    if !path.exists() {
        return Err(Failure::Usage(format!("config file not found: {}", path.display())));
    }
    let mut config = read_config(path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn rate_table(
    theory: TheoryArg,
    t: &[f64],
    summand: SummandArg,
    index: Option<IndexArg>,
    output: Option<&Path>,
) -> CmdResult {
    let summand = match summand {
        SummandArg::Gaussian => SummandModel::standard_gaussian(),
        SummandArg::Rademacher => SummandModel::Rademacher,
        SummandArg::ShiftedExponential => SummandModel::ShiftedExponential,
    };
    let index = index
        .map(|i| match i {
            IndexArg::Poisson => IndexFamily::Poisson,
            IndexArg::Geometric => IndexFamily::Geometric,
            IndexArg::Deterministic => IndexFamily::Deterministic,
        })
        .or(theory.default_index());
    let rows = t
        .iter()
        .map(|&t| theoretical_rate(theory.rate(), &summand, index, t).map(|r| (t, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut buf = Vec::new();
    write_rate_table(&rows, &mut buf).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(output, &buf)?;
    Ok(true)
}

fn simulate(config: &ExperimentConfig, threads: Option<usize>, output: Option<&Path>) -> CmdResult {
    let report = rate_curve_experiment(config, threads)?;
    match output {
        Some(p) => write_report(&report, p)?,
        None => write_rows(&report, std::io::stdout().lock()).map_err(|e| Failure::Runtime(e.to_string()))?,
    }
    Ok(!report.any_failed())
}

fn verify(config: &ExperimentConfig, threads: Option<usize>, dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let report = rate_curve_experiment(config, threads)?;
    let csv = dir.join("report.csv");
    write_report(&report, &csv)?;
    for r in &report.rows {
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "scale {:<10} t {:<6} empirical {:<8} theory {:<8} rel.err {:<8} {}",
            r.scale_param,
            r.t,
            fmt(r.empirical_rate),
            fmt(r.theoretical_rate),
            fmt(r.relative_error),
            r.status.name()
        );
    }
    eprintln!("{} rows, {} failed; wrote {}", report.metadata.rows, report.metadata.failed_rows, csv.display());
    Ok(!report.any_failed())
}

fn limit_law(config: &ExperimentConfig, threads: Option<usize>, output: Option<&Path>) -> CmdResult {
    let param = config.base_parameter()?;
    let spec = RandomSumSpec::new(config.summand_model()?, config.index_model(param)?, config.alpha, config.scaling)?;
    let mut sampling = Sampling::new(config.n_samples, config.seed);
    sampling.threads = threads;
    let result = limit_law_check(&spec, &sampling)?;
    emit_json(output, &serde_json::to_value(&result).expect("result serializes"))?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn cumulants(
    model: &str,
    max_order: usize,
    gamma: f64,
    k1: f64,
    k2: f64,
    delta: Option<f64>,
    samples: u64,
    seed: u64,
    threads: Option<usize>,
    output: Option<&Path>,
) -> CmdResult {
    let spec = model_spec::parse(model).map_err(Failure::Usage)?;
    let mut out = json!({ "model": model, "max_order": max_order });
    match spec {
        ModelSpec::Summand(m) => {
            let seq = analytic_cumulants(&m, max_order)?;
            let moments = (3..=max_order).map(|j| (j, m.raw_moment(j))).collect();
            out["cumulants"] = serde_json::to_value(&seq.values).expect("serializes");
            out["bernstein"] = serde_json::to_value(bernstein_check(&moments, m.variance(), k1)).expect("serializes");
        }
        ModelSpec::Index(m) => {
            let seq = analytic_cumulants(&m, max_order)?;
            out["cumulants"] = serde_json::to_value(&seq.values).expect("serializes");
            out["index_cumulant"] = serde_json::to_value(index_cumulant_check(&m, k2, max_order)?).expect("serializes");
        }
        ModelSpec::RandomSum(s) => {
            let seq = random_sum_cumulants(&s, max_order)?;
            let fitted = statulevicius_check(&seq, gamma, 1.0).fitted_constant;
            let d = delta.unwrap_or(fitted);
            let report = statulevicius_check(&seq, gamma, d);
            out["cumulants"] = serde_json::to_value(&seq.values).expect("serializes");
            out["statulevicius"] = serde_json::to_value(&report).expect("serializes");
            if d.is_finite() {
                out["mdp_speed_threshold"] = json!(mdp_speed_threshold(gamma, d)?);
            }
        }
    }
    if samples > 0 {
        let mut sampling = Sampling::new(samples, seed);
        sampling.threads = threads;
        let xs: Vec<f64> = run_blocks(&sampling, |len, rng| {
            (0..len)
                .map(|_| match &spec {
                    ModelSpec::Summand(m) => m.sample(rng),
                    ModelSpec::Index(m) => m.sample(rng) as f64,
                    ModelSpec::RandomSum(s) => s.sample(rng).z,
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        let k = k_statistics(&xs, max_order.min(MAX_EMPIRICAL_ORDER))?;
        out["k_statistics"] = serde_json::to_value(&k).expect("serializes");
    }
    emit_json(output, &out)?;
    Ok(true)
}

fn run(cli: Cli) -> CmdResult {
    let threads = cli.threads;
    match cli.command {
        Command::RateTable { theory, t, summand, index, output } => {
            rate_table(theory, &t, summand, index, output.as_deref())
        }
        Command::Simulate { config, output } => simulate(&load(&config, cli.seed)?, threads, output.as_deref()),
        Command::Cumulants { model, max_order, gamma, k1, k2, delta, samples, output } => cumulants(
            &model,
            max_order,
            gamma,
            k1,
            k2,
            delta,
            samples,
            cli.seed.unwrap_or(0),
            threads,
            output.as_deref(),
        ),
        Command::Verify { config, output_dir } => verify(&load(&config, cli.seed)?, threads, &output_dir),
        Command::LimitLaw { config, output } => limit_law(&load(&config, cli.seed)?, threads, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
