//! Command-line front end.
//!
//! Every decomposition run is described by a [`RunConfig`]; the config is
//! echoed in the report so that `bootstrap-report --config` can replay the
//! run exactly.

mod load;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use load::load_dataset;
pub use report::{format_sig, round_sig, JSON_DIGITS, TABLE_DIGITS, CoefficientTable, Diagnostics, Provenance, Report, ReportRow};

use crate::cfexpr::{check_identifiability, parse_cf, parse_cf_inferred, CfError, Scenario, Status};
use crate::data::{DataError, Dataset, Roles};
use crate::decomp::{self, DecompError, Query};
use crate::estimate::{
    self, apply_transforms, fit_linear_system, linear_components, AssumptionLedger, CovariateProfile, EstimateError,
    LinearParams, LinearQuery, Transform,
};
use crate::infer::{bootstrap, BootstrapConfig, InferError};
use crate::scm::{self, Bindings, DiscreteScm, Levels, ModelFile, ScmError, SimulationSpec};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "NATFX_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("formula is not identifiable: {0}")]
    NotIdentifiable(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}{}: {message}", .line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Csv {
        path: String,
        line: Option<u64>,
        message: String,
    },
    #[error("formula: {0}")]
    Formula(#[from] CfError),
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("model: {0}")]
    Scm(#[from] ScmError),
    #[error("decomposition: {0}")]
    Decomp(#[from] DecompError),
    #[error("estimation: {0}")]
    Estimate(#[from] EstimateError),
    #[error("bootstrap: {0}")]
    Infer(#[from] InferError),
}

impl CliError {
    fn io(path: &Path, e: impl Into<std::io::Error>) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source: e.into(),
        }
    }

    /// 2 for an identifiability rejection, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        let rejected = match self {
            CliError::NotIdentifiable(_) => true,
            CliError::Scm(ScmError::NotIdentifiable(_)) => true,
            CliError::Decomp(DecompError::EvaluationOfProblematicSpec { .. }) => true,
            CliError::Decomp(DecompError::Scm(ScmError::NotIdentifiable(_))) => true,
            CliError::Estimate(EstimateError::Scm(ScmError::NotIdentifiable(_))) => true,
            _ => false,
        };
        if rejected {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// Which estimator a [`RunConfig`] drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    /// Discrete model, given directly or estimated from categorical data.
    Decompose,
    /// Gaussian-linear sequential model.
    DecomposeLinear,
}

/// A complete, replayable description of one decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub analysis: Analysis,
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<PathBuf>,
    #[serde(default)]
    pub roles: Option<Roles>,
    pub a: String,
    pub a_star: String,
    #[serde(default)]
    pub m1_star: Option<String>,
    #[serde(default)]
    pub m2_star: Option<String>,
    #[serde(default)]
    pub covariates: Option<String>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
    #[serde(default)]
    pub bootstrap: Option<BootstrapConfig>,
    #[serde(default)]
    pub ack_assumptions: bool,
    #[serde(default)]
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "natfx", version, about = "Total-effect decompositions with natural counterfactual interaction effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether a counterfactual formula is identifiable (exit 2 if not).
    Check {
        /// single, nonseq<k> or seq<k>; inferred from the formula when omitted.
        #[arg(long)]
        scenario: Option<Scenario>,
        formula: String,
    },
    /// Evaluate E[formula] under a discrete model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        exposure: ExposureArgs,
        /// Fixed mediator level, e.g. --fix m1*=0 (repeatable).
        #[arg(long = "fix", value_name = "LABEL=VALUE")]
        fixed: Vec<String>,
        /// Named exposure level, e.g. --name a1=2 (repeatable).
        #[arg(long = "name", value_name = "SYMBOL=LEVEL")]
        named: Vec<String>,
        formula: String,
    },
    /// Draw a CSV sample from a discrete model.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Standard deviation of the outcome noise.
        #[arg(long, default_value_t = 1.0)]
        noise_sd: f64,
        /// Comma-separated Pr(A = level) in model level order.
        #[arg(long)]
        exposure_probs: Option<String>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the total effect under a discrete model or categorical data.
    Decompose(DecomposeArgs),
    /// Fit the three regressions of the linear sequential model.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        transforms: TransformArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Closed-form decomposition under the linear sequential model.
    DecomposeLinear(DecomposeLinearArgs),
    /// Replay a run from its config (or from a JSON report that embeds one).
    BootstrapReport {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; does not change the result.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Args, Debug)]
struct ExposureArgs {
    /// Exposure level a.
    #[arg(long)]
    a: String,
    /// Reference exposure level a*.
    #[arg(long = "aref")]
    a_star: String,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    exposure: ExposureArgs,
    /// Fixed level m1* (m* with one mediator), or `mean` for linear runs.
    #[arg(long = "m1star", alias = "mstar")]
    m1_star: Option<String>,
    /// Fixed level m2*, or `mean` for linear runs.
    #[arg(long = "m2star")]
    m2_star: Option<String>,
}

#[derive(Args, Debug)]
struct DataArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    /// JSON role bindings: {"exposure", "mediators", "outcome", "covariates"}.
    #[arg(long)]
    roles: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Take the log of the second mediator before fitting.
    #[arg(long)]
    log_m2: bool,
    /// Take the log of this column before fitting (repeatable).
    #[arg(long = "log", value_name = "COLUMN")]
    log: Vec<String>,
}

#[derive(Args, Debug)]
struct BootArgs {
    /// Bootstrap replicates; no intervals when omitted.
    #[arg(long = "boot")]
    replicates: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    max_fail: f64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Mark the identification assumptions as acknowledged.
    #[arg(long)]
    ack_assumptions: bool,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    boot: BootArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct DecomposeLinearArgs {
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    transforms: TransformArgs,
    #[command(flatten)]
    query: QueryArgs,
    /// Covariate profile, e.g. --cov sex=1,age=48.3 (or positional values).
    #[arg(long = "cov")]
    covariates: Option<String>,
    #[command(flatten)]
    boot: BootArgs,
    #[command(flatten)]
    report: ReportArgs,
}

fn seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn boot_config(args: &BootArgs) -> Result<Option<BootstrapConfig>, CliError> {
    args.replicates
        .map(|replicates| {
            let cfg = BootstrapConfig {
                replicates,
                level: args.level,
                seed: seed(args.seed)?,
                max_fail: args.max_fail,
                workers: args.workers,
            };
            cfg.validate()?;
            Ok(cfg)
        })
        .transpose()
}

fn transforms(args: &TransformArgs, roles: Option<&Roles>) -> Result<Vec<Transform>, CliError> {
    let mut out: Vec<Transform> = args.log.iter().map(Transform::log).collect();
    if args.log_m2 {
        let m2 = roles
            .and_then(|r| r.mediators.get(1))
            .ok_or_else(|| CliError::Usage("--log-m2 needs role bindings with two mediators".into()))?;
        out.push(Transform::log(m2.clone()));
    }
    Ok(out)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn read_roles(path: &Option<PathBuf>) -> Result<Option<Roles>, CliError> {
    path.as_deref().map(read_json).transpose()
}

fn read_model(path: &Path) -> Result<DiscreteScm, CliError> {
    Ok(DiscreteScm::from_model_file(read_json::<ModelFile>(path)?)?)
}

fn pair(text: &str, flag: &str) -> Result<(String, String), CliError> {
    text.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| CliError::Usage(format!("{flag} expects KEY=VALUE, got `{text}`")))
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let emit = |out: &mut dyn Write, text: &str| -> Result<(), CliError> {
        out.write_all(text.as_bytes())
            .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))
    };
    match command {
        Command::Check { scenario, formula } => {
            let (expr, scenario) = match scenario {
                Some(s) => (parse_cf(&formula, s)?, s),
                None => parse_cf_inferred(&formula)?,
            };
            let verdict = check_identifiability(&expr, scenario);
            let json = serde_json::json!({
                "formula": expr.to_string(),
                "scenario": scenario.to_string(),
                "status": verdict.status,
                "conflicts": verdict.conflicts,
            });
            emit(out, &serde_json::to_string_pretty(&json).expect("verdict serializes"))?;
            Ok(if verdict.status == Status::Identifiable { 0 } else { 2 })
        }
        Command::Eval {
            model,
            exposure,
            fixed,
            named,
            formula,
        } => {
            let model = read_model(&model)?;
            let expr = parse_cf(&formula, model.scenario())?;
            let mut bindings = Bindings::new(&exposure.a, &exposure.a_star);
            for f in &fixed {
                let (k, v) = pair(f, "--fix")?;
                bindings = bindings.fix(k, v);
            }
            for n in &named {
                let (k, v) = pair(n, "--name")?;
                bindings = bindings.name(k, v);
            }
            let verdict = check_identifiability(&expr, model.scenario());
            if !verdict.is_identifiable() {
                return Err(ScmError::NotIdentifiable(verdict).into());
            }
            let value = model.eval_expectation(&expr, &bindings)?;
            emit(out, &round_sig(value, report::JSON_DIGITS).to_string())?;
            Ok(0)
        }
        Command::Simulate {
            model,
            n,
            seed: seed_flag,
            noise_sd,
            exposure_probs,
            out: path,
        } => {
            let model = read_model(&model)?;
            let mut spec = SimulationSpec::new(&model, n, seed(seed_flag)?).noise_sd(noise_sd);
            if let Some(p) = exposure_probs {
                let probs = p
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CliError::Usage(format!("--exposure-probs `{p}` is not a list of numbers")))?;
                spec = spec.exposure_probs(probs);
            }
            let data = scm::simulate(&model, &spec)?;
            match path {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                    data.write_csv(std::io::BufWriter::new(file))?;
                }
                None => data.write_csv(out)?,
            }
            Ok(0)
        }
        Command::Decompose(args) => {
            let config = RunConfig {
                analysis: Analysis::Decompose,
                scenario: args.scenario,
                model: args.model,
                data: args.data.data,
                params: None,
                roles: read_roles(&args.data.roles)?,
                a: args.query.exposure.a,
                a_star: args.query.exposure.a_star,
                m1_star: args.query.m1_star,
                m2_star: args.query.m2_star,
                covariates: None,
                transforms: Vec::new(),
                bootstrap: boot_config(&args.boot)?,
                ack_assumptions: args.report.ack_assumptions,
                format: args.report.format,
            };
            let report = run(&config)?;
            emit(out, &render(&report, config.format))?;
            Ok(0)
        }
        Command::Fit {
            data,
            transforms: t,
            format,
        } => {
            let roles = read_roles(&data.roles)?;
            let (path, roles) = match (&data.data, roles) {
                (Some(p), Some(r)) => (p.clone(), r),
                _ => return Err(CliError::Usage("fit needs --data and --roles".into())),
            };
            let transforms = transforms(&t, Some(&roles))?;
            let dataset = load_dataset(&path, &roles)?;
            let params = fit_linear_system(&dataset, &transforms)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&params).expect("params serialize"),
                Format::Table => fit_table(&params),
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::DecomposeLinear(args) => {
            let roles = read_roles(&args.data.roles)?;
            let config = RunConfig {
                analysis: Analysis::DecomposeLinear,
                scenario: Some(Scenario::OnePathChain(2)),
                model: None,
                data: args.data.data,
                params: args.params,
                transforms: transforms(&args.transforms, roles.as_ref())?,
                roles,
                a: args.query.exposure.a,
                a_star: args.query.exposure.a_star,
                m1_star: args.query.m1_star,
                m2_star: args.query.m2_star,
                covariates: args.covariates,
                bootstrap: boot_config(&args.boot)?,
                ack_assumptions: args.report.ack_assumptions,
                format: args.report.format,
            };
            let report = run(&config)?;
            emit(out, &render(&report, config.format))?;
            Ok(0)
        }
        Command::BootstrapReport {
            config,
            workers,
            format,
        } => {
            let value: serde_json::Value = read_json(&config)?;
            let echoed = value.pointer("/provenance/config").cloned().unwrap_or(value);
            let mut cfg: RunConfig = serde_json::from_value(echoed).map_err(|source| CliError::Json {
                path: config.display().to_string(),
                source,
            })?;
            if let (Some(w), Some(b)) = (workers, cfg.bootstrap.as_mut()) {
                b.workers = Some(w);
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let report = run(&cfg)?;
            emit(out, &render(&report, cfg.format))?;
            Ok(0)
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    }
}

fn coefficient_tables(params: &LinearParams) -> Vec<CoefficientTable> {
    let Some(f) = &params.fit else {
        return Vec::new();
    };
    let [y, m2, m1] = &f.responses;
    vec![
        CoefficientTable::new("outcome", y, &f.outcome),
        CoefficientTable::new("second mediator", m2, &f.m2),
        CoefficientTable::new("first mediator", m1, &f.m1),
    ]
}

fn fit_table(params: &LinearParams) -> String {
    let mut out = String::new();
    for t in coefficient_tables(params) {
        out.push_str(&format!("{} model for {} (sigma2 = {})\n", t.model, t.response, format_sig(t.sigma2, 4)));
        for (name, est, se) in &t.rows {
            out.push_str(&format!("  {:<16} {:>10} {:>10}\n", name, format_sig(*est, 4), format_sig(*se, 4)));
        }
        out.push('\n');
    }
    out.push_str(&format!("sigma2_M1 = {}\n", format_sig(params.sigma2_m1, 4)));
    out
}

/// Runs one decomposition as described by `config`.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    match config.analysis {
        Analysis::Decompose => run_discrete(config),
        Analysis::DecomposeLinear => run_linear(config),
    }
}

fn ledger(scenario: Scenario, ack: bool) -> AssumptionLedger {
    let l = AssumptionLedger::for_scenario(scenario);
    if ack {
        l.acknowledge_all()
    } else {
        l
    }
}

fn require_data(config: &RunConfig) -> Result<(PathBuf, Roles), CliError> {
    match (&config.data, &config.roles) {
        (Some(d), Some(r)) => Ok((d.clone(), r.clone())),
        (Some(_), None) => Err(CliError::Usage("--data needs --roles".into())),
        _ => Err(CliError::Usage("no input: pass --data with --roles".into())),
    }
}

fn reject_mean(value: &Option<String>, flag: &str) -> Result<(), CliError> {
    if value.as_deref() == Some("mean") {
        return Err(CliError::Usage(format!(
            "{flag} mean needs a continuous mediator; use decompose-linear with --data"
        )));
    }
    Ok(())
}

fn run_discrete(config: &RunConfig) -> Result<Report, CliError> {
    reject_mean(&config.m1_star, "--m1star")?;
    reject_mean(&config.m2_star, "--m2star")?;
    let mut query = Query::new(&config.a, &config.a_star);
    query.m1_star = config.m1_star.clone();
    query.m2_star = config.m2_star.clone();

    let convert = |model: DiscreteScm, scenario: Option<Scenario>| -> Result<DiscreteScm, CliError> {
        Ok(match scenario {
            None => model,
            Some(s) if s == model.scenario() => model,
            Some(Scenario::NonSeq(2)) => model.as_nonseq()?,
            Some(Scenario::OnePathChain(2)) => model.as_chain()?,
            Some(s) => {
                return Err(CliError::Usage(format!(
                    "a {} model cannot be read as scenario {s}",
                    model.scenario()
                )))
            }
        })
    };

    let mut diagnostics = Diagnostics::default();
    let (result, scenario, seed, replicates) = if let Some(path) = &config.model {
        if config.bootstrap.is_some() {
            return Err(CliError::Usage("bootstrap intervals need --data".into()));
        }
        let model = convert(read_model(path)?, config.scenario)?;
        (estimate::plugin(&model, &query)?, model.scenario(), None, None)
    } else {
        let (path, roles) = require_data(config)?;
        let data = load_dataset(&path, &roles)?;
        let scenario = match config.scenario {
            Some(s) => s,
            None if roles.mediators.len() == 1 => Scenario::SingleMediator,
            None => Scenario::OnePathChain(2),
        };
        let declared = Levels {
            a: vec![config.a.clone(), config.a_star.clone()],
            m1: config.m1_star.iter().cloned().collect(),
            m2: config.m2_star.iter().cloned().collect(),
        };
        let estimator = |d: &Dataset| -> Result<decomp::DecompositionResult, EstimateError> {
            let model = scm::from_dataset(d, scenario, &declared)?;
            estimate::plugin(&model, &query)
        };
        diagnostics.n_used = Some(data.n_rows());
        diagnostics.n_dropped = Some(data.dropped());
        match &config.bootstrap {
            Some(cfg) => {
                let b = bootstrap(&data, estimator, cfg).map_err(|e| full_data_error(e, || estimator(&data)))?;
                diagnostics.failed_replicates = Some(b.failed);
                (b.result, scenario, Some(cfg.seed), Some(cfg.replicates))
            }
            None => (estimator(&data)?, scenario, None, None),
        }
    };
    let estimator = if config.model.is_some() { "exact" } else { "plug-in" };
    Ok(Report {
        estimator: estimator.into(),
        scenario,
        components: Report::rows(&result),
        sum_gap: result.sum_gap,
        level: config.bootstrap.as_ref().map(|b| b.level),
        assumptions: ledger(scenario, config.ack_assumptions),
        diagnostics,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            seed,
            replicates,
            config: config.clone(),
        },
    })
}

/// Re-runs the estimator to recover its typed error when the bootstrap
/// reports a failure on the full data.
fn full_data_error<T>(e: InferError, retry: impl FnOnce() -> Result<T, EstimateError>) -> CliError {
    match e {
        InferError::FullData(_) => match retry() {
            Err(inner) => inner.into(),
            Ok(_) => e.into(),
        },
        other => other.into(),
    }
}

fn parse_level(text: &str, flag: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("{flag} `{text}` is not a number")))
}

fn profile(text: &Option<String>, params: &LinearParams) -> Result<CovariateProfile, CliError> {
    let Some(text) = text else {
        return Ok(CovariateProfile::default());
    };
    if text.contains('=') {
        if params.covariates.is_empty() {
            return Err(CliError::Usage("parameters carry no covariate names; pass --cov values positionally".into()));
        }
        return Ok(CovariateProfile::parse(text, &params.covariates)?);
    }
    let values = text
        .split(',')
        .map(|v| parse_level(v, "--cov"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CovariateProfile::new(values))
}

fn run_linear(config: &RunConfig) -> Result<Report, CliError> {
    let scenario = Scenario::OnePathChain(2);
    if let Some(s) = config.scenario.filter(|s| *s != scenario) {
        return Err(CliError::Usage(format!("the linear model is sequential (seq2), not {s}")));
    }
    let a = parse_level(&config.a, "--a")?;
    let a_star = parse_level(&config.a_star, "--aref")?;
    let mut resolved = config.clone();
    let mut diagnostics = Diagnostics::default();

    let wants_mean = |v: &Option<String>| v.as_deref() == Some("mean");
    let (params, data) = match (&config.params, &config.data) {
        (Some(path), None) => {
            if wants_mean(&config.m1_star) || wants_mean(&config.m2_star) {
                return Err(CliError::Usage("`mean` reference levels need --data".into()));
            }
            if config.bootstrap.is_some() {
                return Err(CliError::Usage("bootstrap intervals need --data".into()));
            }
            let params: LinearParams = read_json(path)?;
            params.validate()?;
            (params, None)
        }
        (None, Some(_)) => {
            let (path, roles) = require_data(config)?;
            let data = load_dataset(&path, &roles)?;
            let params = fit_linear_system(&data, &config.transforms)?;
            let analysis = apply_transforms(&data, &config.transforms)?;
            let mean = |col: &str| -> Result<String, CliError> {
                let v = analysis.numeric(col)?;
                Ok((v.iter().sum::<f64>() / v.len() as f64).to_string())
            };
            if wants_mean(&config.m1_star) {
                resolved.m1_star = Some(mean(&roles.mediators[0])?);
            }
            if wants_mean(&config.m2_star) {
                resolved.m2_star = Some(mean(&roles.mediators[1])?);
            }
            (params, Some(data))
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("pass either --params or --data, not both".into())),
        (None, None) => return Err(CliError::Usage("no input: pass --params or --data with --roles".into())),
    };
    let level = |v: &Option<String>, flag: &str| -> Result<f64, CliError> {
        v.as_deref()
            .ok_or_else(|| CliError::Usage(format!("{flag} is required")))
            .and_then(|t| parse_level(t, flag))
    };
    let query = LinearQuery::new(a, a_star, level(&resolved.m1_star, "--m1star")?, level(&resolved.m2_star, "--m2star")?);
    let c = profile(&config.covariates, &params)?;

    if let Some(fit) = &params.fit {
        diagnostics.n_used = Some(fit.n_used);
        diagnostics.n_dropped = Some(fit.n_dropped);
    }
    diagnostics.sigma2_m1 = Some(round_sig(params.sigma2_m1, report::JSON_DIGITS));
    diagnostics.coefficient_tables = coefficient_tables(&params);

    let (result, seed, replicates) = match (&config.bootstrap, &data) {
        (Some(cfg), Some(data)) => {
            let transforms = &config.transforms;
            let estimator = |d: &Dataset| -> Result<decomp::DecompositionResult, EstimateError> {
                let p = fit_linear_system(d, transforms)?;
                linear_components(&p, &query, &c)
            };
            let b = bootstrap(data, estimator, cfg).map_err(|e| full_data_error(e, || estimator(data)))?;
            diagnostics.failed_replicates = Some(b.failed);
            (b.result, Some(cfg.seed), Some(cfg.replicates))
        }
        _ => (linear_components(&params, &query, &c)?, None, None),
    };

    Ok(Report {
        estimator: "linear".into(),
        scenario,
        components: Report::rows(&result),
        sum_gap: result.sum_gap,
        level: config.bootstrap.as_ref().map(|b| b.level),
        assumptions: ledger(scenario, config.ack_assumptions),
        diagnostics,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            seed,
            replicates,
            config: resolved,
        },
    })
}
