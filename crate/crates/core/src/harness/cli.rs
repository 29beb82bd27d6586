//! Argument parsing and dispatch for the `ipscore` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::commands::{cmd_axioms, cmd_impossibility, cmd_landscape, cmd_score, cmd_verify, landscape_argmax, Verdict};
use super::config::{BeliefSpec, Mode, Overrides, RunConfig};
use super::csv::write_csv;
use crate::aggregation::AggregationRule;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "ipscore", version, about = "Scoring rules for imprecise forecasts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forecaster value over the interval report grid, as CSV.
    Landscape(RunArgs),
    /// Check (strict) properness for the configured mode.
    Verify(RunArgs),
    /// Pareto efficiency, IIA and dictatorship of an aggregation rule.
    Axioms(AxiomsArgs),
    /// Search for proper non-constant score tables on a report lattice.
    Impossibility(ImpossibilityArgs),
    /// Evaluate one tailored score.
    Score(ScoreArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Report grid spacing.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trapezoid nodes for a uniform theta.
    #[arg(long)]
    pub quadrature_nodes: Option<usize>,
}

impl RunArgs {
    pub fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_path(p).with_context(|| format!("loading config {}", p.display()))?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            mode: self.mode,
            step: self.step,
            seed: self.seed,
            out: self.out.clone(),
            quadrature_nodes: self.quadrature_nodes,
        })?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    Utilitarian,
    Egalitarian,
    FixedLinear,
}

#[derive(Debug, Clone, Args)]
pub struct AxiomsArgs {
    #[arg(long, value_enum, default_value = "utilitarian")]
    pub rule: RuleKind,
    /// Weights for `fixed-linear`, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ImpossibilityArgs {
    /// JSON array of reports (`[lo, hi]` or full credal sets). Defaults to
    /// `{δ0}, {Bern(0.5)}, {δ1}, [0, 0.5], [0, 1]`.
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub tables: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Report as JSON, e.g. `[0.4,0.6]`.
    #[arg(long)]
    pub report: String,
    #[arg(long)]
    pub outcome: usize,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code: 0 success, 1 verdict failed or I/O error, 2 usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(v) => v.exit_code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            error_code(&e)
        }
    }
}

fn error_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Io(_)) => Verdict::Failed.exit_code(),
        _ if e.downcast_ref::<std::io::Error>().is_some() => Verdict::Failed.exit_code(),
        _ => Verdict::Usage.exit_code(),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    if let Some(p) = out {
        std::fs::write(p, format!("{json}\n")).with_context(|| format!("writing {}", p.display()))?;
    }
    writeln!(stdout, "{json}")?;
    Ok(())
}

#[derive(Serialize)]
struct LandscapeSummary<'a> {
    out: &'a Path,
    rows: usize,
    max_value: f64,
    argmax: Vec<[f64; 2]>,
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    match command {
        Command::Landscape(args) => {
            let cfg = args.load()?;
            let landscape = cmd_landscape(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    let summary = LandscapeSummary {
                        out: path,
                        rows: landscape.rows.len(),
                        max_value: landscape.rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max),
                        argmax: landscape_argmax(&landscape),
                    };
                    emit(&summary, None, stdout)?;
                }
                None => write_csv(&landscape, &mut *stdout)?,
            }
            Ok(Verdict::Met)
        }
        Command::Verify(args) => {
            let cfg = args.load()?;
            let outcome = cmd_verify(&cfg)?;
            emit(&outcome, cfg.out.as_deref(), stdout)?;
            Ok(outcome.verdict())
        }
        Command::Axioms(args) => {
            let rule = match args.rule {
                RuleKind::Utilitarian => AggregationRule::Utilitarian,
                RuleKind::Egalitarian => AggregationRule::Egalitarian,
                RuleKind::FixedLinear => {
                    anyhow::ensure!(!args.lambda.is_empty(), Error::Argument("fixed-linear needs --lambda".into()));
                    AggregationRule::fixed_linear(args.lambda.clone())?
                }
            };
            let outcome = cmd_axioms(&rule, args.trials, args.seed)?;
            emit(&outcome, args.out.as_deref(), stdout)?;
            Ok(outcome.verdict())
        }
        Command::Impossibility(args) => {
            let lattice: Option<Vec<BeliefSpec>> = match &args.lattice {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(Error::Io)?;
                    Some(serde_json::from_str(&text).map_err(Error::Json)?)
                }
                None => None,
            };
            let outcome = cmd_impossibility(lattice.as_deref(), args.tables, args.seed)?;
            emit(&outcome, args.out.as_deref(), stdout)?;
            Ok(outcome.verdict())
        }
        Command::Score(args) => {
            let cfg = args.run.load()?;
            let spec: BeliefSpec = serde_json::from_str(&args.report).map_err(Error::Json)?;
            let outcome = cmd_score(&cfg, &spec.build()?, args.outcome)?;
            emit(&outcome, cfg.out.as_deref(), stdout)?;
            Ok(Verdict::Met)
        }
    }
}
