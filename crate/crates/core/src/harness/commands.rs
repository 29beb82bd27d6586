//! The CLI commands as library functions. Each returns a serializable
//! outcome; [`Verdict::exit_code`] maps it to the process exit status.

use std::fs::File;
use std::io::BufWriter;

use rand::Rng;
use serde::Serialize;

use super::config::{BeliefSpec, Mode, RunConfig};
use super::csv::write_csv;
use crate::aggregation::{
    check_iia, check_pareto_efficiency, find_dictator, AggregationRule, AggregationRuleSpec, AxiomReport,
    AxiomViolation, UtilityProfile,
};
use crate::decision::{Actions, DecisionProblem};
use crate::error::{arg_err, Result};
use crate::ip_scoring::impossibility::{DominanceViolation, ScoreTable};
use crate::ip_scoring::verify::ReportDescriptor;
use crate::ip_scoring::{
    impossibility_check, interval_report_grid, score_landscape, tailored_score, verify_properness, ProperReport,
    ReportLattice, ScoreLandscape,
};
use crate::probability::{CredalSet, Distribution};
use crate::sampling::seeded;
use crate::VALUE_TOL;

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Met = 0,
    Failed = 1,
    Usage = 2,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Met
        } else {
            Self::Failed
        }
    }

    pub fn exit_code(self) -> i32 {
        self as i32
    }
}

/// Computes the landscape and writes the CSV to `config.out` when set.
pub fn cmd_landscape(config: &RunConfig) -> Result<ScoreLandscape> {
    config.validate()?;
    let belief = config.belief()?;
    let valuer = config.valuer(belief.outcome_count())?;
    let landscape = score_landscape(valuer.as_ref(), &belief, config.grid_step)?;
    if let Some(path) = &config.out {
        write_csv(&landscape, BufWriter::new(File::create(path)?))?;
    }
    Ok(landscape)
}

/// Rows within 1e-9 of the landscape maximum.
pub fn landscape_argmax(landscape: &ScoreLandscape) -> Vec<[f64; 2]> {
    let max = landscape.rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    landscape.rows.iter().filter(|r| r.value >= max - VALUE_TOL).map(|r| [r.q1, r.q2]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    Strict,
    ProperNotStrict,
}

impl ExpectedVerdict {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Randomized => Self::Strict,
            Mode::Dictator | Mode::Minmax => Self::ProperNotStrict,
        }
    }

    pub fn holds(self, r: &ProperReport) -> bool {
        match self {
            Self::Strict => r.is_strict,
            Self::ProperNotStrict => r.is_proper && !r.is_strict,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub mode: Mode,
    pub expected: ExpectedVerdict,
    pub verdict_met: bool,
    #[serde(flatten)]
    pub report: ProperReport,
}

impl VerifyOutcome {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.verdict_met)
    }
}

/// Properness over the interval report grid, judged against the mode's
/// expected verdict.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyOutcome> {
    config.validate()?;
    let belief = config.belief()?;
    if belief.outcome_count() != 2 {
        return arg_err("verify runs over the binary interval grid");
    }
    let valuer = config.valuer(2)?;
    let reports = interval_report_grid(config.grid_step)?;
    let report = verify_properness(valuer.as_ref(), &belief, &reports)?;
    let expected = ExpectedVerdict::for_mode(config.mode);
    Ok(VerifyOutcome { mode: config.mode, expected, verdict_met: expected.holds(&report), report })
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomVerdict {
    pub passed: bool,
    pub profiles_checked: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<AxiomViolation>,
}

impl From<AxiomReport> for AxiomVerdict {
    fn from(r: AxiomReport) -> Self {
        Self {
            passed: r.passed(),
            profiles_checked: r.profiles_checked,
            violations: r.violations.len(),
            first_violation: r.violations.into_iter().next(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DictatorVerdict {
    /// False when the rule's weights do not fit the two-point probe set.
    pub checked: bool,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dictator: Option<Distribution>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomsOutcome {
    pub rule: AggregationRuleSpec,
    pub trials: usize,
    pub seed: u64,
    pub pareto_efficiency: AxiomVerdict,
    pub iia: AxiomVerdict,
    pub dictator: DictatorVerdict,
}

impl AxiomsOutcome {
    /// Pareto efficiency and IIA must hold; dictatorship is reported only.
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.pareto_efficiency.passed && self.iia.passed)
    }
}

/// Credal set the dictator search runs on: `{Bern(0.4), Bern(0.6)}`.
pub fn dictator_probe_set() -> CredalSet {
    CredalSet::interval(0.4, 0.6).expect("valid interval")
}

/// Two decision problems on the action grid of step 0.01: the squared loss
/// `−(o − a)²` and the asymmetric loss with `u(a, 0) = −a²`,
/// `u(a, 1) = −3(1 − a)²`. A single precise belief reproduces a fixed-weight
/// rule on both; the min rule picks actions no single belief explains.
pub fn dictator_probe_problems() -> Vec<DecisionProblem> {
    let actions = Actions::grid(0.0, 1.0, 0.01).expect("valid grid");
    let Actions::Grid { values, .. } = &actions else { unreachable!() };
    let asym = values.iter().map(|&a| vec![-a * a, -3.0 * (1.0 - a) * (1.0 - a)]).collect();
    vec![
        DecisionProblem::neg_squared_on(actions.clone(), 2).expect("valid problem"),
        DecisionProblem::new(actions, asym).expect("valid problem"),
    ]
}

/// Random profiles whose member count fits `rule`.
pub fn random_profiles(rule: &AggregationRule, trials: usize, seed: u64) -> Vec<UtilityProfile> {
    let mut rng = seeded(seed);
    (0..trials)
        .map(|_| {
            let members = match rule {
                AggregationRule::FixedLinear(l) => l.len(),
                _ => rng.random_range(1..=4),
            };
            let inputs = rng.random_range(3..=6);
            UtilityProfile::random(&mut rng, members, inputs)
        })
        .collect()
}

pub fn cmd_axioms(rule: &AggregationRule, trials: usize, seed: u64) -> Result<AxiomsOutcome> {
    let profiles = random_profiles(rule, trials, seed);
    let pareto_efficiency = check_pareto_efficiency(rule, &profiles)?.into();
    let iia = check_iia(rule, &profiles)?.into();
    let dictator = match rule {
        AggregationRule::FixedLinear(l) if l.len() != 2 => {
            DictatorVerdict { checked: false, found: false, dictator: None }
        }
        _ => {
            let d = find_dictator(rule, &dictator_probe_problems(), &dictator_probe_set(), 0.01)?;
            DictatorVerdict { checked: true, found: d.is_some(), dictator: d }
        }
    };
    Ok(AxiomsOutcome { rule: rule.into(), trials, seed, pareto_efficiency, iia, dictator })
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetResult {
    pub name: &'static str,
    pub proper: bool,
    pub constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<DominanceViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImpossibilityOutcome {
    pub lattice_size: usize,
    pub random_tables: usize,
    pub seed: u64,
    pub random_proper: usize,
    pub random_proper_non_constant: usize,
    pub presets: Vec<PresetResult>,
    /// Every proper table found, random or preset, is constant.
    pub every_proper_constant: bool,
}

impl ImpossibilityOutcome {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.every_proper_constant)
    }
}

/// Random tables with entries in `[-1, 1)` plus the constant and
/// centroid-quadratic presets. `lattice = None` uses the default binary lattice.
pub fn cmd_impossibility(lattice: Option<&[BeliefSpec]>, tables: usize, seed: u64) -> Result<ImpossibilityOutcome> {
    let lattice = match lattice {
        None => ReportLattice::default_binary(),
        Some(specs) => ReportLattice::new(specs.iter().map(BeliefSpec::build).collect::<Result<_>>()?)?,
    };
    let mut rng = seeded(seed);
    let mut random_proper = 0;
    let mut random_proper_non_constant = 0;
    for _ in 0..tables {
        let t = lattice.random_table(&mut rng, -1.0, 1.0);
        let r = impossibility_check(&lattice, &t)?;
        if r.proper {
            random_proper += 1;
            if !r.constant {
                random_proper_non_constant += 1;
            }
        }
    }
    let preset = |name, table: ScoreTable| -> Result<PresetResult> {
        let r = impossibility_check(&lattice, &table)?;
        Ok(PresetResult { name, proper: r.proper, constant: r.constant, violation: r.violation })
    };
    let presets = vec![
        preset("constant", lattice.constant_table(1.0))?,
        preset("centroid_quadratic", lattice.centroid_quadratic_table())?,
    ];
    let every_proper_constant = random_proper_non_constant == 0 && presets.iter().all(|p| !p.proper || p.constant);
    Ok(ImpossibilityOutcome {
        lattice_size: lattice.len(),
        random_tables: tables,
        seed,
        random_proper,
        random_proper_non_constant,
        presets,
        every_proper_constant,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreOutcome {
    pub mode: Mode,
    pub report: ReportDescriptor,
    pub outcome: usize,
    /// Weights drawn from `theta` in randomized mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    pub action: String,
    pub score: f64,
}

/// One tailored score `s(Q, o)`. In randomized mode the aggregation weights
/// are drawn from `theta` with the config seed.
pub fn cmd_score(config: &RunConfig, report: &CredalSet, outcome: usize) -> Result<ScoreOutcome> {
    config.validate()?;
    let n = report.outcome_count();
    let (rule, lambda) = match config.mode {
        Mode::Randomized => {
            let rr = config.randomized_rule(n)?;
            let lambda = rr.theta.sample(&mut seeded(config.seed));
            (rr.realized(lambda.clone())?, Some(lambda))
        }
        _ => (config.tailored_rule(n)?, None),
    };
    let score = tailored_score(&rule, report, outcome)?;
    let action = rule.problem.actions().label(rule.chosen_action(report)?.index);
    Ok(ScoreOutcome { mode: config.mode, report: report.into(), outcome, lambda, action, score })
}
