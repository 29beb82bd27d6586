//! Run configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aggregation::AggregationRule;
use crate::decision::{DecisionProblem, DecisionProblemSpec};
use crate::error::{arg_err, Result};
use crate::ip_scoring::randomized::ThetaSpec;
use crate::ip_scoring::{RandomizedRule, ReportValuer, TailoredRule, ThetaDistribution};
use crate::probability::{CredalSet, CredalSetSpec};

/// Which aggregation the decision maker uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Fixed-weight aggregation with `lambda`.
    Dictator,
    /// Egalitarian (min) aggregation.
    Minmax,
    /// Fixed-weight aggregation with weights drawn from `theta`.
    Randomized,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dictator => "dictator",
            Self::Minmax => "minmax",
            Self::Randomized => "randomized",
        }
    }
}

/// A credal set given either as a binary interval `[lo, hi]` or in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BeliefSpec {
    Interval([f64; 2]),
    Set(CredalSetSpec),
}

impl BeliefSpec {
    pub fn build(&self) -> Result<CredalSet> {
        match self {
            Self::Interval([lo, hi]) => CredalSet::interval(*lo, *hi),
            Self::Set(spec) => CredalSet::try_from(spec.clone()),
        }
    }
}

/// Every field is optional in JSON; missing ones take the defaults below,
/// which reproduce the binary `[0.4, 0.6]` simulation with a uniform `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub belief: BeliefSpec,
    pub problem: DecisionProblemSpec,
    pub mode: Mode,
    /// Weights for `dictator` mode.
    pub lambda: Option<Vec<f64>>,
    /// Weight distribution for `randomized` mode.
    pub theta: Option<ThetaSpec>,
    /// Spacing of the interval report grid.
    pub grid_step: f64,
    pub k: f64,
    pub c: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Overrides the node count of a uniform `theta`.
    pub quadrature_nodes: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            belief: BeliefSpec::Interval([0.4, 0.6]),
            problem: DecisionProblemSpec::default(),
            mode: Mode::Randomized,
            lambda: Some(vec![0.5, 0.5]),
            theta: Some(ThetaSpec::default()),
            grid_step: 0.01,
            k: 1.0,
            c: 0.0,
            out: None,
            seed: 0,
            quadrature_nodes: None,
        }
    }
}

/// Command-line flags that replace config fields when given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub step: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub quadrature_nodes: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn with_mode(mode: Mode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(s) = o.step {
            self.grid_step = s;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
        if let Some(n) = o.quadrature_nodes {
            self.quadrature_nodes = Some(n);
        }
        self.validate()
    }

    /// Grid step in `(0, 1]`; the mode's own field must be present.
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return arg_err(format!("grid_step {} outside (0, 1]", self.grid_step));
        }
        match self.mode {
            Mode::Dictator if self.lambda.is_none() => arg_err("dictator mode needs `lambda`"),
            Mode::Randomized if self.theta.is_none() => arg_err("randomized mode needs `theta`"),
            _ => Ok(()),
        }
    }

    pub fn belief(&self) -> Result<CredalSet> {
        self.belief.build()
    }

    pub fn problem(&self, n_outcomes: usize) -> Result<DecisionProblem> {
        self.problem.build(n_outcomes)
    }

    pub fn theta(&self) -> Result<ThetaDistribution> {
        match &self.theta {
            Some(t) => t.build(self.quadrature_nodes),
            None => arg_err("randomized mode needs `theta`"),
        }
    }

    /// The deterministic rule for `dictator` and `minmax`.
    pub fn tailored_rule(&self, n_outcomes: usize) -> Result<TailoredRule> {
        let rule = match self.mode {
            Mode::Dictator => match &self.lambda {
                Some(l) => AggregationRule::fixed_linear(l.clone())?,
                None => return arg_err("dictator mode needs `lambda`"),
            },
            Mode::Minmax => AggregationRule::Egalitarian,
            Mode::Randomized => return arg_err("randomized mode has no single tailored rule"),
        };
        TailoredRule::new(Arc::new(self.problem(n_outcomes)?), rule, self.k, self.c)
    }

    pub fn randomized_rule(&self, n_outcomes: usize) -> Result<RandomizedRule> {
        RandomizedRule::new(Arc::new(self.problem(n_outcomes)?), self.theta()?, self.k, self.c)
    }

    pub fn valuer(&self, n_outcomes: usize) -> Result<Box<dyn ReportValuer>> {
        Ok(match self.mode {
            Mode::Randomized => Box::new(self.randomized_rule(n_outcomes)?),
            _ => Box::new(self.tailored_rule(n_outcomes)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_is_default() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_json(
            r#"{"belief":{"outcomes":["0","1"],"generators":[[0.6,0.4],[0.4,0.6]]},
                "problem":{"actions":{"grid":[0,1,0.1]},"utility":"neg_squared"},
                "mode":"dictator","lambda":[0.3,0.7],"grid_step":0.05,"k":2,"c":1}"#,
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Dictator);
        assert_eq!(cfg.belief().unwrap().as_interval(), Some((0.4, 0.6)));
        assert_eq!(cfg.problem(2).unwrap().action_count(), 11);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json(r#"{"grid_step":0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"mode":"dictator","lambda":null}"#).is_err());
        assert!(RunConfig::from_json(r#"{"mode":"randomized","theta":null}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour":"red"}"#).is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides {
            mode: Some(Mode::Minmax),
            step: Some(0.1),
            quadrature_nodes: Some(11),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.mode, Mode::Minmax);
        assert_eq!(cfg.grid_step, 0.1);
        assert_eq!(cfg.quadrature_nodes, Some(11));
        assert!(cfg.apply(&Overrides { step: Some(-1.0), ..Default::default() }).is_err());
    }

    #[test]
    fn quadrature_override_reaches_theta() {
        let cfg = RunConfig { quadrature_nodes: Some(21), ..RunConfig::default() };
        assert_eq!(cfg.theta().unwrap(), ThetaDistribution::Uniform { lo: 0.0, hi: 1.0, nodes: 21 });
    }
}
