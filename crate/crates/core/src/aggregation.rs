//! Aggregation of expected-utility profiles and social-choice axiom checks.
//!
//! A profile holds `E_q[u(x, o)]` for each member `q` of a credal set (rows)
//! and each input `x` (columns). An aggregation rule collapses the rows into
//! one value per input, completing the partial order the rows induce.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{argmax_with_ties, best_action_probs, simplex_grid, DecisionProblem};
use crate::error::{arg_err, Result};
use crate::probability::{check_simplex, mixture, CredalSet, Distribution};
use crate::TIE_TOL;

/// `k × m` table of expected utilities: `k` members, `m` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityProfile {
    members: usize,
    inputs: usize,
    values: Vec<f64>,
}

impl UtilityProfile {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let members = rows.len();
        if members == 0 {
            return arg_err("profile needs at least one member");
        }
        let inputs = rows[0].len();
        if inputs == 0 || rows.iter().any(|r| r.len() != inputs) {
            return arg_err("profile rows must be non-empty and equally long");
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return arg_err("profile entries must be finite");
        }
        Ok(Self { members, inputs, values: rows.concat() })
    }

    /// Expected utility of every action under every extreme point of `set`.
    pub fn from_problem(problem: &DecisionProblem, set: &CredalSet) -> Result<Self> {
        problem.check_outcomes(set.outcome_count())?;
        let rows = set.extreme_points().iter().map(|q| problem.expected_utilities(q.probs())).collect();
        Self::new(rows)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn get(&self, member: usize, input: usize) -> f64 {
        self.values[member * self.inputs + input]
    }

    pub fn row(&self, member: usize) -> &[f64] {
        &self.values[member * self.inputs..(member + 1) * self.inputs]
    }

    pub fn column(&self, input: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.members).map(move |k| self.get(k, input))
    }

    /// Profile with one input column removed.
    pub fn without_input(&self, input: usize) -> Self {
        let rows = (0..self.members)
            .map(|k| self.row(k).iter().enumerate().filter(|(i, _)| *i != input).map(|(_, v)| *v).collect())
            .collect();
        Self::new(rows).expect("removing a column keeps the profile valid when inputs > 1")
    }

    /// Uniform `[0, 1)` entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, members: usize, inputs: usize) -> Self {
        let values = (0..members * inputs).map(|_| rng.random::<f64>()).collect();
        Self { members, inputs, values }
    }
}

/// Anything that maps a profile to one value per input.
pub trait Aggregator: Sync {
    fn aggregate(&self, profile: &UtilityProfile) -> Result<Vec<f64>>;
}

impl<F> Aggregator for F
where
    F: Fn(&UtilityProfile) -> Result<Vec<f64>> + Sync,
{
    fn aggregate(&self, profile: &UtilityProfile) -> Result<Vec<f64>> {
        self(profile)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AggregationRule {
    /// Member mean, `w(q) = 1/k`.
    Utilitarian,
    /// Member minimum per input.
    Egalitarian,
    /// `λᵀ · profile` with `λ` indexed by extreme points in canonical order.
    FixedLinear(Vec<f64>),
}

impl AggregationRule {
    pub fn fixed_linear(lambda: Vec<f64>) -> Result<Self> {
        check_simplex(&lambda)?;
        Ok(Self::FixedLinear(lambda))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Utilitarian => "utilitarian",
            Self::Egalitarian => "egalitarian",
            Self::FixedLinear(_) => "fixed_linear",
        }
    }

    /// Aggregate one column of member values. A single member is returned as is.
    pub(crate) fn combine(&self, column: &[f64]) -> Result<f64> {
        if column.len() == 1 {
            return Ok(column[0]);
        }
        Ok(match self {
            Self::Utilitarian => column.iter().sum::<f64>() / column.len() as f64,
            Self::Egalitarian => column.iter().copied().fold(f64::INFINITY, f64::min),
            Self::FixedLinear(lambda) => {
                if lambda.len() != column.len() {
                    return arg_err(format!("lambda has {} weights for {} members", lambda.len(), column.len()));
                }
                lambda.iter().zip(column).map(|(l, v)| l * v).sum()
            }
        })
    }
}

impl Aggregator for AggregationRule {
    fn aggregate(&self, profile: &UtilityProfile) -> Result<Vec<f64>> {
        let mut col = vec![0.0; profile.members()];
        (0..profile.inputs())
            .map(|x| {
                for (k, c) in col.iter_mut().enumerate() {
                    *c = profile.get(k, x);
                }
                self.combine(&col)
            })
            .collect()
    }
}

/// `ρ[profile]`.
pub fn aggregate(rule: &AggregationRule, profile: &UtilityProfile) -> Result<Vec<f64>> {
    rule.aggregate(profile)
}

/// Dominance relation between two inputs under every member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `x ⪰ y` only.
    Prefers,
    /// `y ⪰ x` only.
    PreferredBy,
    Indifferent,
    Incomparable,
}

fn weakly_dominates(profile: &UtilityProfile, x: usize, y: usize) -> bool {
    (0..profile.members()).all(|k| profile.get(k, x) >= profile.get(k, y) - TIE_TOL)
}

/// `x ⪰_Q y` iff `E_q[u(x)] ≥ E_q[u(y)]` for every member `q`.
pub fn partial_order(profile: &UtilityProfile) -> Vec<Vec<Relation>> {
    let m = profile.inputs();
    (0..m)
        .map(|x| {
            (0..m)
                .map(|y| match (weakly_dominates(profile, x, y), weakly_dominates(profile, y, x)) {
                    (true, true) => Relation::Indifferent,
                    (true, false) => Relation::Prefers,
                    (false, true) => Relation::PreferredBy,
                    (false, false) => Relation::Incomparable,
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomViolation {
    pub profile: usize,
    pub x: usize,
    pub y: usize,
    /// Deleted input, for IIA.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub profiles_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every weakly dominated pair must keep its order after aggregation.
pub fn check_pareto_efficiency(rule: &dyn Aggregator, profiles: &[UtilityProfile]) -> Result<AxiomReport> {
    if profiles.is_empty() {
        return arg_err("need at least one profile");
    }
    let per_profile = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Vec<AxiomViolation>> {
            let agg = rule.aggregate(p)?;
            let mut out = Vec::new();
            for x in 0..p.inputs() {
                for y in 0..p.inputs() {
                    if x != y && weakly_dominates(p, x, y) && agg[x] < agg[y] - TIE_TOL {
                        out.push(AxiomViolation { profile: i, x, y, removed: None });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport { profiles_checked: profiles.len(), violations: per_profile.concat() })
}

fn order(a: f64, b: f64) -> Ordering {
    if a > b + TIE_TOL {
        Ordering::Greater
    } else if a < b - TIE_TOL {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Deleting any third input must not flip the aggregated order of a pair.
pub fn check_iia(rule: &dyn Aggregator, profiles: &[UtilityProfile]) -> Result<AxiomReport> {
    if let Some(p) = profiles.iter().find(|p| p.inputs() < 3) {
        return arg_err(format!("IIA needs at least 3 inputs per profile, got {}", p.inputs()));
    }
    let per_profile = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Vec<AxiomViolation>> {
            let full = rule.aggregate(p)?;
            let m = p.inputs();
            let mut out = Vec::new();
            for z in 0..m {
                let reduced = rule.aggregate(&p.without_input(z))?;
                let idx = |x: usize| if x < z { x } else { x - 1 };
                for x in (0..m).filter(|&x| x != z) {
                    for y in (x + 1..m).filter(|&y| y != z) {
                        if order(full[x], full[y]) != order(reduced[idx(x)], reduced[idx(y)]) {
                            out.push(AxiomViolation { profile: i, x, y, removed: Some(z) });
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport { profiles_checked: profiles.len(), violations: per_profile.concat() })
}

/// Searches mixtures of `set`'s extreme points (simplex grid of spacing
/// `mixture_step`) for a precise belief whose best action matches the
/// aggregated best action in every problem. Returns the first match in grid
/// order. `None` means none was found at this resolution.
pub fn find_dictator(
    rule: &dyn Aggregator,
    problems: &[DecisionProblem],
    set: &CredalSet,
    mixture_step: f64,
) -> Result<Option<Distribution>> {
    if problems.is_empty() {
        return arg_err("need at least one decision problem");
    }
    if !(mixture_step > 0.0 && mixture_step <= 1.0) {
        return arg_err(format!("mixture step {mixture_step} outside (0, 1]"));
    }
    let targets = problems
        .iter()
        .map(|pr| {
            let profile = UtilityProfile::from_problem(pr, set)?;
            Ok(argmax_with_ties(&rule.aggregate(&profile)?).index)
        })
        .collect::<Result<Vec<_>>>()?;

    let extremes = set.extreme_points();
    let k = (1.0 / mixture_step).round().max(1.0) as usize;
    for w in simplex_grid_or_point(extremes.len(), k) {
        let cand = mixture(&w, extremes)?;
        let agrees = problems.iter().zip(&targets).all(|(pr, &t)| best_action_probs(pr, cand.probs()).index == t);
        if agrees {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

fn simplex_grid_or_point(n: usize, k: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        vec![vec![1.0]]
    } else {
        simplex_grid(n, k)
    }
}

/// JSON form: `{"kind":"egalitarian"}` | `{"kind":"fixed_linear","lambda":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AggregationRuleSpec {
    Utilitarian,
    Egalitarian,
    FixedLinear { lambda: Vec<f64> },
}

impl TryFrom<AggregationRuleSpec> for AggregationRule {
    type Error = crate::Error;

    fn try_from(spec: AggregationRuleSpec) -> Result<Self> {
        match spec {
            AggregationRuleSpec::Utilitarian => Ok(Self::Utilitarian),
            AggregationRuleSpec::Egalitarian => Ok(Self::Egalitarian),
            AggregationRuleSpec::FixedLinear { lambda } => Self::fixed_linear(lambda),
        }
    }
}

impl From<&AggregationRule> for AggregationRuleSpec {
    fn from(rule: &AggregationRule) -> Self {
        match rule {
            AggregationRule::Utilitarian => Self::Utilitarian,
            AggregationRule::Egalitarian => Self::Egalitarian,
            AggregationRule::FixedLinear(l) => Self::FixedLinear { lambda: l.clone() },
        }
    }
}
