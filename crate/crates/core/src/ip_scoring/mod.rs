//! Scoring rules for credal-set reports.
//!
//! A tailored rule pays `k·u(a*, o) + c`, where `a*` is the action the decision
//! maker picks after aggregating the report's extreme points with a rule `ρ`.
//! The forecaster evaluates a report by aggregating their own belief's
//! expected scores with the same `ρ`. Randomizing `ρ` over fixed-weight
//! aggregations (see [`randomized`]) makes truthful reporting the unique best
//! response.

pub mod impossibility;
pub mod randomized;
pub mod verify;

use std::sync::Arc;

use crate::aggregation::{AggregationRule, Aggregator, UtilityProfile};
use crate::decision::{argmax_with_ties, best_action_probs, BestAction, DecisionProblem};
use crate::error::{arg_err, Error, Result};
use crate::probability::{mixture, CredalSet};

pub use impossibility::{impossibility_check, ImpossibilityResult, ReportLattice};
pub use randomized::{randomized_value, Fallback, RandomizedRule, ThetaDistribution};
pub use verify::{
    interval_report_grid, non_strictness_witness, score_landscape, verify_properness, LandscapeRow, ProperReport,
    ScoreLandscape,
};

/// Evaluates `V^P(Q)`, the forecaster's value of reporting `Q` under belief `P`.
pub trait ReportValuer: Sync {
    fn value(&self, belief: &CredalSet, report: &CredalSet) -> Result<f64>;
}

/// `s_ρ(Q, o) = k·u(a*_{Q,ρ}, o) + c`.
#[derive(Debug, Clone)]
pub struct TailoredRule {
    pub problem: Arc<DecisionProblem>,
    pub rule: AggregationRule,
    /// Business share.
    pub k: f64,
    /// Fixed fee.
    pub c: f64,
}

impl TailoredRule {
    pub fn new(problem: Arc<DecisionProblem>, rule: AggregationRule, k: f64, c: f64) -> Result<Self> {
        if !(k >= 0.0 && c >= 0.0) || !k.is_finite() || !c.is_finite() {
            return arg_err(format!("k and c must be finite and non-negative (k={k}, c={c})"));
        }
        Ok(Self { problem, rule, k, c })
    }

    pub fn with_rule(&self, rule: AggregationRule) -> Self {
        Self { problem: Arc::clone(&self.problem), rule, k: self.k, c: self.c }
    }

    /// `a*_{Q,ρ} = argmax_a ρ[{E_q[u(a, o)]}_{q ∈ ext(Q)}]`.
    pub fn chosen_action(&self, report: &CredalSet) -> Result<BestAction> {
        self.problem.check_outcomes(report.outcome_count())?;
        let ext = report.extreme_points();
        match &self.rule {
            // λᵀ{E_q[u]} = E_{λᵀq}[u]: aggregate through the mixture directly.
            AggregationRule::FixedLinear(lambda) if ext.len() > 1 => {
                if lambda.len() != ext.len() {
                    return Err(Error::Argument(format!(
                        "lambda has {} weights, report has {} extreme points",
                        lambda.len(),
                        ext.len()
                    )));
                }
                let q = mixture(lambda, ext)?;
                Ok(best_action_probs(&self.problem, q.probs()))
            }
            _ if ext.len() == 1 => Ok(best_action_probs(&self.problem, ext[0].probs())),
            rule => {
                let profile = UtilityProfile::from_problem(&self.problem, report)?;
                Ok(argmax_with_ties(&rule.aggregate(&profile)?))
            }
        }
    }

    /// Score vector `s_ρ(Q, ·)` over outcomes.
    pub fn scores(&self, report: &CredalSet) -> Result<Vec<f64>> {
        let a = self.chosen_action(report)?.index;
        Ok(self.problem.utility_row(a).iter().map(|u| self.k * u + self.c).collect())
    }
}

/// `s_ρ(Q, o)`.
pub fn tailored_score(rule: &TailoredRule, report: &CredalSet, outcome: usize) -> Result<f64> {
    if outcome >= report.outcome_count() {
        return arg_err(format!("outcome {outcome} out of range"));
    }
    Ok(rule.scores(report)?[outcome])
}

/// `V^P_ρ(Q) = ρ[{E_p[s_ρ(Q, o)]}_{p ∈ ext(P)}]`.
pub fn forecaster_value(rule: &TailoredRule, belief: &CredalSet, report: &CredalSet) -> Result<f64> {
    if belief.space().labels() != report.space().labels() {
        return Err(Error::SpaceMismatch("belief and report use different outcome spaces".into()));
    }
    let scores = rule.scores(report)?;
    let expected: Vec<f64> = belief.extreme_points().iter().map(|p| p.expectation(&scores)).collect();
    rule.rule.combine(&expected)
}

impl ReportValuer for TailoredRule {
    fn value(&self, belief: &CredalSet, report: &CredalSet) -> Result<f64> {
        forecaster_value(self, belief, report)
    }
}
