//! Randomized tailored rules: the aggregation is a fixed-weight rule drawn
//! from a distribution `θ` after the report is made.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ReportValuer, TailoredRule};
use crate::aggregation::AggregationRule;
use crate::decision::{argmax_with_ties, best_action_probs, dot, DecisionProblem};
use crate::error::{arg_err, Error, Result};
use crate::probability::{check_simplex, CredalSet, Distribution};
use crate::DIST_TOL;

/// Spacing of the λ grid used to decide whether `θ` has full support.
pub const SUPPORT_GRID: usize = 100;

/// Distribution over fixed-weight aggregation rules.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaDistribution {
    /// Uniform density on `λ ∈ [lo, hi]` weighting `(λ, 1 − λ)` over two
    /// extreme points, integrated with an `nodes`-point trapezoid rule.
    Uniform { lo: f64, hi: f64, nodes: usize },
    /// Finitely many weight vectors with probabilities.
    Discrete(Vec<(Vec<f64>, f64)>),
}

impl ThetaDistribution {
    pub fn uniform(nodes: usize) -> Result<Self> {
        Self::uniform_on(0.0, 1.0, nodes)
    }

    pub fn uniform_on(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return arg_err(format!("quadrature needs at least 3 nodes, got {nodes}"));
        }
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return arg_err(format!("uniform support [{lo}, {hi}] must be a non-empty subinterval of [0, 1]"));
        }
        Ok(Self::Uniform { lo, hi, nodes })
    }

    pub fn point_mass(lambda: Vec<f64>) -> Result<Self> {
        Self::discrete(vec![(lambda, 1.0)])
    }

    pub fn discrete(support: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if support.is_empty() {
            return arg_err("discrete θ needs at least one support point");
        }
        for (lambda, w) in &support {
            check_simplex(lambda)?;
            if !(*w >= 0.0) {
                return arg_err(format!("θ weight {w} is negative"));
            }
        }
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > DIST_TOL {
            return arg_err(format!("θ weights sum to {total}, expected 1"));
        }
        Ok(Self::Discrete(support))
    }

    /// Quadrature nodes `(λ, weight)`; weights sum to 1.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            Self::Uniform { lo, hi, nodes } => {
                let n = *nodes;
                let h = 1.0 / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        let t = i as f64 / (n - 1) as f64;
                        let lambda = lo + (hi - lo) * t;
                        let w = if i == 0 || i == n - 1 { h / 2.0 } else { h };
                        (vec![lambda, 1.0 - lambda], w)
                    })
                    .collect()
            }
            Self::Discrete(s) => s.clone(),
        }
    }

    /// Whether `θ` puts positive mass (or density) on `λ`.
    pub fn has_mass_at(&self, lambda: &[f64]) -> bool {
        match self {
            Self::Uniform { lo, hi, .. } => lambda.len() == 2 && lambda[0] >= lo - 1e-12 && lambda[0] <= hi + 1e-12,
            Self::Discrete(s) => s.iter().any(|(l, w)| {
                *w > 0.0 && l.len() == lambda.len() && l.iter().zip(lambda).all(|(a, b)| (a - b).abs() <= DIST_TOL)
            }),
        }
    }

    /// Draws one weight vector. Uniform θ is sampled on its continuous
    /// support, not on the quadrature nodes.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Self::Uniform { lo, hi, .. } => {
                let l = rng.random_range(*lo..=*hi);
                vec![l, 1.0 - l]
            }
            Self::Discrete(s) => {
                let idx = WeightedIndex::new(s.iter().map(|(_, w)| *w)).expect("validated weights");
                s[idx.sample(rng)].0.clone()
            }
        }
    }

    /// Positive mass at every `λ = (i/100, 1 − i/100)`.
    pub fn full_support(&self) -> bool {
        (0..=SUPPORT_GRID).all(|i| {
            let l = i as f64 / SUPPORT_GRID as f64;
            self.has_mass_at(&[l, 1.0 - l])
        })
    }
}

/// Score paid for a rule `θ` assigns no mass to. Any regular choice is
/// admissible; the default pays nothing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Fallback {
    #[default]
    Zero,
    Constant(f64),
}

impl Fallback {
    fn score(&self, _report: &CredalSet, _outcome: usize) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
        }
    }
}

/// `s_θ`: a tailored rule whose aggregation is a fixed-weight rule drawn from `θ`.
#[derive(Debug, Clone)]
pub struct RandomizedRule {
    pub problem: Arc<DecisionProblem>,
    pub theta: ThetaDistribution,
    pub k: f64,
    pub c: f64,
    pub fallback: Fallback,
}

impl RandomizedRule {
    pub fn new(problem: Arc<DecisionProblem>, theta: ThetaDistribution, k: f64, c: f64) -> Result<Self> {
        // Reuse the tailored rule's parameter checks.
        TailoredRule::new(Arc::clone(&problem), AggregationRule::Utilitarian, k, c)?;
        Ok(Self { problem, theta, k, c, fallback: Fallback::default() })
    }

    /// The deterministic rule realized when `ρ_λ` is drawn.
    pub fn realized(&self, lambda: Vec<f64>) -> Result<TailoredRule> {
        TailoredRule::new(Arc::clone(&self.problem), AggregationRule::fixed_linear(lambda)?, self.k, self.c)
    }

    /// `s_θ(Q, o)(ρ_λ)`: the tailored score when `θ` has mass at `λ`,
    /// otherwise the fallback.
    pub fn score(&self, report: &CredalSet, outcome: usize, lambda: &[f64]) -> Result<f64> {
        if self.theta.has_mass_at(lambda) {
            super::tailored_score(&self.realized(lambda.to_vec())?, report, outcome)
        } else {
            Ok(self.fallback.score(report, outcome))
        }
    }
}

/// `V^P_θ(Q) = E_{ρ∼θ}[V^P_ρ(Q)]`. Nodes carrying zero weight (where the
/// fallback would be paid) contribute nothing to the expectation.
pub fn randomized_value(rule: &RandomizedRule, belief: &CredalSet, report: &CredalSet) -> Result<f64> {
    if let ThetaDistribution::Uniform { .. } = rule.theta {
        for set in [belief, report] {
            if set.extreme_points().len() > 2 {
                return arg_err("a uniform θ over λ ∈ [0, 1] applies to sets with at most 2 extreme points");
            }
        }
    }
    rule.problem.check_outcomes(report.outcome_count())?;
    if belief.space().labels() != report.space().labels() {
        return Err(Error::SpaceMismatch("belief and report use different outcome spaces".into()));
    }
    // Same arithmetic as `forecaster_value(&rule.realized(λ), ..)` per node,
    // without rebuilding the rule: tabulate E_p[k·u(a, ·) + c] for every
    // action and belief extreme once, then pick the action per node.
    let problem = &rule.problem;
    let b_ext = belief.extreme_points();
    let r_ext = report.extreme_points();
    let table: Vec<Vec<f64>> = (0..problem.action_count())
        .map(|a| {
            let scores: Vec<f64> = problem.utility_row(a).iter().map(|u| rule.k * u + rule.c).collect();
            b_ext.iter().map(|p| p.expectation(&scores)).collect()
        })
        .collect();
    let fixed_action = (r_ext.len() == 1).then(|| best_action_probs(problem, r_ext[0].probs()).index);
    let mut q = vec![0.0; report.outcome_count()];
    let mut eu = vec![0.0; problem.action_count()];

    let mut total = 0.0;
    for (lambda, w) in rule.theta.nodes() {
        if w == 0.0 {
            continue;
        }
        let a = match fixed_action {
            Some(a) => a,
            None => {
                check_len(&lambda, r_ext.len(), "report")?;
                mix_into(&lambda, r_ext, &mut q);
                for (a, e) in eu.iter_mut().enumerate() {
                    *e = dot(problem.utility_row(a), &q);
                }
                argmax_with_ties(&eu).index
            }
        };
        let row = &table[a];
        let v = if row.len() == 1 {
            row[0]
        } else {
            check_len(&lambda, row.len(), "belief")?;
            lambda.iter().zip(row).map(|(l, v)| l * v).sum()
        };
        total += w * v;
    }
    Ok(total)
}

fn check_len(lambda: &[f64], n: usize, what: &str) -> Result<()> {
    if lambda.len() != n {
        return arg_err(format!("lambda has {} weights, {what} has {n} extreme points", lambda.len()));
    }
    Ok(())
}

/// In-place version of [`crate::probability::mixture`] for validated weights.
fn mix_into(weights: &[f64], dists: &[Distribution], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (w, d) in weights.iter().zip(dists) {
        for (acc, p) in out.iter_mut().zip(d.probs()) {
            *acc += w * p;
        }
    }
    for p in out.iter_mut() {
        *p = p.max(0.0);
    }
    let total: f64 = out.iter().sum();
    for p in out.iter_mut() {
        *p /= total;
    }
}

impl ReportValuer for RandomizedRule {
    fn value(&self, belief: &CredalSet, report: &CredalSet) -> Result<f64> {
        randomized_value(self, belief, report)
    }
}

/// JSON form: `{"kind":"uniform","lo":0,"hi":1,"nodes":1001}` or
/// `{"kind":"discrete","support":[{"lambda":[..],"weight":..}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSpec {
    Uniform {
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
        #[serde(default)]
        nodes: Option<usize>,
    },
    Discrete {
        support: Vec<SupportPoint>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub lambda: Vec<f64>,
    pub weight: f64,
}

pub const DEFAULT_QUADRATURE_NODES: usize = 1001;

impl Default for ThetaSpec {
    fn default() -> Self {
        Self::Uniform { lo: None, hi: None, nodes: None }
    }
}

impl ThetaSpec {
    /// `nodes_override` replaces the node count of a uniform θ.
    pub fn build(&self, nodes_override: Option<usize>) -> Result<ThetaDistribution> {
        match self {
            Self::Uniform { lo, hi, nodes } => ThetaDistribution::uniform_on(
                lo.unwrap_or(0.0),
                hi.unwrap_or(1.0),
                nodes_override.or(*nodes).unwrap_or(DEFAULT_QUADRATURE_NODES),
            ),
            Self::Discrete { support } => {
                ThetaDistribution::discrete(support.iter().map(|s| (s.lambda.clone(), s.weight)).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip_scoring::forecaster_value;

    fn problem() -> Arc<DecisionProblem> {
        Arc::new(DecisionProblem::neg_squared(0.01, 2).unwrap())
    }

    fn iv(lo: f64, hi: f64) -> CredalSet {
        CredalSet::interval(lo, hi).unwrap()
    }

    #[test]
    fn tabulated_value_matches_realized_rules() {
        let rule = RandomizedRule::new(problem(), ThetaDistribution::uniform(51).unwrap(), 2.0, 0.5).unwrap();
        for belief in [iv(0.4, 0.6), iv(0.3, 0.3)] {
            for (lo, hi) in [(0.4, 0.6), (0.0, 1.0), (0.35, 0.35), (0.1, 0.72)] {
                let report = iv(lo, hi);
                let mut slow = 0.0;
                for (lambda, w) in rule.theta.nodes() {
                    slow += w * forecaster_value(&rule.realized(lambda).unwrap(), &belief, &report).unwrap();
                }
                assert_eq!(randomized_value(&rule, &belief, &report).unwrap(), slow);
            }
        }
    }

    #[test]
    fn trapezoid_weights_sum_to_one() {
        for theta in [ThetaDistribution::uniform(1001).unwrap(), ThetaDistribution::uniform_on(0.45, 0.55, 11).unwrap()]
        {
            let total: f64 = theta.nodes().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_nodes() {
        assert!(ThetaDistribution::uniform(2).is_err());
        assert!(ThetaSpec::default().build(Some(1)).is_err());
        assert!(ThetaDistribution::uniform_on(0.6, 0.4, 11).is_err());
    }

    #[test]
    fn support_flags() {
        assert!(ThetaDistribution::uniform(11).unwrap().full_support());
        assert!(!ThetaDistribution::uniform_on(0.45, 0.55, 11).unwrap().full_support());
        assert!(!ThetaDistribution::point_mass(vec![0.5, 0.5]).unwrap().full_support());
    }

    #[test]
    fn point_mass_matches_deterministic_rule() {
        let r =
            RandomizedRule::new(problem(), ThetaDistribution::point_mass(vec![0.5, 0.5]).unwrap(), 1.0, 0.0).unwrap();
        let det = r.realized(vec![0.5, 0.5]).unwrap();
        for (lo, hi) in [(0.4, 0.6), (0.2, 0.3), (0.5, 0.5)] {
            let a = randomized_value(&r, &iv(0.4, 0.6), &iv(lo, hi)).unwrap();
            let b = forecaster_value(&det, &iv(0.4, 0.6), &iv(lo, hi)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn precise_belief_and_report() {
        let r = RandomizedRule::new(problem(), ThetaDistribution::uniform(101).unwrap(), 1.0, 0.0).unwrap();
        let v = randomized_value(&r, &iv(0.3, 0.3), &iv(0.3, 0.3)).unwrap();
        // a* = 0.3, value −Var = −0.21.
        assert!((v + 0.21).abs() < 1e-12);
    }

    #[test]
    fn fallback_paid_off_support() {
        let mut r =
            RandomizedRule::new(problem(), ThetaDistribution::uniform_on(0.4, 0.6, 11).unwrap(), 1.0, 0.0).unwrap();
        r.fallback = Fallback::Constant(-7.0);
        assert_eq!(r.score(&iv(0.4, 0.6), 1, &[0.1, 0.9]).unwrap(), -7.0);
        let on = r.score(&iv(0.4, 0.6), 1, &[0.5, 0.5]).unwrap();
        assert!((on + 0.25).abs() < 1e-12);
    }

    #[test]
    fn uniform_theta_rejects_many_extremes() {
        use crate::probability::OutcomeSpace;
        let space = Arc::new(OutcomeSpace::indexed(3).unwrap());
        let tri = CredalSet::vacuous(space);
        let p = Arc::new(DecisionProblem::neg_squared(0.1, 3).unwrap());
        let r = RandomizedRule::new(p, ThetaDistribution::uniform(11).unwrap(), 1.0, 0.0).unwrap();
        assert!(randomized_value(&r, &tri, &tri).is_err());
    }

    #[test]
    fn theta_spec_json() {
        let s: ThetaSpec = serde_json::from_str(r#"{"kind":"uniform","lo":0.45,"hi":0.55}"#).unwrap();
        assert_eq!(
            s.build(None).unwrap(),
            ThetaDistribution::Uniform { lo: 0.45, hi: 0.55, nodes: DEFAULT_QUADRATURE_NODES }
        );
        let s: ThetaSpec =
            serde_json::from_str(r#"{"kind":"discrete","support":[{"lambda":[0.2,0.8],"weight":1.0}]}"#).unwrap();
        assert!(matches!(s.build(Some(5)).unwrap(), ThetaDistribution::Discrete(_)));
    }
}
