//! The decision maker's side: actions, utilities and best responses.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::probability::{CredalSet, Distribution};
use crate::TIE_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum Actions {
    Labelled(Vec<String>),
    /// Uniform grid `lo, lo + step, ..., hi`.
    Grid {
        lo: f64,
        hi: f64,
        step: f64,
        values: Vec<f64>,
    },
}

impl Actions {
    pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(hi > lo) {
            return arg_err(format!("bad action grid [{lo}, {hi}] step {step}"));
        }
        let values = uniform_grid(lo, hi, step)?;
        Ok(Self::Grid { lo, hi, step, values })
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Labelled(l) => l.len(),
            Self::Grid { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric value of an action on a grid.
    pub fn value(&self, index: usize) -> Option<f64> {
        match self {
            Self::Grid { values, .. } => values.get(index).copied(),
            Self::Labelled(_) => None,
        }
    }

    pub fn label(&self, index: usize) -> String {
        match self {
            Self::Labelled(l) => l[index].clone(),
            Self::Grid { values, .. } => format!("{}", values[index]),
        }
    }
}

/// Points `lo + (hi − lo)·i/k` for `k = (hi − lo)/step`, which must be an integer.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    let ratio = (hi - lo) / step;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-6 || k < 1.0 {
        return arg_err(format!("step {step} does not divide [{lo}, {hi}]"));
    }
    let k = k as usize;
    Ok((0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect())
}

/// Finite actions `A` with utilities `u(a, o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    actions: Actions,
    n_outcomes: usize,
    /// Row-major `m × n`.
    utility: Vec<f64>,
}

impl DecisionProblem {
    pub fn new(actions: Actions, utility: Vec<Vec<f64>>) -> Result<Self> {
        let m = actions.len();
        if m < 2 {
            return arg_err(format!("need at least 2 actions, got {m}"));
        }
        if utility.len() != m {
            return arg_err(format!("utility table has {} rows for {m} actions", utility.len()));
        }
        let n = utility[0].len();
        if n < 2 {
            return arg_err("utility table needs at least 2 outcome columns");
        }
        if utility.iter().any(|r| r.len() != n) {
            return arg_err("utility table rows differ in length");
        }
        if utility.iter().flatten().any(|u| !u.is_finite()) {
            return arg_err("utilities must be finite");
        }
        Ok(Self { actions, n_outcomes: n, utility: utility.concat() })
    }

    /// Labelled actions `a0, a1, ...` over a utility table.
    pub fn from_table(utility: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..utility.len()).map(|i| format!("a{i}")).collect();
        Self::new(Actions::Labelled(labels), utility)
    }

    /// `u(a, o) = −(x_o − a)²` on an action grid over `[0, 1]`, with outcome
    /// `o` placed at `x_o = o / (n − 1)`. Its best response to `q` is the grid
    /// point nearest `E_q[x]`.
    pub fn neg_squared(step: f64, n_outcomes: usize) -> Result<Self> {
        Self::neg_squared_on(Actions::grid(0.0, 1.0, step)?, n_outcomes)
    }

    pub fn neg_squared_on(actions: Actions, n_outcomes: usize) -> Result<Self> {
        if n_outcomes < 2 {
            return arg_err("need at least 2 outcomes");
        }
        let Actions::Grid { values, .. } = &actions else {
            return arg_err("neg_squared utility needs a numeric action grid");
        };
        let table = values
            .iter()
            .map(|&a| {
                (0..n_outcomes)
                    .map(|o| {
                        let x = o as f64 / (n_outcomes - 1) as f64;
                        -(x - a) * (x - a)
                    })
                    .collect()
            })
            .collect();
        Self::new(actions, table)
    }

    pub fn actions(&self) -> &Actions {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.n_outcomes
    }

    pub fn utility(&self, action: usize, outcome: usize) -> f64 {
        self.utility[action * self.n_outcomes + outcome]
    }

    pub fn utility_row(&self, action: usize) -> &[f64] {
        &self.utility[action * self.n_outcomes..(action + 1) * self.n_outcomes]
    }

    /// Same problem with utilities `κ·u + c`.
    pub fn affine(&self, kappa: f64, shift: f64) -> Self {
        Self {
            actions: self.actions.clone(),
            n_outcomes: self.n_outcomes,
            utility: self.utility.iter().map(|u| kappa * u + shift).collect(),
        }
    }

    /// `E_q[u(a, o)]` for every action.
    pub fn expected_utilities(&self, q: &[f64]) -> Vec<f64> {
        (0..self.action_count()).map(|a| dot(self.utility_row(a), q)).collect()
    }

    pub(crate) fn check_outcomes(&self, n: usize) -> Result<()> {
        if n != self.n_outcomes {
            return Err(Error::SpaceMismatch(format!(
                "decision problem has {} outcomes, distribution has {n}",
                self.n_outcomes
            )));
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestAction {
    pub index: usize,
    pub value: f64,
    pub unique: bool,
}

/// Argmax over a value vector. Values within [`TIE_TOL`] of the maximum
/// count as tied and the lowest such index wins.
pub fn argmax_with_ties(values: &[f64]) -> BestAction {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut index = None;
    let mut ties = 0;
    for (i, &v) in values.iter().enumerate() {
        if v >= max - TIE_TOL {
            ties += 1;
            index.get_or_insert(i);
        }
    }
    let index = index.unwrap_or(0);
    BestAction { index, value: values[index], unique: ties == 1 }
}

pub(crate) fn best_action_probs(problem: &DecisionProblem, q: &[f64]) -> BestAction {
    argmax_with_ties(&problem.expected_utilities(q))
}

/// `argmax_a E_belief[u(a, o)]`.
pub fn best_action(problem: &DecisionProblem, belief: &Distribution) -> Result<BestAction> {
    problem.check_outcomes(belief.len())?;
    Ok(best_action_probs(problem, belief.probs()))
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessCertificate {
    pub unique: bool,
    pub points_checked: usize,
    /// Grid beliefs where two or more actions tie.
    pub ties: Vec<Vec<f64>>,
}

/// Sweeps beliefs on the simplex grid with spacing `grid_step` and checks that
/// the best action is unique at each one. A grid-resolution necessary
/// condition, not a proof.
pub fn certify_unique_argmax(problem: &DecisionProblem, grid_step: f64) -> Result<UniquenessCertificate> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return arg_err(format!("grid step {grid_step} outside (0, 0.1]"));
    }
    let ratio = 1.0 / grid_step;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-6 {
        return arg_err(format!("grid step {grid_step} does not divide 1"));
    }
    let points = simplex_grid(problem.outcome_count(), k as usize);
    let mut ties = Vec::new();
    for q in &points {
        if !best_action_probs(problem, q).unique {
            ties.push(q.clone());
        }
    }
    Ok(UniquenessCertificate { unique: ties.is_empty(), points_checked: points.len(), ties })
}

/// All points of the `n`-outcome simplex with coordinates in `{0, 1/k, ..., 1}`.
pub fn simplex_grid(n: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / k as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(n, left - c, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, k, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Best actions at the extreme points of a credal set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionFingerprint {
    /// Distinct best actions, ascending.
    pub actions: Vec<usize>,
    /// Best action per extreme point, in extreme-point order.
    pub per_extreme: Vec<usize>,
    /// False when some extreme point has tied best actions.
    pub all_unique: bool,
}

pub fn action_fingerprint(problem: &DecisionProblem, set: &CredalSet) -> Result<ActionFingerprint> {
    problem.check_outcomes(set.outcome_count())?;
    let mut per_extreme = Vec::new();
    let mut all_unique = true;
    for q in set.extreme_points() {
        let b = best_action_probs(problem, q.probs());
        all_unique &= b.unique;
        per_extreme.push(b.index);
    }
    let mut actions = per_extreme.clone();
    actions.sort_unstable();
    actions.dedup();
    Ok(ActionFingerprint { actions, per_extreme, all_unique })
}

/// JSON form:
/// `{"actions": {"grid":[0,1,0.01]} | ["a1","a2"], "utility": "neg_squared" | [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionProblemSpec {
    pub actions: ActionsSpec,
    pub utility: UtilitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionsSpec {
    Grid { grid: [f64; 3] },
    Labels(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UtilitySpec {
    Named(NamedUtility),
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedUtility {
    NegSquared,
}

impl Default for DecisionProblemSpec {
    fn default() -> Self {
        Self {
            actions: ActionsSpec::Grid { grid: [0.0, 1.0, 0.01] },
            utility: UtilitySpec::Named(NamedUtility::NegSquared),
        }
    }
}

impl DecisionProblemSpec {
    pub fn build(&self, n_outcomes: usize) -> Result<DecisionProblem> {
        let actions = match &self.actions {
            ActionsSpec::Grid { grid: [lo, hi, step] } => Actions::grid(*lo, *hi, *step)?,
            ActionsSpec::Labels(l) => Actions::Labelled(l.clone()),
        };
        let problem = match &self.utility {
            UtilitySpec::Named(NamedUtility::NegSquared) => DecisionProblem::neg_squared_on(actions, n_outcomes)?,
            UtilitySpec::Table(t) => DecisionProblem::new(actions, t.clone())?,
        };
        problem.check_outcomes(n_outcomes)?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(x: f64) -> Distribution {
        Distribution::bernoulli(x).unwrap()
    }

    #[test]
    fn neg_squared_best_action_is_mean() {
        let p = DecisionProblem::neg_squared(0.01, 2).unwrap();
        let b = best_action(&p, &bern(0.3)).unwrap();
        assert_eq!(p.actions().value(b.index), Some(0.3));
        assert!(b.unique);
    }

    #[test]
    fn constant_utility_ties() {
        let p = DecisionProblem::from_table(vec![vec![1.0, 1.0]; 4]).unwrap();
        let b = best_action(&p, &bern(0.7)).unwrap();
        assert_eq!(b.index, 0);
        assert!(!b.unique);
    }

    #[test]
    fn two_action_tie_at_half() {
        let p = DecisionProblem::from_table(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = best_action(&p, &bern(0.5)).unwrap();
        assert_eq!((b.index, b.unique), (0, false));
        assert!((b.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn best_action_dimension_mismatch() {
        let p = DecisionProblem::neg_squared(0.1, 3).unwrap();
        assert!(matches!(best_action(&p, &bern(0.5)), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn problem_validation() {
        assert!(DecisionProblem::from_table(vec![vec![1.0, 0.0]]).is_err());
        assert!(DecisionProblem::from_table(vec![vec![1.0, 0.0], vec![1.0]]).is_err());
        assert!(DecisionProblem::from_table(vec![vec![1.0, f64::NAN], vec![0.0, 1.0]]).is_err());
        assert!(Actions::grid(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn grid_values_are_exact_decimals() {
        let Actions::Grid { values, .. } = Actions::grid(0.0, 1.0, 0.01).unwrap() else { unreachable!() };
        assert_eq!(values.len(), 101);
        assert_eq!(values[30], 0.3);
        assert_eq!(values[57], 0.57);
    }

    #[test]
    fn certify_on_aligned_grid() {
        let p = DecisionProblem::neg_squared(0.01, 2).unwrap();
        let c = certify_unique_argmax(&p, 0.01).unwrap();
        assert!(c.unique, "{:?}", c.ties);
        assert_eq!(c.points_checked, 101);
    }

    #[test]
    fn certify_finds_midpoint_ties() {
        // Beliefs at odd multiples of 0.005 sit halfway between two actions.
        let p = DecisionProblem::neg_squared(0.01, 2).unwrap();
        let c = certify_unique_argmax(&p, 0.005).unwrap();
        assert!(!c.unique);
        assert_eq!(c.ties.len(), 100);
        for t in &c.ties {
            let scaled = t[1] * 200.0;
            assert!((scaled - scaled.round()).abs() < 1e-9 && scaled.round() as i64 % 2 == 1);
        }
    }

    #[test]
    fn certify_constant_utility_fails() {
        let p = DecisionProblem::from_table(vec![vec![0.0, 0.0]; 3]).unwrap();
        assert!(!certify_unique_argmax(&p, 0.1).unwrap().unique);
        assert!(certify_unique_argmax(&p, 0.2).is_err());
    }

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(2, 10).len(), 11);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        assert!(simplex_grid(4, 5).iter().all(|q| (q.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fingerprint_examples() {
        let p = DecisionProblem::neg_squared(0.01, 2).unwrap();
        let f = action_fingerprint(&p, &CredalSet::interval(0.4, 0.6).unwrap()).unwrap();
        assert_eq!(f.actions, vec![40, 60]);
        assert!(f.all_unique);
        let f = action_fingerprint(&p, &CredalSet::interval(0.3, 0.3).unwrap()).unwrap();
        assert_eq!(f.actions, vec![30]);
    }

    #[test]
    fn spec_json_forms() {
        let spec: DecisionProblemSpec =
            serde_json::from_str(r#"{"actions":{"grid":[0,1,0.01]},"utility":"neg_squared"}"#).unwrap();
        assert_eq!(spec, DecisionProblemSpec::default());
        assert_eq!(spec.build(2).unwrap().action_count(), 101);

        let spec: DecisionProblemSpec =
            serde_json::from_str(r#"{"actions":["go","stay"],"utility":[[1,0],[0,1]]}"#).unwrap();
        let p = spec.build(2).unwrap();
        assert_eq!(p.actions().label(1), "stay");
        assert!(spec.build(3).is_err());

        let bad: DecisionProblemSpec =
            serde_json::from_str(r#"{"actions":["x","y"],"utility":"neg_squared"}"#).unwrap();
        assert!(bad.build(2).is_err());
    }
}
