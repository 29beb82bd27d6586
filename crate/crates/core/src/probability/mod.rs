//! Finite-outcome distributions and finitely generated credal sets.

pub mod hull;

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::DIST_TOL;

const SUM_TOL: f64 = 1e-12;

/// Ordered, uniquely labelled outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return arg_err(format!("outcome space needs at least 2 outcomes, got {}", labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return arg_err(format!("duplicate outcome label {l:?}"));
            }
        }
        Ok(Self { labels })
    }

    /// Outcomes labelled `"0"`, `"1"`, ...
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn binary() -> Self {
        Self { labels: vec!["0".into(), "1".into()] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A probability mass function over `n` outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return arg_err("distribution needs at least 2 outcomes");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return arg_err(format!("probabilities must be finite and non-negative: {probs:?}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return arg_err(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(Self { probs })
    }

    /// Skips validation; callers guarantee the simplex invariant.
    pub(crate) fn new_unchecked(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    /// Two-outcome distribution `[1 - x, x]`.
    pub fn bernoulli(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return arg_err(format!("Bernoulli parameter {x} outside [0, 1]"));
        }
        Ok(Self { probs: vec![1.0 - x, x] })
    }

    pub fn point_mass(n: usize, outcome: usize) -> Result<Self> {
        if outcome >= n {
            return arg_err(format!("outcome {outcome} out of range for {n} outcomes"));
        }
        let mut probs = vec![0.0; n];
        probs[outcome] = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `E[values]` with the convention `0 · (−∞) = 0`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.probs.len());
        self.probs.iter().zip(values).filter(|(p, _)| **p > 0.0).map(|(p, v)| p * v).sum()
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.probs.iter().zip(&other.probs).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.linf_distance(other) <= DIST_TOL
    }

    /// Order used to index extreme points: compare the last outcome's mass
    /// first, then the previous one. For two outcomes this sorts `Bern(x)` by `x`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.probs.iter().rev().zip(other.probs.iter().rev()) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// `Σ_i weights_i · dists_i`.
pub fn mixture(weights: &[f64], dists: &[Distribution]) -> Result<Distribution> {
    if weights.len() != dists.len() || dists.is_empty() {
        return arg_err(format!(
            "mixture needs one weight per distribution ({} weights, {} distributions)",
            weights.len(),
            dists.len()
        ));
    }
    check_simplex(weights)?;
    let n = dists[0].len();
    if dists.iter().any(|d| d.len() != n) {
        return Err(Error::SpaceMismatch("mixture components differ in outcome count".into()));
    }
    let mut probs = vec![0.0; n];
    for (w, d) in weights.iter().zip(dists) {
        for (acc, p) in probs.iter_mut().zip(&d.probs) {
            *acc += w * p;
        }
    }
    for p in &mut probs {
        *p = p.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(Distribution { probs })
}

pub(crate) fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < -SUM_TOL) {
        return arg_err(format!("weights must be non-negative: {weights:?}"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > DIST_TOL {
        return arg_err(format!("weights sum to {total}, expected 1"));
    }
    Ok(())
}

/// A credal set given by a finite list of generators (V-representation).
///
/// Generators are de-duplicated at construction. Extreme points are computed
/// on first use and cached; they are stored in canonical order (see
/// [`Distribution::canonical_cmp`]), which is the order fixed-weight
/// aggregation vectors refer to.
#[derive(Debug, Clone)]
pub struct CredalSet {
    space: Arc<OutcomeSpace>,
    generators: Vec<Distribution>,
    extremes: OnceLock<Vec<Distribution>>,
}

impl CredalSet {
    pub fn new(space: Arc<OutcomeSpace>, generators: Vec<Distribution>) -> Result<Self> {
        if generators.is_empty() {
            return arg_err("credal set needs at least one generator");
        }
        let n = space.len();
        if let Some(bad) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::SpaceMismatch(format!("generator has {} entries, outcome space has {n}", bad.len())));
        }
        let mut unique: Vec<Distribution> = Vec::with_capacity(generators.len());
        for g in generators {
            if !unique.iter().any(|u| u.approx_eq(&g)) {
                unique.push(g);
            }
        }
        if unique.len() > hull::MAX_GENERATORS {
            return Err(Error::TooManyGenerators { got: unique.len(), max: hull::MAX_GENERATORS });
        }
        Ok(Self { space, generators: unique, extremes: OnceLock::new() })
    }

    pub fn precise(dist: Distribution) -> Self {
        let space = Arc::new(OutcomeSpace::indexed(dist.len()).expect("distribution has ≥ 2 outcomes"));
        Self::new(space, vec![dist]).expect("single generator is always valid")
    }

    /// Binary interval `[lo, hi]` with generators `{Bern(lo), Bern(hi)}`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi {
            return arg_err(format!("interval lower end {lo} exceeds upper end {hi}"));
        }
        let gens = vec![Distribution::bernoulli(lo)?, Distribution::bernoulli(hi)?];
        Self::new(Arc::new(OutcomeSpace::binary()), gens)
    }

    /// The whole simplex on `space`.
    pub fn vacuous(space: Arc<OutcomeSpace>) -> Self {
        let n = space.len();
        let gens = (0..n).map(|o| Distribution::point_mass(n, o).expect("in range")).collect();
        Self::new(space, gens).expect("vertices of the simplex")
    }

    pub fn space(&self) -> &Arc<OutcomeSpace> {
        &self.space
    }

    pub fn outcome_count(&self) -> usize {
        self.space.len()
    }

    pub fn generators(&self) -> &[Distribution] {
        &self.generators
    }

    pub fn extreme_points(&self) -> &[Distribution] {
        self.extremes.get_or_init(|| compute_extremes(&self.generators))
    }

    pub fn is_precise(&self) -> bool {
        self.extreme_points().len() == 1
    }

    /// Whether `dist` lies in the convex hull of the set.
    pub fn contains(&self, dist: &Distribution) -> bool {
        let pts: Vec<&[f64]> = self.extreme_points().iter().map(|d| d.probs()).collect();
        hull::in_hull(dist.probs(), &pts)
    }

    /// Whether `co(self) ⊆ co(other)`.
    pub fn is_subset_of(&self, other: &CredalSet) -> bool {
        self.extreme_points().iter().all(|e| other.contains(e))
    }

    /// Binary sets only: `(lower, upper)` probability of outcome 1.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        if self.outcome_count() != 2 {
            return None;
        }
        let ext = self.extreme_points();
        let lo = ext.first()?.probs()[1];
        let hi = ext.last()?.probs()[1];
        Some((lo, hi))
    }

    pub fn to_spec(&self) -> CredalSetSpec {
        CredalSetSpec {
            outcomes: self.space.labels().to_vec(),
            generators: self.generators.iter().map(|g| g.probs().to_vec()).collect(),
        }
    }
}

fn compute_extremes(generators: &[Distribution]) -> Vec<Distribution> {
    let mut extremes: Vec<Distribution> = generators
        .iter()
        .enumerate()
        .filter(|(i, g)| {
            let others: Vec<&[f64]> =
                generators.iter().enumerate().filter(|(j, _)| j != i).map(|(_, d)| d.probs()).collect();
            !hull::in_hull(g.probs(), &others)
        })
        .map(|(_, g)| g.clone())
        .collect();
    if extremes.is_empty() {
        // Only reachable through tolerance effects on nearly coincident points.
        extremes = generators.to_vec();
    }
    extremes.sort_by(Distribution::canonical_cmp);
    extremes
}

/// `ext(P)` for a credal set.
pub fn extreme_points(set: &CredalSet) -> Vec<Distribution> {
    set.extreme_points().to_vec()
}

/// `P ≃ P'` iff both sets have the same extreme points.
pub fn credal_equivalent(a: &CredalSet, b: &CredalSet) -> Result<bool> {
    if a.space.labels() != b.space.labels() {
        return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", a.space.labels(), b.space.labels())));
    }
    let ea = a.extreme_points();
    let eb = b.extreme_points();
    Ok(ea.len() == eb.len()
        && ea.iter().all(|x| eb.iter().any(|y| x.approx_eq(y)))
        && eb.iter().all(|y| ea.iter().any(|x| x.approx_eq(y))))
}

/// Range of expected values of a per-outcome vector over a credal set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityRange {
    pub lower: f64,
    pub upper: f64,
}

/// `[min_p E_p[v], max_p E_p[v]]` over `p ∈ co(belief)`; attained at extreme points.
pub fn utility_range(belief: &CredalSet, score_values: &[f64]) -> Result<UtilityRange> {
    if score_values.len() != belief.outcome_count() {
        return arg_err(format!(
            "score vector has {} entries, outcome space has {}",
            score_values.len(),
            belief.outcome_count()
        ));
    }
    let (lower, upper) = belief
        .extreme_points()
        .iter()
        .map(|p| p.expectation(score_values))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
    Ok(UtilityRange { lower, upper })
}

/// JSON form: `{"outcomes": [...], "generators": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalSetSpec {
    pub outcomes: Vec<String>,
    pub generators: Vec<Vec<f64>>,
}

impl TryFrom<CredalSetSpec> for CredalSet {
    type Error = Error;

    fn try_from(spec: CredalSetSpec) -> Result<Self> {
        let space = Arc::new(OutcomeSpace::new(spec.outcomes)?);
        let gens = spec.generators.into_iter().map(Distribution::new).collect::<Result<Vec<_>>>()?;
        CredalSet::new(space, gens)
    }
}

impl Serialize for CredalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CredalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = CredalSetSpec::deserialize(d)?;
        CredalSet::try_from(spec).map_err(serde::de::Error::custom)
    }
}
