//! Precise scoring rules.
//!
//! Scores are extended reals: `f64::NEG_INFINITY` marks a logarithmic score
//! on an outcome the report rules out. Expectations use `0 · (−∞) = 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::probability::Distribution;
use crate::sampling::{seeded, uniform_distribution};

/// Strictness margin: `E_p[s(p)] ≤ E_p[s(q)] + STRICT_MARGIN` is a violation.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Convex function on the simplex together with a subgradient.
pub trait ConvexPotential: Send + Sync + std::fmt::Debug {
    fn value(&self, q: &[f64]) -> f64;
    fn subgradient(&self, q: &[f64]) -> Vec<f64>;
}

/// `G(q) = Σ q_o²`, which generates the quadratic rule.
#[derive(Debug, Clone, Copy)]
pub struct SumOfSquares;

impl ConvexPotential for SumOfSquares {
    fn value(&self, q: &[f64]) -> f64 {
        q.iter().map(|x| x * x).sum()
    }

    fn subgradient(&self, q: &[f64]) -> Vec<f64> {
        q.iter().map(|x| 2.0 * x).collect()
    }
}

/// `G(q) = Σ q_o ln q_o`, which generates the logarithmic rule.
#[derive(Debug, Clone, Copy)]
pub struct NegativeEntropy;

impl ConvexPotential for NegativeEntropy {
    fn value(&self, q: &[f64]) -> f64 {
        q.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum()
    }

    fn subgradient(&self, q: &[f64]) -> Vec<f64> {
        q.iter().map(|&x| if x > 0.0 { x.ln() + 1.0 } else { f64::NEG_INFINITY }).collect()
    }
}

/// `G(q) = Σ c_o q_o`. Convex but not strictly; the induced rule is the
/// constant `s(q, o) = c_o`.
#[derive(Debug, Clone)]
pub struct Linear(pub Vec<f64>);

impl ConvexPotential for Linear {
    fn value(&self, q: &[f64]) -> f64 {
        self.0.iter().zip(q).map(|(c, x)| c * x).sum()
    }

    fn subgradient(&self, q: &[f64]) -> Vec<f64> {
        let _ = q;
        self.0.clone()
    }
}

#[derive(Debug, Clone)]
pub enum PreciseScoringRule {
    /// `a_o + b ln q(o)`.
    Logarithmic { offsets: Option<Vec<f64>>, scale: f64 },
    /// `a_o + b (2 q(o) − Σ q²)`.
    Quadratic { offsets: Option<Vec<f64>>, scale: f64 },
    /// `G(q) − ⟨G'(q), q⟩ + G'(q)(o)`.
    Gneiting(Arc<dyn ConvexPotential>),
}

impl PreciseScoringRule {
    pub fn logarithmic() -> Self {
        Self::Logarithmic { offsets: None, scale: 1.0 }
    }

    pub fn quadratic() -> Self {
        Self::Quadratic { offsets: None, scale: 1.0 }
    }

    pub fn from_potential(g: impl ConvexPotential + 'static) -> Self {
        Self::Gneiting(Arc::new(g))
    }

    /// Constant score `c` on every outcome.
    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_potential(Linear(vec![c; n]))
    }

    pub fn with_affine(self, offsets: Vec<f64>, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return arg_err(format!("scale must be positive, got {scale}"));
        }
        match self {
            Self::Logarithmic { .. } => Ok(Self::Logarithmic { offsets: Some(offsets), scale }),
            Self::Quadratic { .. } => Ok(Self::Quadratic { offsets: Some(offsets), scale }),
            Self::Gneiting(_) => arg_err("affine parameters apply to logarithmic and quadratic rules"),
        }
    }

    fn offset(offsets: &Option<Vec<f64>>, o: usize) -> f64 {
        offsets.as_ref().map_or(0.0, |a| a[o])
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        if let Self::Logarithmic { offsets: Some(a), .. } | Self::Quadratic { offsets: Some(a), .. } = self {
            if a.len() != n {
                return Err(Error::SpaceMismatch(format!("rule has {} offsets, report has {n} outcomes", a.len())));
            }
        }
        Ok(())
    }
}

/// `s(report, outcome)`.
pub fn score(rule: &PreciseScoringRule, report: &Distribution, outcome: usize) -> Result<f64> {
    let q = report.probs();
    if outcome >= q.len() {
        return arg_err(format!("outcome {outcome} out of range for {} outcomes", q.len()));
    }
    rule.check_dims(q.len())?;
    Ok(match rule {
        PreciseScoringRule::Logarithmic { offsets, scale } => {
            let a = PreciseScoringRule::offset(offsets, outcome);
            if q[outcome] > 0.0 {
                a + scale * q[outcome].ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        PreciseScoringRule::Quadratic { offsets, scale } => {
            let a = PreciseScoringRule::offset(offsets, outcome);
            let sq: f64 = q.iter().map(|x| x * x).sum();
            a + scale * (2.0 * q[outcome] - sq)
        }
        PreciseScoringRule::Gneiting(g) => {
            let grad = g.subgradient(q);
            if grad[outcome] == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            let inner: f64 = grad.iter().zip(q).filter(|(_, &x)| x > 0.0).map(|(d, x)| d * x).sum();
            g.value(q) - inner + grad[outcome]
        }
    })
}

/// `E_{o∼belief}[s(report, o)]`.
pub fn expected_score(rule: &PreciseScoringRule, report: &Distribution, belief: &Distribution) -> Result<f64> {
    if report.len() != belief.len() {
        return Err(Error::SpaceMismatch(format!("report has {} outcomes, belief has {}", report.len(), belief.len())));
    }
    let scores = (0..report.len()).map(|o| score(rule, report, o)).collect::<Result<Vec<_>>>()?;
    Ok(belief.expectation(&scores))
}

#[derive(Debug, Clone, Serialize)]
pub struct PropernessViolation {
    pub belief: Vec<f64>,
    pub report: Vec<f64>,
    pub truthful: f64,
    pub misreport: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictPropernessReport {
    pub trials: usize,
    pub violations: Vec<PropernessViolation>,
}

impl StrictPropernessReport {
    pub fn is_strict(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `trials` pairs `(p, q)` with `‖p − q‖∞ > 1e-6` on `n_outcomes`
/// outcomes and records every pair where truthful reporting does not win by
/// more than [`STRICT_MARGIN`].
pub fn verify_strict_properness(
    rule: &PreciseScoringRule,
    n_outcomes: usize,
    trials: usize,
    seed: u64,
) -> Result<StrictPropernessReport> {
    if trials == 0 {
        return arg_err("trials must be at least 1");
    }
    if n_outcomes < 2 {
        return arg_err("need at least 2 outcomes");
    }
    rule.check_dims(n_outcomes)?;
    let mut rng = seeded(seed);
    let mut violations = Vec::new();
    let mut done = 0;
    while done < trials {
        let p = uniform_distribution(&mut rng, n_outcomes);
        let q = uniform_distribution(&mut rng, n_outcomes);
        if p.linf_distance(&q) <= 1e-6 {
            continue;
        }
        done += 1;
        let truthful = expected_score(rule, &p, &p)?;
        let misreport = expected_score(rule, &q, &p)?;
        if truthful <= misreport + STRICT_MARGIN {
            violations.push(PropernessViolation {
                belief: p.probs().to_vec(),
                report: q.probs().to_vec(),
                truthful,
                misreport,
            });
        }
    }
    Ok(StrictPropernessReport { trials, violations })
}

/// Largest `|E_q[s(q, ·)] − G(q)|` over `samples` uniform draws of `q`.
pub fn expected_score_is_g(rule: &PreciseScoringRule, n_outcomes: usize, samples: usize, seed: u64) -> Result<f64> {
    let PreciseScoringRule::Gneiting(g) = rule else {
        return arg_err("expected_score_is_g needs a potential-constructed rule");
    };
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let q = uniform_distribution(&mut rng, n_outcomes);
        let dev = (expected_score(rule, &q, &q)? - g.value(q.probs())).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// JSON form: `{"kind":"quadratic","a":[...],"b":1.0}`,
/// `{"kind":"logarithmic"}`, `{"kind":"gneiting","potential":"sum_squares"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreciseRuleSpec {
    Logarithmic {
        #[serde(default)]
        a: Option<Vec<f64>>,
        #[serde(default = "one")]
        b: f64,
    },
    Quadratic {
        #[serde(default)]
        a: Option<Vec<f64>>,
        #[serde(default = "one")]
        b: f64,
    },
    Gneiting {
        potential: PotentialSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSpec {
    SumSquares,
    NegEntropy,
    Linear(Vec<f64>),
}

fn one() -> f64 {
    1.0
}

impl TryFrom<PreciseRuleSpec> for PreciseScoringRule {
    type Error = Error;

    fn try_from(spec: PreciseRuleSpec) -> Result<Self> {
        let affine = |base: Self, a: Option<Vec<f64>>, b: f64| match a {
            Some(a) => base.with_affine(a, b),
            None if b > 0.0 => Ok(match base {
                Self::Logarithmic { .. } => Self::Logarithmic { offsets: None, scale: b },
                Self::Quadratic { .. } => Self::Quadratic { offsets: None, scale: b },
                other => other,
            }),
            None => arg_err(format!("scale must be positive, got {b}")),
        };
        match spec {
            PreciseRuleSpec::Logarithmic { a, b } => affine(Self::logarithmic(), a, b),
            PreciseRuleSpec::Quadratic { a, b } => affine(Self::quadratic(), a, b),
            PreciseRuleSpec::Gneiting { potential } => Ok(match potential {
                PotentialSpec::SumSquares => Self::from_potential(SumOfSquares),
                PotentialSpec::NegEntropy => Self::from_potential(NegativeEntropy),
                PotentialSpec::Linear(c) => Self::from_potential(Linear(c)),
            }),
        }
    }
}
