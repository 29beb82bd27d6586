//! Properness of arbitrary score tables on a finite report lattice, checked
//! with the dominance definition: for every belief `P` in the lattice, every
//! report `Q ≄ P` and every `p ∈ ext(P)`, `E_p[s(P, ·)] ≥ E_p[s(Q, ·)]`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::probability::{credal_equivalent, CredalSet, Distribution};
use crate::scoring::{score, PreciseScoringRule};

pub const MAX_LATTICE: usize = 10;
const TABLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ReportLattice {
    reports: Vec<CredalSet>,
}

impl ReportLattice {
    /// Requires the vacuous set and a singleton report for every extreme
    /// point of every member.
    pub fn new(reports: Vec<CredalSet>) -> Result<Self> {
        if reports.is_empty() {
            return arg_err("lattice is empty");
        }
        if reports.len() > MAX_LATTICE {
            return arg_err(format!("lattice has {} reports, at most {MAX_LATTICE} allowed", reports.len()));
        }
        let space = Arc::clone(reports[0].space());
        if reports.iter().any(|r| r.space().labels() != space.labels()) {
            return Err(Error::SpaceMismatch("lattice reports use different outcome spaces".into()));
        }
        let vacuous = CredalSet::vacuous(space);
        if !reports.iter().any(|r| credal_equivalent(r, &vacuous).unwrap_or(false)) {
            return arg_err("lattice must contain the vacuous set");
        }
        for r in &reports {
            for e in r.extreme_points() {
                let has_singleton = reports.iter().any(|s| s.is_precise() && s.extreme_points()[0].approx_eq(e));
                if !has_singleton {
                    return arg_err(format!("lattice lacks the singleton report {:?}", e.probs()));
                }
            }
        }
        Ok(Self { reports })
    }

    /// `{δ0}, {Bern(0.5)}, {δ1}, [0, 0.5], [0, 1]` on a binary space.
    pub fn default_binary() -> Self {
        let iv = |lo, hi| CredalSet::interval(lo, hi).expect("valid interval");
        Self::new(vec![iv(0.0, 0.0), iv(0.5, 0.5), iv(1.0, 1.0), iv(0.0, 0.5), iv(0.0, 1.0)])
            .expect("default lattice is well formed")
    }

    pub fn reports(&self) -> &[CredalSet] {
        &self.reports
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn outcome_count(&self) -> usize {
        self.reports[0].outcome_count()
    }

    /// Table of uniform `[lo, hi)` scores.
    pub fn random_table<R: Rng + ?Sized>(&self, rng: &mut R, lo: f64, hi: f64) -> ScoreTable {
        let n = self.outcome_count();
        ScoreTable((0..self.len()).map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect()).collect())
    }

    pub fn constant_table(&self, c: f64) -> ScoreTable {
        ScoreTable(vec![vec![c; self.outcome_count()]; self.len()])
    }

    /// The precise quadratic score evaluated at the centroid of each report's
    /// extreme points.
    pub fn centroid_quadratic_table(&self) -> ScoreTable {
        let n = self.outcome_count();
        let quad = PreciseScoringRule::quadratic();
        ScoreTable(
            self.reports
                .iter()
                .map(|r| {
                    let ext = r.extreme_points();
                    let mut c = vec![0.0; n];
                    for e in ext {
                        for (acc, p) in c.iter_mut().zip(e.probs()) {
                            *acc += p / ext.len() as f64;
                        }
                    }
                    let centroid = Distribution::new(c).expect("average of distributions");
                    (0..n).map(|o| score(&quad, &centroid, o).expect("in range")).collect()
                })
                .collect(),
        )
    }
}

impl TryFrom<Vec<CredalSet>> for ReportLattice {
    type Error = Error;

    fn try_from(v: Vec<CredalSet>) -> Result<Self> {
        Self::new(v)
    }
}

/// `s(Q, o)`: one row per lattice report, one column per outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable(pub Vec<Vec<f64>>);

impl ScoreTable {
    pub fn is_constant(&self) -> bool {
        let Some(first) = self.0.first().and_then(|r| r.first()) else {
            return true;
        };
        self.0.iter().flatten().all(|v| (v - first).abs() <= TABLE_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceViolation {
    pub belief: usize,
    pub report: usize,
    pub member: Vec<f64>,
    pub truthful: f64,
    pub misreport: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpossibilityResult {
    pub proper: bool,
    pub constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<DominanceViolation>,
}

pub fn impossibility_check(lattice: &ReportLattice, table: &ScoreTable) -> Result<ImpossibilityResult> {
    let n = lattice.outcome_count();
    if table.0.len() != lattice.len() || table.0.iter().any(|r| r.len() != n) {
        return arg_err(format!("score table must be {} × {n}", lattice.len()));
    }
    let reports = lattice.reports();
    for (bi, belief) in reports.iter().enumerate() {
        for (ri, report) in reports.iter().enumerate() {
            if ri == bi || credal_equivalent(belief, report)? {
                continue;
            }
            for p in belief.extreme_points() {
                let truthful = p.expectation(&table.0[bi]);
                let misreport = p.expectation(&table.0[ri]);
                if truthful < misreport - TABLE_TOL {
                    return Ok(ImpossibilityResult {
                        proper: false,
                        constant: table.is_constant(),
                        violation: Some(DominanceViolation {
                            belief: bi,
                            report: ri,
                            member: p.probs().to_vec(),
                            truthful,
                            misreport,
                        }),
                    });
                }
            }
        }
    }
    Ok(ImpossibilityResult { proper: true, constant: table.is_constant(), violation: None })
}

/// Builds a lattice from interval pairs on a binary space.
pub fn binary_lattice(intervals: &[(f64, f64)]) -> Result<ReportLattice> {
    let reports = intervals.iter().map(|&(lo, hi)| CredalSet::interval(lo, hi)).collect::<Result<Vec<_>>>()?;
    ReportLattice::new(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;

    #[test]
    fn constant_table_is_proper() {
        let l = ReportLattice::default_binary();
        let r = impossibility_check(&l, &l.constant_table(3.0)).unwrap();
        assert!(r.proper && r.constant);
    }

    #[test]
    fn centroid_quadratic_is_not_proper() {
        let l = ReportLattice::default_binary();
        let r = impossibility_check(&l, &l.centroid_quadratic_table()).unwrap();
        assert!(!r.proper);
        assert!(!r.constant);
        let v = r.violation.unwrap();
        assert!(v.misreport > v.truthful);
    }

    #[test]
    fn random_tables_are_never_proper() {
        let l = ReportLattice::default_binary();
        let mut rng = seeded(3);
        for _ in 0..500 {
            let t = l.random_table(&mut rng, -1.0, 1.0);
            assert!(!impossibility_check(&l, &t).unwrap().proper);
        }
    }

    #[test]
    fn zero_probability_cells_are_unconstrained() {
        // Lowering s({δ0}, 1) touches only an outcome δ0 rules out, so no
        // belief in the lattice can detect it. Proper, yet not constant.
        let l = ReportLattice::default_binary();
        let mut t = l.constant_table(1.0);
        t.0[0][1] = -5.0;
        let r = impossibility_check(&l, &t).unwrap();
        assert!(r.proper);
        assert!(!r.constant);
    }

    #[test]
    fn malformed_lattices() {
        // No vacuous set.
        assert!(binary_lattice(&[(0.0, 0.0), (1.0, 1.0)]).is_err());
        // Missing singleton for 0.5.
        assert!(binary_lattice(&[(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.5)]).is_err());
        let too_many: Vec<(f64, f64)> = (0..=10).map(|i| (i as f64 / 10.0, i as f64 / 10.0)).collect();
        assert!(binary_lattice(&too_many).is_err());
        let l = ReportLattice::default_binary();
        assert!(impossibility_check(&l, &ScoreTable(vec![vec![0.0; 2]; 4])).is_err());
    }
}
