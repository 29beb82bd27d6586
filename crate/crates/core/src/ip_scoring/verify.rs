//! Brute-force properness checks over finite report grids.

use rayon::prelude::*;
use serde::Serialize;

use super::ReportValuer;
use crate::error::{arg_err, Result};
use crate::probability::{credal_equivalent, CredalSet, CredalSetSpec};
use crate::VALUE_TOL;

/// Binary interval reports `[q1, q2]` with `q1 ≤ q2` on the grid of spacing
/// `step`, row-major: `q1` outer, `q2` inner.
pub fn interval_report_grid(step: f64) -> Result<Vec<CredalSet>> {
    let pts = grid_points(step)?;
    let mut out = Vec::with_capacity(pts.len() * (pts.len() + 1) / 2);
    for (i, &lo) in pts.iter().enumerate() {
        for &hi in &pts[i..] {
            out.push(CredalSet::interval(lo, hi)?);
        }
    }
    Ok(out)
}

fn grid_points(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return arg_err(format!("grid step {step} outside (0, 1]"));
    }
    let ratio = 1.0 / step;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-6 {
        return arg_err(format!("grid step {step} does not divide 1"));
    }
    let k = k as usize;
    Ok((0..=k).map(|i| i as f64 / k as f64).collect())
}

/// How a report is printed: `[q1, q2]` for binary sets, generators otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportDescriptor {
    Interval([f64; 2]),
    Set(CredalSetSpec),
}

impl From<&CredalSet> for ReportDescriptor {
    fn from(set: &CredalSet) -> Self {
        match set.as_interval() {
            Some((lo, hi)) => Self::Interval([lo, hi]),
            None => Self::Set(set.to_spec()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProperReport {
    pub is_proper: bool,
    pub is_strict: bool,
    pub max_value: f64,
    pub truthful_value: f64,
    pub argmax: Vec<ReportDescriptor>,
    /// Reports that beat the truthful report by more than the margin.
    pub violations: Vec<ReportDescriptor>,
    #[serde(skip)]
    pub argmax_indices: Vec<usize>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// Evaluates `V^P(Q)` over every report. Proper iff no report beats the
/// truthful one by more than 1e-9; strict iff every report within 1e-9 of the
/// maximum is equivalent to the belief.
pub fn verify_properness(valuer: &dyn ReportValuer, belief: &CredalSet, reports: &[CredalSet]) -> Result<ProperReport> {
    let truthful_idx =
        reports.iter().map(|r| credal_equivalent(r, belief)).collect::<Result<Vec<_>>>()?.iter().position(|&eq| eq);
    let Some(truthful_idx) = truthful_idx else {
        return arg_err("report grid does not contain a report equivalent to the belief");
    };

    let values = reports.par_iter().map(|r| valuer.value(belief, r)).collect::<Result<Vec<f64>>>()?;

    let truthful_value = values[truthful_idx];
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violations: Vec<ReportDescriptor> =
        reports.iter().zip(&values).filter(|(_, &v)| v > truthful_value + VALUE_TOL).map(|(r, _)| r.into()).collect();
    let argmax_indices: Vec<usize> = (0..reports.len()).filter(|&i| values[i] >= max_value - VALUE_TOL).collect();
    let mut is_strict = true;
    for &i in &argmax_indices {
        if !credal_equivalent(&reports[i], belief)? {
            is_strict = false;
            break;
        }
    }
    Ok(ProperReport {
        is_proper: violations.is_empty(),
        is_strict: violations.is_empty() && is_strict,
        max_value,
        truthful_value,
        argmax: argmax_indices.iter().map(|&i| (&reports[i]).into()).collect(),
        violations,
        argmax_indices,
        values,
    })
}

/// A report `Q` with `co(Q) ⊂ co(P)`, `Q ≄ P` and the same value as the
/// truthful report, searched in grid order.
pub fn non_strictness_witness(
    valuer: &dyn ReportValuer,
    belief: &CredalSet,
    reports: &[CredalSet],
) -> Result<Option<CredalSet>> {
    if belief.extreme_points().len() < 2 {
        return Ok(None);
    }
    let truthful = valuer.value(belief, belief)?;
    for r in reports {
        if r.is_subset_of(belief) && !credal_equivalent(r, belief)? {
            let v = valuer.value(belief, r)?;
            if (v - truthful).abs() <= VALUE_TOL {
                return Ok(Some(r.clone()));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub q1: f64,
    pub q2: f64,
    pub value: f64,
}

/// Forecaster value over the binary interval lattice `0 ≤ q1 ≤ q2 ≤ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreLandscape {
    pub belief: CredalSetSpec,
    pub grid_step: f64,
    pub rows: Vec<LandscapeRow>,
}

/// Rows come out in grid order regardless of how evaluation is scheduled.
pub fn score_landscape(valuer: &dyn ReportValuer, belief: &CredalSet, grid_step: f64) -> Result<ScoreLandscape> {
    if belief.outcome_count() != 2 {
        return arg_err("landscapes are defined for binary outcomes");
    }
    let reports = interval_report_grid(grid_step)?;
    let rows = reports
        .par_iter()
        .map(|r| {
            let (q1, q2) = r.as_interval().expect("binary report");
            Ok(LandscapeRow { q1, q2, value: valuer.value(belief, r)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreLandscape { belief: belief.to_spec(), grid_step, rows })
}
