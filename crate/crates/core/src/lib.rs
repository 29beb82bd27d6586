//! Scoring rules for imprecise forecasts.
//!
//! A forecaster reports a credal set (a finitely generated convex set of
//! distributions over a finite outcome space). A decision maker acts on the
//! report through an aggregation rule and pays the forecaster a share of the
//! realized utility. This crate provides:
//!
//! * [`probability`]: distributions, credal sets, extreme points, equivalence.
//! * [`scoring`]: precise scoring rules and the convex-potential construction.
//! * [`decision`]: decision problems, best actions and action fingerprints.
//! * [`aggregation`]: utilitarian, egalitarian and fixed-weight aggregation
//!   plus checkers for Pareto efficiency, IIA and dictatorship.
//! * [`ip_scoring`]: tailored and randomized tailored scores, forecaster
//!   values, properness verification and the impossibility checker.
//! * [`harness`]: run configuration, score landscapes and the CLI commands.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod decision;
pub mod error;
pub mod harness;
pub mod ip_scoring;
pub mod probability;
pub mod sampling;
pub mod scoring;

pub use error::{Error, Result};

/// Two distributions are treated as equal when their L∞ distance is at most this.
pub const DIST_TOL: f64 = 1e-9;

/// Margin used to detect ties between expected utilities of actions.
pub const TIE_TOL: f64 = 1e-12;

/// Margin used for properness/strictness verdicts on forecaster values.
pub const VALUE_TOL: f64 = 1e-9;
