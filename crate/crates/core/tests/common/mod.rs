#![allow(dead_code)]

use std::sync::Arc;

use ipscore::probability::{CredalSet, Distribution, OutcomeSpace};
use ipscore::sampling::{uniform_distribution, SeededRng};
use rand::Rng;

pub fn iv(lo: f64, hi: f64) -> CredalSet {
    CredalSet::interval(lo, hi).unwrap()
}

/// `g` uniform generators on `n` outcomes.
pub fn random_set(rng: &mut SeededRng, n: usize, g: usize) -> CredalSet {
    let space = Arc::new(OutcomeSpace::indexed(n).unwrap());
    let gens: Vec<Distribution> = (0..g).map(|_| uniform_distribution(rng, n)).collect();
    CredalSet::new(space, gens).unwrap()
}

/// Interval with endpoints on the grid of spacing `1/k`.
pub fn grid_interval(rng: &mut SeededRng, k: usize) -> CredalSet {
    let a = rng.random_range(0..=k);
    let b = rng.random_range(0..=k);
    iv(a.min(b) as f64 / k as f64, a.max(b) as f64 / k as f64)
}
