//! Seeded random sampling on the probability simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::probability::Distribution;

/// The generator used for every seeded run. ChaCha keeps streams stable
/// across platforms and crate upgrades.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric Dirichlet(1) draw, i.e. uniform on the simplex.
pub fn uniform_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    for x in &mut v {
        *x /= total;
    }
    v
}

pub fn uniform_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    Distribution::new_unchecked(uniform_simplex(rng, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_lie_on_simplex() {
        let mut rng = seeded(7);
        for n in 2..6 {
            let v = uniform_simplex(&mut rng, n);
            assert_eq!(v.len(), n);
            assert!(v.iter().all(|&x| x >= 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = uniform_simplex(&mut seeded(42), 4);
        let b = uniform_simplex(&mut seeded(42), 4);
        assert_eq!(a, b);
    }
}
