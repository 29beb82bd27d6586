//! Convex-hull membership for small point sets.
//!
//! A point lies in the hull of a finite set iff it is a convex combination of
//! some affinely independent subset (Carathéodory). With at most
//! [`MAX_GENERATORS`] points we enumerate those subsets, solve the equality
//! system `[X_S; 1ᵀ] w = [p; 1]` in the least-squares sense and accept when
//! the weights are non-negative and the residual is within tolerance.

use crate::DIST_TOL;

/// Largest generating set accepted by the enumeration.
pub const MAX_GENERATORS: usize = 12;

const NEG_WEIGHT_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-12;

/// Convex weights over `points` reproducing `target` within [`DIST_TOL`] (L∞),
/// or `None` when `target` is outside their hull.
pub fn hull_weights(target: &[f64], points: &[&[f64]]) -> Option<Vec<f64>> {
    let n = target.len();
    let m = points.len();
    if m == 0 {
        return None;
    }
    debug_assert!(points.iter().all(|p| p.len() == n));
    debug_assert!(m <= 16, "subset enumeration is exponential in the point count");

    let max_size = m.min(n);
    for size in 1..=max_size {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if let Some(w) = solve_subset(target, points, &subset) {
                let mut full = vec![0.0; m];
                for (k, &j) in subset.iter().enumerate() {
                    full[j] = w[k].max(0.0);
                }
                return Some(full);
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
    }
    None
}

pub fn in_hull(target: &[f64], points: &[&[f64]]) -> bool {
    hull_weights(target, points).is_some()
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn solve_subset(target: &[f64], points: &[&[f64]], subset: &[usize]) -> Option<Vec<f64>> {
    let s = subset.len();
    let rows = target.len() + 1;
    let entry = |r: usize, c: usize| -> f64 {
        if r < target.len() {
            points[subset[c]][r]
        } else {
            1.0
        }
    };
    let rhs = |r: usize| -> f64 {
        if r < target.len() {
            target[r]
        } else {
            1.0
        }
    };

    // Normal equations (AᵀA) w = Aᵀb, s ≤ n is tiny.
    let mut ata = vec![vec![0.0; s + 1]; s];
    #[allow(clippy::needless_range_loop)]
    for i in 0..s {
        for j in 0..s {
            ata[i][j] = (0..rows).map(|r| entry(r, i) * entry(r, j)).sum();
        }
        ata[i][s] = (0..rows).map(|r| entry(r, i) * rhs(r)).sum();
    }
    let w = gauss_solve(ata)?;

    if w.iter().any(|&x| x < -NEG_WEIGHT_TOL) {
        return None;
    }
    for r in 0..rows {
        let fitted: f64 = (0..s).map(|c| entry(r, c) * w[c]).sum();
        if (fitted - rhs(r)).abs() > DIST_TOL {
            return None;
        }
    }
    Some(w)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
/// Returns `None` for (numerically) singular systems.
fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let s = a.len();
    let scale = a.iter().flat_map(|row| row[..s].iter()).fold(0.0_f64, |acc, x| acc.max(x.abs())).max(1.0);
    for col in 0..s {
        let pivot = (col..s).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= PIVOT_TOL * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..s {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (x, p) in bottom[0][col..=s].iter_mut().zip(&top[col][col..=s]) {
                    *x -= factor * p;
                }
            }
        }
    }
    let mut x = vec![0.0; s];
    for i in (0..s).rev() {
        let tail: f64 = (i + 1..s).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][s] - tail) / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_of_segment_is_inside() {
        let a = [0.6, 0.4];
        let b = [0.4, 0.6];
        let w = hull_weights(&[0.5, 0.5], &[&a, &b]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn point_outside_segment_is_rejected() {
        let a = [0.6, 0.4];
        let b = [0.5, 0.5];
        assert!(!in_hull(&[0.3, 0.7], &[&a, &b]));
    }

    #[test]
    fn barycenter_of_triangle() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        let c = [1.0 / 3.0; 3];
        let w = hull_weights(&c, &[&e1, &e2, &e3]).unwrap();
        for x in w {
            assert!((x - 1.0 / 3.0).abs() < 1e-9);
        }
        // A vertex is not inside the hull of the other two.
        assert!(!in_hull(&e1, &[&e2, &e3]));
    }

    #[test]
    fn duplicate_points_are_handled() {
        let a = [0.2, 0.8];
        assert!(in_hull(&[0.2, 0.8], &[&a, &a]));
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut idx, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }
}
