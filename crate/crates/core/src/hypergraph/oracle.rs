//! Lattice-grid reference maximizer for small hypergraphs. Shares no code
//! with the ascent engine beyond the polynomial evaluation.

use super::{binomial, lagrangian_poly, RGraph};
use crate::error::{ensure, Result};

const GRID_LIMIT: u128 = 100_000_000;

/// Exhaustive maximum of `P_G` over `{k/resolution}` simplex points,
/// followed by pairwise mass-transfer polishing. A lower bound on λ(G).
pub fn lagrangian_oracle_grid(g: &RGraph, resolution: usize) -> Result<f64> {
    let n = g.n();
    ensure!(
        n >= 1 && resolution >= 1,
        Parameter,
        "grid needs n >= 1 and resolution >= 1"
    );
    let points = binomial((resolution + n - 1) as u64, (n - 1) as u64);
    ensure!(
        points <= GRID_LIMIT,
        Capacity,
        "grid has {points} points, limit {GRID_LIMIT}"
    );
    if g.edge_count() == 0 {
        return Ok(0.0);
    }

    let mut counts = vec![0usize; n];
    counts[n - 1] = resolution;
    let mut best = f64::NEG_INFINITY;
    let mut best_y = vec![0.0; n];
    let mut y = vec![0.0; n];
    loop {
        for (yi, &c) in y.iter_mut().zip(&counts) {
            *yi = c as f64 / resolution as f64;
        }
        let v = lagrangian_poly(g, &y);
        if v > best {
            best = v;
            best_y.copy_from_slice(&y);
        }
        if !next_composition(&mut counts) {
            break;
        }
    }
    Ok(transfer_polish(g, best_y))
}

/// Steps through weak compositions of a fixed total, ending with all mass
/// in the first coordinate.
fn next_composition(c: &mut [usize]) -> bool {
    let n = c.len();
    // Rightmost non-zero position other than the first.
    let Some(i) = (1..n).rev().find(|&i| c[i] > 0) else {
        return false;
    };
    let moved = c[i];
    c[i] = 0;
    c[i - 1] += 1;
    c[n - 1] += moved - 1;
    true
}

/// Repeatedly moves mass between pairs of coordinates along the best
/// golden-section step; only improvements are kept.
fn transfer_polish(g: &RGraph, mut y: Vec<f64>) -> f64 {
    let n = y.len();
    let mut value = lagrangian_poly(g, &y);
    for _sweep in 0..200 {
        let start = value;
        for i in 0..n {
            for j in 0..n {
                if i == j || y[j] <= 0.0 {
                    continue;
                }
                let total = y[i] + y[j];
                let eval = |s: f64, y: &mut Vec<f64>| {
                    y[i] = s;
                    y[j] = total - s;
                    lagrangian_poly(g, y)
                };
                let (mut lo, mut hi) = (0.0, total);
                let phi = (5f64.sqrt() - 1.0) / 2.0;
                let mut work = y.clone();
                for _ in 0..80 {
                    let a = hi - phi * (hi - lo);
                    let b = lo + phi * (hi - lo);
                    if eval(a, &mut work) < eval(b, &mut work) {
                        lo = a;
                    } else {
                        hi = b;
                    }
                }
                let s = 0.5 * (lo + hi);
                let v = eval(s, &mut work);
                if v > value {
                    value = v;
                    y = work;
                }
            }
        }
        if value - start <= 1e-15 {
            break;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_exhaustive() {
        let mut c = vec![0, 0, 4];
        let mut count = 1;
        while next_composition(&mut c) {
            assert_eq!(c.iter().sum::<usize>(), 4);
            count += 1;
        }
        assert_eq!(count, 15);
        assert_eq!(c, vec![4, 0, 0]);
    }

    #[test]
    fn grid_examples() {
        let t = RGraph::complete(3, 3);
        assert!(lagrangian_oracle_grid(&t, 30).unwrap() >= 2.0 / 9.0 - 1e-3);
        let k4 = RGraph::complete(3, 4);
        assert!((lagrangian_oracle_grid(&k4, 40).unwrap() - 0.375).abs() < 1e-3);
        assert_eq!(
            lagrangian_oracle_grid(&RGraph::empty(3, 4), 10).unwrap(),
            0.0
        );
        assert!(lagrangian_oracle_grid(&RGraph::complete(3, 30), 100).is_err());
    }
}
