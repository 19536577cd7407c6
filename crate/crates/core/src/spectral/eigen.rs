//! Symmetric eigensolvers: cyclic Jacobi for dense matrices and Lanczos
//! with full reorthogonalization on the zero-sum subspace of a regular graph.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CayleyGraph;
use crate::error::{Error, Result};

/// Eigen-decomposition of a dense symmetric matrix stored row-major.
///
/// Returns eigenvalues ascending and the matching eigenvectors (one `Vec`
/// per eigenvalue).
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    (values, vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeEigen {
    pub lambda2: f64,
    pub lambda_min: f64,
    pub residual_norm: f64,
    pub method: EigenMethod,
    /// Full spectrum (ascending) when the dense path ran.
    pub spectrum: Option<Vec<f64>>,
    pub iterations: usize,
}

fn residual(graph: &CayleyGraph, vector: &[f64], value: f64) -> f64 {
    let av = graph.apply(vector);
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = av
        .iter()
        .zip(vector)
        .map(|(a, x)| (a - value * x).powi(2))
        .sum::<f64>()
        .sqrt();
    r / norm
}

pub(super) fn dense_extremes(graph: &CayleyGraph) -> ExtremeEigen {
    let n = graph.n;
    let (values, vectors) = jacobi_eigen(&graph.dense_adjacency(), n);
    // Top eigenvalue is the trivial D; λ₂ is the next one down.
    let lambda2 = if n >= 2 { values[n - 2] } else { values[0] };
    let lambda_min = values[0];
    let r2 = if n >= 2 {
        residual(graph, &vectors[n - 2], lambda2)
    } else {
        0.0
    };
    let rmin = residual(graph, &vectors[0], lambda_min);
    ExtremeEigen {
        lambda2,
        lambda_min,
        residual_norm: r2.max(rmin),
        method: EigenMethod::Dense,
        spectrum: Some(values),
        iterations: 1,
    }
}

fn project_zero_sum(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Lanczos on the zero-sum subspace. The constant vector (eigenvalue D of a
/// regular graph) is projected out at every step, so the extreme Ritz values
/// approximate λ₂ and λ_min directly.
pub(super) fn lanczos_extremes(
    graph: &CayleyGraph,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<ExtremeEigen> {
    let n = graph.n;
    let dim = max_iter.min(n.saturating_sub(1)).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_zero_sum(&mut q);
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best_residual = f64::INFINITY;
    const CHECK_EVERY: usize = 10;

    loop {
        let k = basis.len() - 1;
        let mut w = graph.apply(&basis[k]);
        let alpha = dot(&w, &basis[k]);
        alphas.push(alpha);
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            project_zero_sum(&mut w);
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = dot(&w, &w).sqrt();
        let m = alphas.len();
        let breakdown = beta <= 1e-12 * (graph.degree as f64).max(1.0);
        let exhausted = m >= dim;

        if breakdown || exhausted || m.is_multiple_of(CHECK_EVERY) {
            let t = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    alphas[i]
                } else if i + 1 == j {
                    betas[i]
                } else if j + 1 == i {
                    betas[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (mut imax, mut imin) = (0, 0);
            for i in 0..m {
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
            }
            let estimate = |i: usize| (beta * eig.eigenvectors[(m - 1, i)]).abs();
            let cheap = if breakdown {
                0.0
            } else {
                estimate(imax).max(estimate(imin))
            };
            if cheap <= 0.5 * tol || breakdown || exhausted {
                let ritz = |i: usize| {
                    let mut v = vec![0.0; n];
                    for (j, b) in basis.iter().enumerate().take(m) {
                        let c = eig.eigenvectors[(j, i)];
                        v.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
                    }
                    v
                };
                let lambda2 = eig.eigenvalues[imax];
                let lambda_min = eig.eigenvalues[imin];
                let res = residual(graph, &ritz(imax), lambda2).max(residual(
                    graph,
                    &ritz(imin),
                    lambda_min,
                ));
                best_residual = best_residual.min(res);
                if res <= tol {
                    return Ok(ExtremeEigen {
                        lambda2,
                        lambda_min,
                        residual_norm: res,
                        method: EigenMethod::Lanczos,
                        spectrum: None,
                        iterations: m,
                    });
                }
            }
            if breakdown || exhausted {
                return Err(Error::Convergence {
                    iterations: m,
                    residual: best_residual,
                });
            }
        }

        betas.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
}
