//! Maximization of homogeneous polynomials with non-negative coefficients
//! over the probability simplex.
//!
//! Each start runs Baum–Eagon ascent `x_i ← x_i ∂_iP / (d·P)` in short
//! phases. After every phase a copy is polished by Newton's method on the
//! detected support, using the KKT system
//! `[[H, -1], [1ᵀ, 0]] [dx; dλ] = -[∇P - λ1; Σx - 1]`
//! solved by SVD so that singular faces (blow-ups, symmetric optima) are
//! handled by the minimum-norm step.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{factorial, RGraph};
use crate::error::{ensure, Error, Result};

/// `coef · Π x_v` over `vars` (repeats allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub vars: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPolynomial {
    n: usize,
    degree: usize,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LagrangianConfig {
    /// Seeded Dirichlet starts, on top of the uniform and per-term starts.
    pub starts: usize,
    pub seed: u64,
    /// Ascent iterations per start.
    pub max_iter: usize,
    pub kkt_tol: f64,
    /// Cap on per-term starts; terms are sampled evenly when there are more.
    pub max_edge_starts: usize,
}

impl Default for LagrangianConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_iter: 20_000,
            kkt_tol: 1e-10,
            max_edge_starts: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LagrangianResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Total number of starts run.
    pub starts: usize,
    /// Newton steps taken by the winning start.
    pub polish_iterations: usize,
    pub first_order_residual: f64,
    /// Index of the winning start (0 is the uniform vector).
    pub best_start: usize,
}

const PHASE: usize = 200;
const SUPPORT_FLOOR: f64 = 1e-9;
const NEWTON_STEPS: usize = 40;

struct Local {
    value: f64,
    x: Vec<f64>,
    residual: f64,
    polish_iterations: usize,
}

impl SimplexPolynomial {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        let degree = terms.first().map_or(0, |t| t.vars.len());
        for t in &terms {
            ensure!(
                t.vars.len() == degree,
                Parameter,
                "polynomial is not homogeneous"
            );
            ensure!(
                t.coef >= 0.0 && t.coef.is_finite(),
                Parameter,
                "coefficients must be non-negative"
            );
            ensure!(
                t.vars.iter().all(|&v| (v as usize) < n),
                Parameter,
                "variable index out of range"
            );
        }
        ensure!(n >= 1, Parameter, "polynomial needs at least one variable");
        Ok(Self { n, degree, terms })
    }

    /// `P_G(y) = r! Σ_e Π_{v∈e} y_v`.
    pub fn from_graph(g: &RGraph) -> Self {
        let coef = factorial(g.r() as u64) as f64;
        let terms = g
            .edges()
            .map(|e| Term {
                coef,
                vars: e.to_vec(),
            })
            .collect();
        Self {
            n: g.n().max(1),
            degree: g.r(),
            terms,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for t in &self.terms {
            let y = t.coef * t.vars.iter().map(|&v| x[v as usize]).product::<f64>() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        sum
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for t in &self.terms {
            for (a, &va) in t.vars.iter().enumerate() {
                let p: f64 = t
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .map(|(_, &v)| x[v as usize])
                    .product();
                g[va as usize] += t.coef * p;
            }
        }
        g
    }

    fn hessian(&self, x: &[f64], index: &[usize]) -> DMatrix<f64> {
        let k = index.iter().filter(|&&i| i != usize::MAX).count();
        let mut h = DMatrix::zeros(k, k);
        for t in &self.terms {
            for (a, &va) in t.vars.iter().enumerate() {
                let ia = index[va as usize];
                if ia == usize::MAX {
                    continue;
                }
                for (b, &vb) in t.vars.iter().enumerate() {
                    let ib = index[vb as usize];
                    if b == a || ib == usize::MAX {
                        continue;
                    }
                    let p: f64 = t
                        .vars
                        .iter()
                        .enumerate()
                        .filter(|&(c, _)| c != a && c != b)
                        .map(|(_, &v)| x[v as usize])
                        .product();
                    h[(ia, ib)] += t.coef * p;
                }
            }
        }
        h
    }

    /// KKT residual on the simplex: `|∂_iP − dP|` on the support and the
    /// positive part of `∂_iP − dP` off it.
    pub fn kkt_residual(&self, x: &[f64]) -> f64 {
        let g = self.gradient(x);
        let lambda = self.degree as f64 * self.value(x);
        x.iter()
            .zip(&g)
            .map(|(&xi, &gi)| {
                if xi > 0.0 {
                    (gi - lambda).abs()
                } else {
                    (gi - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    fn ascent_step(&self, x: &mut [f64]) -> f64 {
        let g = self.gradient(x);
        let total: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        if total <= 0.0 {
            return 0.0;
        }
        let mut change = 0.0f64;
        for (xi, gi) in x.iter_mut().zip(&g) {
            let next = *xi * gi / total;
            change = change.max((next - *xi).abs());
            *xi = next;
        }
        change
    }

    /// Newton on the support of `x`; returns the number of accepted steps.
    fn polish(&self, x: &mut Vec<f64>) -> usize {
        for xi in x.iter_mut() {
            if *xi < SUPPORT_FLOOR {
                *xi = 0.0;
            }
        }
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);

        let mut steps = 0;
        for _ in 0..NEWTON_STEPS {
            let support: Vec<usize> = (0..self.n).filter(|&i| x[i] > 0.0).collect();
            let k = support.len();
            let mut index = vec![usize::MAX; self.n];
            for (j, &i) in support.iter().enumerate() {
                index[i] = j;
            }
            let g = self.gradient(x);
            let lambda = self.degree as f64 * self.value(x);
            let merit = support
                .iter()
                .map(|&i| (g[i] - lambda).abs())
                .fold(0.0, f64::max);
            if merit <= 1e-15 {
                break;
            }
            let h = self.hessian(x, &index);
            let mut a = DMatrix::zeros(k + 1, k + 1);
            a.view_mut((0, 0), (k, k)).copy_from(&h);
            for j in 0..k {
                a[(j, k)] = -1.0;
                a[(k, j)] = 1.0;
            }
            let mut rhs = DVector::zeros(k + 1);
            for (j, &i) in support.iter().enumerate() {
                rhs[j] = -(g[i] - lambda);
            }
            rhs[k] = -(support.iter().map(|&i| x[i]).sum::<f64>() - 1.0);
            let svd = a.svd(true, true);
            let eps = 1e-12 * svd.singular_values.max().max(1.0);
            let Ok(delta) = svd.solve(&rhs, eps) else {
                break;
            };

            let mut tau = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let mut trial = x.clone();
                for (j, &i) in support.iter().enumerate() {
                    trial[i] += tau * delta[j];
                }
                if trial.iter().all(|&v| v >= 0.0) {
                    let tg = self.gradient(&trial);
                    let tl = self.degree as f64 * self.value(&trial);
                    let tm = support
                        .iter()
                        .map(|&i| (tg[i] - tl).abs())
                        .fold(0.0, f64::max);
                    if tm < merit {
                        accepted = Some(trial);
                        break;
                    }
                }
                tau *= 0.5;
            }
            match accepted {
                Some(t) => {
                    *x = t;
                    steps += 1;
                }
                None => break,
            }
        }
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        steps
    }

    fn run_start(&self, mut x: Vec<f64>, config: &LagrangianConfig) -> Local {
        let mut best: Option<Local> = None;
        let mut done = 0;
        while done < config.max_iter.max(1) {
            let mut change = 0.0;
            for _ in 0..PHASE.min(config.max_iter.max(1) - done) {
                change = self.ascent_step(&mut x);
                done += 1;
                if change < 1e-16 {
                    break;
                }
            }
            let mut polished = x.clone();
            let steps = self.polish(&mut polished);
            let value = self.value(&polished);
            let candidate = if value >= self.value(&x) - 1e-15 {
                Local {
                    value,
                    residual: self.kkt_residual(&polished),
                    x: polished,
                    polish_iterations: steps,
                }
            } else {
                Local {
                    value: self.value(&x),
                    residual: self.kkt_residual(&x),
                    x: x.clone(),
                    polish_iterations: 0,
                }
            };
            let converged = candidate.residual <= config.kkt_tol;
            if best.as_ref().is_none_or(|b| better_local(&candidate, b)) {
                best = Some(candidate);
            }
            if converged || change < 1e-16 {
                break;
            }
        }
        best.expect("at least one phase runs")
    }

    fn start_vectors(&self, config: &LagrangianConfig) -> Vec<Vec<f64>> {
        let n = self.n;
        let uniform = vec![1.0 / n as f64; n];
        let mut starts = vec![uniform.clone()];
        let m = self.terms.len();
        let count = m.min(config.max_edge_starts);
        for j in 0..count {
            let t = &self.terms[j * m / count];
            let mut distinct = t.vars.clone();
            distinct.sort_unstable();
            distinct.dedup();
            // A face-uniform vector is a fixed point of the ascent, so mix in
            // a little interior mass.
            let mut x: Vec<f64> = uniform.iter().map(|u| 0.1 * u).collect();
            for &v in &distinct {
                x[v as usize] += 0.9 / distinct.len() as f64;
            }
            starts.push(x);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.starts {
            let mut x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= s);
            starts.push(x);
        }
        starts
    }

    /// Multi-start maximization over the simplex.
    pub fn maximize(&self, config: &LagrangianConfig) -> Result<LagrangianResult> {
        let n = self.n;
        if self.terms.is_empty() || self.terms.iter().all(|t| t.coef == 0.0) {
            return Ok(LagrangianResult {
                value: 0.0,
                argmax: vec![1.0 / n as f64; n],
                starts: 0,
                polish_iterations: 0,
                first_order_residual: 0.0,
                best_start: 0,
            });
        }
        let starts = self.start_vectors(config);
        let results = self.run_all(starts, config);
        let total = results.len();
        let (best_start, best) = results
            .into_iter()
            .enumerate()
            .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
            .expect("uniform start always present");
        if !(best.residual <= config.kkt_tol) {
            return Err(Error::Convergence {
                iterations: config.max_iter,
                residual: best.residual,
            });
        }
        Ok(LagrangianResult {
            value: best.value,
            argmax: best.x,
            starts: total,
            polish_iterations: best.polish_iterations,
            first_order_residual: best.residual,
            best_start,
        })
    }

    #[cfg(feature = "parallel")]
    fn run_all(&self, starts: Vec<Vec<f64>>, config: &LagrangianConfig) -> Vec<Local> {
        use rayon::prelude::*;
        starts
            .into_par_iter()
            .map(|x| self.run_start(x, config))
            .collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn run_all(&self, starts: Vec<Vec<f64>>, config: &LagrangianConfig) -> Vec<Local> {
        starts
            .into_iter()
            .map(|x| self.run_start(x, config))
            .collect()
    }
}

fn better_local(a: &Local, b: &Local) -> bool {
    let a_ok = a.residual.is_finite();
    if a.value > b.value + 1e-14 {
        return a_ok;
    }
    (a.value - b.value).abs() <= 1e-14 && a.residual < b.residual
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let p = SimplexPolynomial::new(
            4,
            vec![
                Term {
                    coef: 2.0,
                    vars: vec![0, 1, 2],
                },
                Term {
                    coef: 1.5,
                    vars: vec![1, 1, 3],
                },
                Term {
                    coef: 0.5,
                    vars: vec![3, 3, 3],
                },
            ],
        )
        .unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        let g = p.gradient(&x);
        for i in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (p.value(&xp) - p.value(&xm)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-8, "coordinate {i}");
        }
        // Euler: Σ x_i ∂_i P = d P.
        let euler: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        assert!((euler - 3.0 * p.value(&x)).abs() < 1e-14);
    }

    #[test]
    fn rejects_malformed_polynomials() {
        assert!(SimplexPolynomial::new(
            3,
            vec![
                Term {
                    coef: 1.0,
                    vars: vec![0, 1]
                },
                Term {
                    coef: 1.0,
                    vars: vec![0]
                }
            ]
        )
        .is_err());
        assert!(SimplexPolynomial::new(
            3,
            vec![Term {
                coef: -1.0,
                vars: vec![0, 1]
            }]
        )
        .is_err());
        assert!(SimplexPolynomial::new(
            2,
            vec![Term {
                coef: 1.0,
                vars: vec![0, 2]
            }]
        )
        .is_err());
    }

    #[test]
    fn single_term_with_repeats() {
        // max x²y on the simplex is at (2/3, 1/3): 4/27.
        let p = SimplexPolynomial::new(
            2,
            vec![Term {
                coef: 1.0,
                vars: vec![0, 0, 1],
            }],
        )
        .unwrap();
        let r = p.maximize(&LagrangianConfig::default()).unwrap();
        assert!((r.value - 4.0 / 27.0).abs() < 1e-12);
        assert!((r.argmax[0] - 2.0 / 3.0).abs() < 1e-8);
    }
}
