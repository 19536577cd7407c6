//! One-level recursion map ψ_b(t), the constant-side value μ(a), tail
//! brackets for ν_j and the greedy target search.
//!
//! Every evaluation works in the reduced triangle `z₁, z₂ ≥ 0`,
//! `z₁ + z₂ ≤ 1`, with the remaining mass spread evenly over the other
//! `m − 2` coordinates. For a fixed `z₁` the best `z₂` is found exactly
//! (the derivative in `z₂` is a quadratic), so only `z₁` is searched.

mod greedy;
mod tails;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::hypergraph::gm_value;

pub use greedy::{GreedyPlan, GreedyStep, GreedyTrace, ROUNDING_SLACK};
pub use tails::{
    constant_tail, eta_ladder, ladder_csv, lambda_finite, one_step_gap, scan_overlap,
    synthetic_beta, tail_table, tail_value, verify_overlap, BetaSequence, BetaSource, OneStepGap,
    OverlapScan, TailBracket, TailTable,
};

/// Relative window inside which two μ candidates count as tied.
const MU_TIE_REL: f64 = 1e-10;
/// z₁ is kept away from 1 where the μ quotient is 0/0.
const MU_Z1_CAP: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiEvaluator {
    m: usize,
    grid_resolution: usize,
    polish_tol: f64,
}

/// A maximizer of ψ_b(t) in reduced coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PsiPoint {
    pub value: f64,
    pub z1: f64,
    pub z2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MuReport {
    pub m: usize,
    pub a: f64,
    pub mu: f64,
    pub z_star: (f64, f64),
    pub q: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MuInequalityReport {
    pub max_violation: f64,
    pub samples: usize,
}

impl PsiEvaluator {
    pub fn new(m: usize) -> Result<Self> {
        Self::with_resolution(m, 400, 1e-13)
    }

    pub fn with_resolution(m: usize, grid_resolution: usize, polish_tol: f64) -> Result<Self> {
        ensure!(m >= 4, Parameter, "m must be at least 4, got {m}");
        ensure!(
            grid_resolution >= 8,
            Parameter,
            "grid resolution must be at least 8, got {grid_resolution}"
        );
        ensure!(
            polish_tol > 0.0 && polish_tol < 1e-3,
            Parameter,
            "polish tolerance {polish_tol} out of range"
        );
        Ok(Self {
            m,
            grid_resolution,
            polish_tol,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    pub fn polish_tol(&self) -> f64 {
        self.polish_tol
    }

    /// `g_m(z) + t z₁³ + b z₂³` at the reduced point `(z₁, z₂)`.
    pub fn objective(&self, b: f64, t: f64, z1: f64, z2: f64) -> f64 {
        let s = (self.m - 2) as f64;
        let r = (1.0 - z1 - z2).max(0.0);
        let s2 = z1 * z1 + z2 * z2 + r * r / s;
        let s3 = z1 * z1 * z1 + z2 * z2 * z2 + r * r * r / (s * s);
        1.0 - 3.0 * s2 + 2.0 * s3 + t * z1 * z1 * z1 + b * z2 * z2 * z2
    }

    /// The full simplex vector behind a reduced point.
    pub fn expand(&self, z1: f64, z2: f64) -> Vec<f64> {
        let rest = (1.0 - z1 - z2).max(0.0) / (self.m - 2) as f64;
        let mut z = vec![rest; self.m];
        z[0] = z1;
        z[1] = z2;
        z
    }

    /// Best `z₂ ∈ [0, 1 − z₁]` for fixed `z₁`; ties go to the larger `z₂`.
    fn inner(&self, b: f64, t: f64, z1: f64) -> (f64, f64) {
        let s = (self.m - 2) as f64;
        let c = (1.0 - z1).max(0.0);
        let qa = 6.0 - 6.0 / (s * s) + 3.0 * b;
        let qb = -6.0 - 6.0 / s + 12.0 * c / (s * s);
        let qc = 6.0 * c / s - 6.0 * c * c / (s * s);
        let mut cands = [0.0, c, f64::NAN, f64::NAN];
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            cands[2] = (-qb + sq) / (2.0 * qa);
            cands[3] = (-qb - sq) / (2.0 * qa);
        }
        let mut best = (self.objective(b, t, z1, 0.0), 0.0);
        for &z2 in &cands[1..] {
            if !(z2 > 0.0 && z2 <= c) {
                continue;
            }
            let v = self.objective(b, t, z1, z2);
            if v > best.0 || (v == best.0 && z2 > best.1) {
                best = (v, z2);
            }
        }
        best
    }

    /// Golden-section search for a local maximum of `f` on `[lo, hi]`.
    fn golden(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > self.polish_tol {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d);
            }
        }
        0.5 * (a + b)
    }

    /// Grid scan over `z₁ = i/N` for `i ∈ 0..count`, then golden refinement
    /// around each grid local maximum. Returns every candidate `(value, z₁)`.
    fn scan(&self, f: impl Fn(f64) -> f64, count: usize, cap: f64) -> Vec<(f64, f64)> {
        let n = self.grid_resolution as f64;
        let vals: Vec<f64> = (0..count).map(|i| f((i as f64 / n).min(cap))).collect();
        let mut out: Vec<(f64, f64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i as f64 / n).min(cap)))
            .collect();
        for i in 0..count {
            let left = vals[i.saturating_sub(1)];
            let right = vals[(i + 1).min(count - 1)];
            if vals[i] >= left && vals[i] >= right {
                let lo = (i as f64 - 1.0).max(0.0) / n;
                let hi = ((i as f64 + 1.0) / n).min(cap);
                let x = self.golden(&f, lo, hi);
                out.push((f(x), x));
            }
        }
        out
    }

    pub fn psi_point(&self, b: f64, t: f64) -> Result<PsiPoint> {
        ensure!((0.0..=1.0).contains(&b), Domain, "b = {b} outside [0, 1]");
        ensure!((0.0..=1.0).contains(&t), Domain, "t = {t} outside [0, 1]");
        let cands = self.scan(|z1| self.inner(b, t, z1).0, self.grid_resolution + 1, 1.0);
        let (value, z1) =
            cands.into_iter().fold(
                (f64::NEG_INFINITY, 0.0),
                |acc, c| if c.0 > acc.0 { c } else { acc },
            );
        let z2 = self.inner(b, t, z1).1;
        Ok(PsiPoint { value, z1, z2 })
    }

    /// ψ_b(t) = max over the simplex of `g_m(z) + t z₁³ + b z₂³`.
    pub fn psi(&self, b: f64, t: f64) -> Result<f64> {
        Ok(self.psi_point(b, t)?.value)
    }

    /// μ(a) = max of `(g_m(z) + a z₂³)/(1 − z₁³)` with `z₁ < 1`.
    ///
    /// Among maximizers within a relative `1e-10` the one with the largest
    /// `z₂` is reported, and `q = z₁³`, `R = z₂³` are taken from it.
    pub fn mu_of(&self, a: f64) -> Result<MuReport> {
        ensure!((0.0..=1.0).contains(&a), Domain, "a = {a} outside [0, 1]");
        let quotient = |z1: f64| self.inner(a, 0.0, z1).0 / (1.0 - z1 * z1 * z1);
        let cands = self.scan(quotient, self.grid_resolution, MU_Z1_CAP);
        let mu = cands.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
        let floor = mu - MU_TIE_REL * mu.abs();
        let (z1, z2) = cands
            .iter()
            .filter(|c| c.0 >= floor)
            .map(|&(_, z1)| (z1, self.inner(a, 0.0, z1).1))
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| {
                if p.1 > acc.1 {
                    p
                } else {
                    acc
                }
            });
        let (q, r) = (z1 * z1 * z1, z2 * z2 * z2);
        if mu > a + 1e-12 {
            ensure!(
                q > 0.0 && q < 1.0 && r > 0.0,
                Internal,
                "degenerate maximizer q = {q}, R = {r} for a = {a}"
            );
        }
        Ok(MuReport {
            m: self.m,
            a,
            mu,
            z_star: (z1, z2),
            q,
            r,
        })
    }

    /// Largest value of `g_m(z) + μ z₁³ + α z₂³ − μ` over sampled points:
    /// the reduced triangle, and for `m ≤ 64` also the full simplex.
    pub fn verify_mu_inequality(
        &self,
        alpha: f64,
        mu: f64,
        samples: usize,
        seed: u64,
    ) -> MuInequalityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full = self.m <= 64;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..samples {
            let v = if full && i % 2 == 1 {
                let mut z: Vec<f64> = (0..self.m)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let s: f64 = z.iter().sum();
                z.iter_mut().for_each(|x| *x /= s);
                gm_value(&z) + mu * z[0].powi(3) + alpha * z[1].powi(3)
            } else {
                let (u, w) = (rng.gen::<f64>(), rng.gen::<f64>());
                let (z1, z2) = if u + w > 1.0 {
                    (1.0 - u, 1.0 - w)
                } else {
                    (u, w)
                };
                self.objective(alpha, mu, z1, z2)
            };
            worst = worst.max(v - mu);
        }
        MuInequalityReport {
            max_violation: worst,
            samples,
        }
    }
}
