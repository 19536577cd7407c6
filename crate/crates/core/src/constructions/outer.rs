use serde::{Deserialize, Serialize};

use super::gadget::GadgetGraph;
use crate::error::{ensure, Result};
use crate::hypergraph::{binomial, lagrangian_poly, RGraph};
use crate::Rational;

/// `k` parts of size `m` (part `i` is `i·m..(i+1)·m`), an inner 3-graph in
/// each part, and every triple meeting at least two parts.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterGraph {
    pub graph: RGraph,
    pub k: usize,
    pub m: usize,
}

impl OuterGraph {
    pub fn part_of(&self, v: usize) -> usize {
        v / self.m
    }
}

pub fn build_outer(k: usize, h: &GadgetGraph) -> Result<OuterGraph> {
    build_outer_from(k, &h.graph)
}

pub fn build_outer_from(k: usize, inner: &RGraph) -> Result<OuterGraph> {
    ensure!(
        k >= 2,
        Parameter,
        "outer construction needs k >= 2, got {k}"
    );
    ensure!(inner.r() == 3, Parameter, "inner graph must be 3-uniform");
    let m = inner.n();
    ensure!(m >= 3, Parameter, "part size must be at least 3, got {m}");
    let total = k * m;
    let mut edges = Vec::new();
    for a in 0..total {
        for b in a + 1..total {
            for c in b + 1..total {
                if !(a / m == b / m && b / m == c / m) {
                    edges.push(vec![a as u32, b as u32, c as u32]);
                }
            }
        }
    }
    for i in 0..k {
        let shift = (i * m) as u32;
        edges.extend(
            inner
                .edges()
                .map(|e| e.iter().map(|v| v + shift).collect::<Vec<_>>()),
        );
    }
    let graph = RGraph::new(3, total, edges)?;
    Ok(OuterGraph { graph, k, m })
}

/// `k·|H| + C(km, 3) − k·C(m, 3)`.
pub fn outer_edge_count(k: u64, inner_edges: u64, m: u64) -> u128 {
    k as u128 * inner_edges as u128 + binomial(k * m, 3) - k as u128 * binomial(m, 3)
}

/// `P_Q(uniform) = 6|Q| / (km)³` for a gadget with `|H| = D n²`, `m = 3n`.
pub fn outer_uniform_exact(k: u64, degree: u64, n: u64) -> Rational {
    let m = 3 * n;
    let edges = outer_edge_count(k, degree * n * n, m) as i128;
    Rational::new(6 * edges, ((k * m) as i128).pow(3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OuterBound {
    pub alpha: String,
    pub c0: String,
    pub value: String,
    pub value_f64: f64,
    /// The asymptotics need `c₀ > 0`; other values are reported, not rejected.
    pub c0_positive: bool,
}

fn rational_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `α + c₀/m` with `α = 1 − 1/k²` and `c₀ = (2D/3 − 3(k−1))/k²`.
pub fn outer_uniform_lower_bound(k: u64, degree: u64, m: u64) -> (Rational, Rational, Rational) {
    let k2 = Rational::from_integer((k * k) as i128);
    let alpha = Rational::from_integer(1) - Rational::from_integer(1) / k2;
    let c0 =
        (Rational::new(2 * degree as i128, 3) - Rational::from_integer(3 * (k as i128 - 1))) / k2;
    (alpha, c0, alpha + c0 / Rational::from_integer(m as i128))
}

impl OuterBound {
    pub fn new(k: u64, degree: u64, m: u64) -> Self {
        let (alpha, c0, value) = outer_uniform_lower_bound(k, degree, m);
        Self {
            alpha: rational_string(alpha),
            c0: rational_string(c0),
            value: rational_string(value),
            value_f64: *value.numer() as f64 / *value.denom() as f64,
            c0_positive: c0 > Rational::from_integer(0),
        }
    }
}

/// Checks `P_Q(uniform) = α + c₀/m` for all `m` at fixed `(k, D)`. Both
/// sides times `m³` are polynomials of degree at most 3 in `m`, so agreement
/// at five values of `m` proves the identity.
pub fn symbolic_outer_identity(k: u64, degree: u64) -> bool {
    [1u64, 2, 3, 4, 5].iter().all(|&n| {
        outer_uniform_exact(k, degree, n) == outer_uniform_lower_bound(k, degree, 3 * n).2
    })
}

/// Evaluates the part decomposition
/// `1 − Σw³ − 3Σ(1−w_i)w_i²r_i + Σw_i³ P_H(y_i)` at `z`.
pub fn outer_decomposition(q: &OuterGraph, inner: &RGraph, z: &[f64]) -> f64 {
    let m = q.m;
    let mut total = 1.0;
    for i in 0..q.k {
        let part = &z[i * m..(i + 1) * m];
        let w: f64 = part.iter().sum();
        if w <= 0.0 {
            continue;
        }
        let y: Vec<f64> = part.iter().map(|v| v / w).collect();
        let r: f64 = y.iter().map(|v| v * v).sum();
        total += -w.powi(3) - 3.0 * (1.0 - w) * w * w * r + w.powi(3) * lagrangian_poly(inner, &y);
    }
    total
}

/// Slack of the part-wise upper bound obtained from the centered gadget
/// bound: `P_Q(z) − [1 − Σw³ + (2D/(3m) − θ/m)Σw³ + Σw²r((θ+3)w − 3)]`.
pub fn outer_upper_violation(q: &OuterGraph, degree: usize, theta: f64, z: &[f64]) -> f64 {
    let m = q.m as f64;
    let mut bound = 1.0;
    for i in 0..q.k {
        let part = &z[i * q.m..(i + 1) * q.m];
        let w: f64 = part.iter().sum();
        let r = if w > 0.0 {
            part.iter().map(|v| (v / w).powi(2)).sum()
        } else {
            1.0 / m
        };
        let w3 = w.powi(3);
        bound += -w3
            + (2.0 * degree as f64 / (3.0 * m) - theta / m) * w3
            + w * w * r * ((theta + 3.0) * w - 3.0);
    }
    lagrangian_poly(&q.graph, z) - bound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParameterCheck {
    pub p: u64,
    pub k: u64,
    pub m: u64,
    pub degree: u64,
    pub theta: f64,
    /// `3/(θ+3) − (9/7)^{1/3} k^{−2/3}`.
    pub spectral_slack: f64,
    /// `2D/9 + 1 − k`.
    pub degree_slack: f64,
    pub k_choice_ok: bool,
    /// `(m−2)(m−3)/(m−1)² − α`.
    pub m_slack: f64,
    pub m_choice_ok: bool,
    pub c0_positive: bool,
}

pub fn check_parameter_constraints(p: u64, k: u64, m: u64) -> Result<ParameterCheck> {
    ensure!(
        crate::numtheory::is_prime(p) && p % 4 == 1,
        Parameter,
        "p = {p} must be a prime congruent to 1 mod 4"
    );
    ensure!(k >= 1 && m >= 4, Parameter, "need k >= 1 and m >= 4");
    let degree = p + 1;
    let theta = 2.0 * ((degree - 1) as f64).sqrt();
    let spectral_slack = 3.0 / (theta + 3.0) - (9.0f64 / 7.0).cbrt() * (k as f64).powf(-2.0 / 3.0);
    // k < 2D/9 + 1  ⇔  9(k − 1) < 2D, exactly.
    let degree_ok = 9 * (k as i128 - 1) < 2 * degree as i128;
    let degree_slack = 2.0 * degree as f64 / 9.0 + 1.0 - k as f64;
    let alpha = Rational::from_integer(1) - Rational::new(1, (k * k) as i128);
    let mi = m as i128;
    let lhs = Rational::new((mi - 2) * (mi - 3), (mi - 1) * (mi - 1));
    let m_gap = lhs - alpha;
    let (_, c0, _) = outer_uniform_lower_bound(k, degree, m);
    Ok(ParameterCheck {
        p,
        k,
        m,
        degree,
        theta,
        spectral_slack,
        degree_slack,
        k_choice_ok: spectral_slack > 0.0 && degree_ok,
        m_slack: *m_gap.numer() as f64 / *m_gap.denom() as f64,
        m_choice_ok: m_gap > Rational::from_integer(0),
        c0_positive: c0 > Rational::from_integer(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_gadget;
    use crate::group::CyclicGroup;

    #[test]
    fn outer_edge_counts() {
        let z6 = CyclicGroup::new(6);
        let h = build_gadget(&z6, &z6.all_nonzero()).unwrap();
        let q = build_outer(2, &h).unwrap();
        assert_eq!(q.graph.edge_count(), 5868);
        assert_eq!(outer_edge_count(2, 180, 18), 5868);
        let h5 = build_gadget(&CyclicGroup::new(5), &[1, 4]).unwrap();
        let q3 = build_outer(3, &h5).unwrap();
        assert_eq!(q3.graph.edge_count() as u128, outer_edge_count(3, 50, 15));
        assert_eq!(q3.part_of(16), 1);
        assert!(build_outer_from(2, &RGraph::empty(3, 1)).is_err());
        assert!(build_outer_from(1, &h.graph).is_err());
    }

    #[test]
    fn lower_bound_constants() {
        let (alpha, c0, _) = outer_uniform_lower_bound(30, 138, 2701);
        assert_eq!(alpha, Rational::new(899, 900));
        assert_eq!(c0, Rational::new(1, 180));
        let (alpha, c0, _) = outer_uniform_lower_bound(2, 9, 27);
        assert_eq!((alpha, c0), (Rational::new(3, 4), Rational::new(3, 4)));
        assert!(!OuterBound::new(2, 3, 9).c0_positive);
        assert!(OuterBound::new(30, 138, 2701).c0_positive);
    }

    #[test]
    fn parameter_examples() {
        let ok = check_parameter_constraints(137, 30, 2701).unwrap();
        assert!(ok.k_choice_ok && ok.m_choice_ok && ok.c0_positive);
        assert!((ok.spectral_slack - (0.11360 - 0.11262)).abs() < 2e-5);
        let bad = check_parameter_constraints(137, 32, 2701).unwrap();
        assert!(!bad.k_choice_ok);
        assert!(check_parameter_constraints(5, 1, 10).unwrap().m_choice_ok);
        assert!(check_parameter_constraints(7, 2, 10).is_err());
    }
}
