use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::hypergraph::{binomial, factorial, RGraph};
use crate::Rational;

/// Visits every `r`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[u32])) {
    if r > n {
        return;
    }
    let mut combo: Vec<u32> = (0..r as u32).collect();
    loop {
        f(&combo);
        let mut i = r;
        while i > 0 && combo[i - 1] as usize == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        combo[i - 1] += 1;
        for j in i..r {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// `M` disjoint copies of `G` plus every `r`-set not inside one copy.
pub fn complete_join(g: &RGraph, copies: usize) -> Result<RGraph> {
    ensure!(
        copies >= 2,
        Parameter,
        "complete join needs M >= 2, got {copies}"
    );
    let n = g.n();
    ensure!(n >= 1, Parameter, "complete join of an empty vertex set");
    let r = g.r();
    let mut edges = Vec::new();
    for_each_subset(copies * n, r, |e| {
        let first = e[0] as usize / n;
        if e.iter().any(|&v| v as usize / n != first) {
            edges.push(e.to_vec());
        }
    });
    for i in 0..copies {
        let shift = (i * n) as u32;
        edges.extend(
            g.edges()
                .map(|e| e.iter().map(|v| v + shift).collect::<Vec<_>>()),
        );
    }
    RGraph::new(r, copies * n, edges)
}

/// `C(MN, r) − M·C(N, r) + M·|G|`.
pub fn join_edge_count(n: u64, r: u64, copies: u64, edges: u64) -> u128 {
    binomial(copies * n, r) - copies as u128 * binomial(n, r) + copies as u128 * edges as u128
}

/// `1 − (1 − x)/M^{r−1}`.
pub fn join_density_limit(x: f64, copies: u32, r: u32) -> f64 {
    1.0 - (1.0 - x) / (copies as f64).powi(r as i32 - 1)
}

/// Adds `r − 3` auxiliary parts of size `⌊N/3⌋`; each edge `e` becomes
/// `e ∪ {u₁, …, u_s}` for every choice of one vertex per part.
pub fn uniformity_lift(g: &RGraph, r: usize) -> Result<RGraph> {
    ensure!(g.r() == 3, Parameter, "uniformity lift expects a 3-graph");
    ensure!(
        r >= 3,
        Parameter,
        "target uniformity must be at least 3, got {r}"
    );
    if r == 3 {
        return Ok(g.clone());
    }
    let n = g.n();
    let ell = n / 3;
    ensure!(ell >= 1, Domain, "lift needs at least 3 vertices, got {n}");
    let s = r - 3;
    let mut edges = Vec::new();
    let mut pick = vec![0usize; s];
    for e in g.edges() {
        pick.iter_mut().for_each(|p| *p = 0);
        'odometer: loop {
            let mut edge = e.to_vec();
            edge.extend(
                pick.iter()
                    .enumerate()
                    .map(|(i, &p)| (n + i * ell + p) as u32),
            );
            edges.push(edge);
            let mut k = s;
            loop {
                if k == 0 {
                    break 'odometer;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < ell {
                    continue 'odometer;
                }
                pick[k] = 0;
            }
        }
    }
    RGraph::new(r, n + s * ell, edges)
}

/// `c_r = 9·r!/(2·r^r)`.
pub fn lift_constant(r: u32) -> Result<Rational> {
    ensure!(r >= 3, Parameter, "lift constant needs r >= 3, got {r}");
    ensure!(r <= 20, Capacity, "r = {r} overflows exact arithmetic");
    Ok(Rational::new(
        9 * factorial(r as u64) as i128,
        2 * (r as i128).pow(r),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TerminalInterval {
    pub gamma: f64,
    pub m0: u64,
    pub delta: f64,
}

/// From `[a, b]` in uniformity `r`: `γ = ((1−b)/(1−a))^{1/(r−1)}`,
/// `M₀ = max(2, ⌈γ/(1−γ)⌉)`, `δ = (1−a)/M₀^{r−1}`.
pub fn terminal_interval(a: f64, b: f64, r: u32) -> Result<TerminalInterval> {
    ensure!(
        0.0 <= a && a < b && b <= 1.0,
        Domain,
        "need 0 <= a < b <= 1, got ({a}, {b})"
    );
    ensure!(r >= 3, Parameter, "need r >= 3, got {r}");
    let big_a = 1.0 - a;
    let big_b = 1.0 - b;
    let gamma = (big_b / big_a).powf(1.0 / (r as f64 - 1.0));
    let m0 = 2u64.max((gamma / (1.0 - gamma)).ceil() as u64);
    let delta = big_a / (m0 as f64).powi(r as i32 - 1);
    let power = |m: u64| (m as f64).powi(r as i32 - 1);
    for m in m0..m0 + 200 {
        let overlap = 1.0 - big_b / power(m) >= 1.0 - big_a / power(m + 1) - 1e-15;
        ensure!(
            overlap,
            Internal,
            "intervals {m} and {} do not overlap",
            m + 1
        );
    }
    Ok(TerminalInterval { gamma, m0, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_counts() {
        let t = RGraph::complete(3, 3);
        assert_eq!(complete_join(&t, 2).unwrap().edge_count(), 20);
        assert_eq!(
            complete_join(&RGraph::empty(3, 2), 2).unwrap().edge_count(),
            4
        );
        assert_eq!(
            complete_join(&RGraph::complete(3, 4), 3).unwrap(),
            RGraph::complete(3, 12)
        );
        let g = RGraph::new(3, 5, vec![vec![0, 1, 2], vec![1, 3, 4]]).unwrap();
        assert_eq!(
            complete_join(&g, 3).unwrap().edge_count() as u128,
            join_edge_count(5, 3, 3, 2)
        );
        assert!(complete_join(&t, 1).is_err());
    }

    #[test]
    fn join_limits() {
        assert!((join_density_limit(2.0 / 9.0, 2, 3) - 29.0 / 36.0).abs() < 1e-15);
        assert_eq!(join_density_limit(1.0, 5, 4), 1.0);
        assert_eq!(join_density_limit(0.0, 2, 3), 0.75);
    }

    #[test]
    fn lift_counts() {
        let t = RGraph::complete(3, 3);
        assert_eq!(uniformity_lift(&t, 3).unwrap(), t);
        let l4 = uniformity_lift(&t, 4).unwrap();
        assert_eq!((l4.n(), l4.edge_count()), (4, 1));
        let l5 = uniformity_lift(&RGraph::complete(3, 6), 5).unwrap();
        assert_eq!((l5.n(), l5.edge_count()), (10, 80));
        assert!(uniformity_lift(&RGraph::empty(3, 2), 4).is_err());
    }

    #[test]
    fn lift_constants() {
        assert_eq!(lift_constant(3).unwrap(), Rational::from_integer(1));
        assert_eq!(lift_constant(4).unwrap(), Rational::new(27, 64));
        assert_eq!(lift_constant(5).unwrap(), Rational::new(108, 625));
    }

    #[test]
    fn terminal_examples() {
        let t = terminal_interval(0.8, 0.9, 3).unwrap();
        assert!((t.gamma - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(t.m0, 3);
        assert!((t.delta - 0.2 / 9.0).abs() < 1e-15);
        let t = terminal_interval(0.5, 1.0, 4).unwrap();
        assert_eq!((t.gamma, t.m0), (0.0, 2));
        assert!((t.delta - 0.5 / 8.0).abs() < 1e-15);
        let t = terminal_interval(0.9, 0.99, 3).unwrap();
        assert!((t.gamma - 0.1f64.sqrt()).abs() < 1e-12);
        assert_eq!(t.m0, 2);
        assert!((t.delta - 0.025).abs() < 1e-15);
        assert!(terminal_interval(0.9, 0.8, 3).is_err());
    }
}
