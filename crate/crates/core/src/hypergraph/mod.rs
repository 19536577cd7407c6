//! r-uniform hypergraphs, edge densities, blow-ups and Lagrangians.

mod engine;
mod oracle;

use std::io::{BufRead, Write};

use crate::error::{ensure, Error, Result};
use crate::Rational;

pub use engine::{LagrangianConfig, LagrangianResult, SimplexPolynomial, Term};
pub use oracle::lagrangian_oracle_grid;

/// An r-graph on vertices `0..n`. Edges are strictly increasing r-tuples,
/// deduplicated and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RGraph {
    r: usize,
    n: usize,
    edges: Vec<u32>,
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub(crate) fn factorial(k: u64) -> u128 {
    (1..=k as u128).product()
}

impl RGraph {
    pub fn new(r: usize, n: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        ensure!(r >= 2, Parameter, "uniformity must be at least 2, got {r}");
        let mut list: Vec<Vec<u32>> = Vec::new();
        for mut e in edges {
            ensure!(
                e.len() == r,
                Domain,
                "edge {e:?} does not have {r} vertices"
            );
            e.sort_unstable();
            ensure!(
                e.windows(2).all(|w| w[0] < w[1]),
                Domain,
                "edge {e:?} repeats a vertex"
            );
            ensure!(
                (e[r - 1] as usize) < n,
                Domain,
                "edge {e:?} out of range for n = {n}"
            );
            list.push(e);
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self {
            r,
            n,
            edges: list.concat(),
        })
    }

    pub fn empty(r: usize, n: usize) -> Self {
        Self {
            r,
            n,
            edges: Vec::new(),
        }
    }

    /// K_n^(r).
    pub fn complete(r: usize, n: usize) -> Self {
        let mut edges = Vec::new();
        let mut combo: Vec<u32> = (0..r as u32).collect();
        if r <= n {
            loop {
                edges.extend_from_slice(&combo);
                let mut i = r;
                while i > 0 && combo[i - 1] as usize == n - r + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                combo[i - 1] += 1;
                for j in i..r {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        Self { r, n, edges }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.r
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.r)
    }

    pub fn contains_edge(&self, e: &[u32]) -> bool {
        let mut sorted = e.to_vec();
        sorted.sort_unstable();
        let mut lo = 0;
        let mut hi = self.edge_count();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edges[mid * self.r..(mid + 1) * self.r].cmp(&sorted[..]) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn with_edge(&self, e: Vec<u32>) -> Result<Self> {
        Self::new(
            self.r,
            self.n,
            self.edges().map(<[u32]>::to_vec).chain(std::iter::once(e)),
        )
    }

    pub fn without_edge(&self, e: &[u32]) -> Self {
        let mut sorted = e.to_vec();
        sorted.sort_unstable();
        let edges = self
            .edges()
            .filter(|f| *f != &sorted[..])
            .flatten()
            .copied()
            .collect();
        Self {
            r: self.r,
            n: self.n,
            edges,
        }
    }

    /// `|G| / C(n, r)`.
    pub fn edge_density(&self) -> Result<Rational> {
        ensure!(
            self.n >= self.r,
            Domain,
            "edge density needs n >= r ({} < {})",
            self.n,
            self.r
        );
        let total = binomial(self.n as u64, self.r as u64);
        ensure!(
            total <= i128::MAX as u128,
            Capacity,
            "C({}, {}) overflows",
            self.n,
            self.r
        );
        Ok(Rational::new(self.edge_count() as i128, total as i128))
    }

    /// Replaces vertex `v` by a class of `sizes[v]` vertices. Classes are
    /// laid out consecutively in vertex order.
    pub fn blow_up(&self, sizes: &[usize]) -> Result<Self> {
        ensure!(
            sizes.len() == self.n,
            Parameter,
            "expected {} class sizes, got {}",
            self.n,
            sizes.len()
        );
        ensure!(
            sizes.iter().all(|&s| s >= 1),
            Domain,
            "blow-up class sizes must be positive"
        );
        let mut offset = Vec::with_capacity(self.n + 1);
        offset.push(0usize);
        for &s in sizes {
            offset.push(offset.last().unwrap() + s);
        }
        let mut out = Vec::new();
        for e in self.edges() {
            let mut pick = vec![0usize; self.r];
            'odometer: loop {
                out.push(
                    e.iter()
                        .zip(&pick)
                        .map(|(&v, &i)| (offset[v as usize] + i) as u32)
                        .collect::<Vec<_>>(),
                );
                let mut k = self.r;
                loop {
                    if k == 0 {
                        break 'odometer;
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < sizes[e[k] as usize] {
                        continue 'odometer;
                    }
                    pick[k] = 0;
                }
            }
        }
        Self::new(self.r, offset[self.n], out)
    }

    /// Disjoint union with vertices of `other` shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        ensure!(self.r == other.r, Parameter, "uniformities differ");
        let shift = self.n as u32;
        let edges = self
            .edges()
            .map(<[u32]>::to_vec)
            .chain(other.edges().map(|e| e.iter().map(|v| v + shift).collect()));
        Self::new(self.r, self.n + other.n, edges)
    }

    /// Writes `r n` then one edge per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.r, self.n)?;
        for e in self.edges() {
            let line: Vec<String> = e.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().map(|l| l.map_err(Error::from)).filter(|l| {
            l.as_ref().map_or(true, |s| {
                !s.trim().is_empty() && !s.trim_start().starts_with('#')
            })
        });
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `r n` header".into()))??;
        let nums = parse_ints(&header)?;
        ensure!(
            nums.len() == 2,
            Parse,
            "header must be `r n`, got `{header}`"
        );
        let (r, n) = (nums[0] as usize, nums[1] as usize);
        let mut edges = Vec::new();
        for line in lines {
            edges.push(parse_ints(&line?)?);
        }
        Self::new(r, n, edges)
    }
}

fn parse_ints(line: &str) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad integer `{t}`")))
        })
        .collect()
}

/// `r! Σ_e Π_{v∈e} y_v`, compensated summation.
pub fn lagrangian_poly(g: &RGraph, y: &[f64]) -> f64 {
    assert_eq!(y.len(), g.n(), "weight vector length must equal n");
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for e in g.edges() {
        let term: f64 = e.iter().map(|&v| y[v as usize]).product();
        let t = term - comp;
        let s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    factorial(g.r() as u64) as f64 * sum
}

/// λ(G) with the default multi-start engine.
pub fn lagrangian(g: &RGraph, config: &LagrangianConfig) -> Result<LagrangianResult> {
    SimplexPolynomial::from_graph(g).maximize(config)
}

/// `g_m(z) = 1 − 3Σz² + 2Σz³`, valid for `Σz = 1`.
pub fn gm_value(z: &[f64]) -> f64 {
    let (s2, s3) = z
        .iter()
        .fold((0.0, 0.0), |(a, b), &x| (a + x * x, b + x * x * x));
    1.0 - 3.0 * s2 + 2.0 * s3
}

/// Checks the simplex invariants (non-negative, sum 1 within 1e-12).
pub fn is_simplex_vector(y: &[f64]) -> bool {
    !y.is_empty() && y.iter().all(|&v| v >= 0.0) && (y.iter().sum::<f64>() - 1.0).abs() <= 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4_minus() -> RGraph {
        RGraph::complete(3, 4).without_edge(&[0, 1, 2])
    }

    #[test]
    fn construction_and_validation() {
        let g = RGraph::new(3, 4, vec![vec![2, 1, 0], vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.contains_edge(&[2, 0, 1]));
        assert!(!g.contains_edge(&[0, 1, 3]));
        assert!(RGraph::new(3, 4, vec![vec![0, 0, 1]]).is_err());
        assert!(RGraph::new(3, 3, vec![vec![0, 1, 3]]).is_err());
        assert!(RGraph::new(3, 3, vec![vec![0, 1]]).is_err());
        assert_eq!(RGraph::complete(3, 6).edge_count(), 20);
        assert_eq!(RGraph::complete(4, 4).edge_count(), 1);
    }

    #[test]
    fn densities() {
        assert_eq!(
            RGraph::complete(3, 3).edge_density().unwrap(),
            Rational::from_integer(1)
        );
        assert_eq!(k4_minus().edge_density().unwrap(), Rational::new(3, 4));
        assert_eq!(
            RGraph::empty(3, 10).edge_density().unwrap(),
            Rational::from_integer(0)
        );
        assert!(RGraph::empty(3, 2).edge_density().is_err());
    }

    #[test]
    fn blow_up_counts() {
        let t = RGraph::complete(3, 3);
        assert_eq!(t.blow_up(&[1, 1, 1]).unwrap(), t);
        assert_eq!(t.blow_up(&[2, 1, 1]).unwrap().edge_count(), 2);
        let k4 = RGraph::complete(3, 4).blow_up(&[2, 2, 2, 2]).unwrap();
        assert_eq!((k4.n(), k4.edge_count()), (8, 32));
        assert!(t.blow_up(&[1, 0, 1]).is_err());
        let uneven = RGraph::complete(3, 4).blow_up(&[1, 2, 3, 1]).unwrap();
        assert_eq!(uneven.edge_count(), 2 * 3 + 2 + 3 + 2 * 3);
    }

    #[test]
    fn polynomial_values() {
        let t = RGraph::complete(3, 3);
        assert!((lagrangian_poly(&t, &[1.0 / 3.0; 3]) - 2.0 / 9.0).abs() < 1e-15);
        let k4 = RGraph::complete(3, 4);
        assert!((lagrangian_poly(&k4, &[0.25; 4]) - 0.375).abs() < 1e-15);
        assert_eq!(lagrangian_poly(&k4, &[1.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn gm_examples() {
        assert!((gm_value(&[1.0 / 3.0; 3]) - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(gm_value(&[1.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn text_round_trip() {
        let g = k4_minus();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "3 4\n0 1 3\n0 2 3\n1 2 3\n"
        );
        assert_eq!(RGraph::read_text(&buf[..]).unwrap(), g);
        assert!(RGraph::read_text(&b"3\n0 1 2\n"[..]).is_err());
        assert!(RGraph::read_text(&b"3 3\n0 1 x\n"[..]).is_err());
    }

    #[test]
    fn disjoint_union_shifts() {
        let t = RGraph::complete(3, 3);
        let u = t.disjoint_union(&t).unwrap();
        assert_eq!(u.n(), 6);
        assert!(u.contains_edge(&[3, 4, 5]));
    }
}
