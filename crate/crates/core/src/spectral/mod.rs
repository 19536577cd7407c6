//! Cayley graph assembly, connectivity and bipartiteness, extreme
//! eigenvalues, Ramanujan certification and sampled verification of the
//! expander mixing inequality.

mod eigen;

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use eigen::{jacobi_eigen, EigenMethod, ExtremeEigen};

use crate::error::{ensure, Error, Result};
use crate::group::{generator_indices, FiniteGroup};

/// Graphs up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;

/// A D-regular graph in flat adjacency form.
///
/// Vertex `i` of a graph built by [`build_cayley`] is `group.elements()[i]`,
/// so the group's element list doubles as the label map.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyGraph {
    pub n: usize,
    pub degree: usize,
    /// `neighbors[v * degree..(v + 1) * degree]`, sorted per vertex.
    neighbors: Vec<u32>,
}

impl CayleyGraph {
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v * self.degree..(v + 1) * self.degree]
    }

    /// Builds a regular graph from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            ensure!(
                (u as usize) < n && (v as usize) < n,
                Parse,
                "edge ({u}, {v}) out of range for n = {n}"
            );
            ensure!(u != v, Domain, "self-loop at {u}");
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let degree = adj.first().map_or(0, Vec::len);
        ensure!(
            adj.iter().all(|a| a.len() == degree),
            Domain,
            "graph is not regular"
        );
        let mut neighbors = Vec::with_capacity(n * degree);
        for mut a in adj {
            a.sort_unstable();
            neighbors.extend(a);
        }
        Ok(Self {
            n,
            degree,
            neighbors,
        })
    }

    /// `(Mh)(u) = Σ_{v ~ u} h(v)`.
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|u| self.neighbors(u).iter().map(|&v| h[v as usize]).sum())
            .collect()
    }

    pub fn dense_adjacency(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                m[u * self.n + v as usize] += 1.0;
            }
        }
        m
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.degree / 2
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| {
            self.neighbors(u).iter().all(|&v| {
                self.neighbors(v as usize)
                    .binary_search(&(u as u32))
                    .is_ok()
            })
        })
    }

    /// Edge list, one `u v` pair per line with `u < v`, 0-indexed.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if (u as u32) < v {
                    writeln!(out, "{u} {v}")?;
                }
            }
        }
        Ok(())
    }

    /// Reads the format written by [`write_edge_list`](Self::write_edge_list).
    /// The vertex count is one more than the largest index seen.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0usize;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<u32>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => {
                    n = n.max(u.max(v) as usize + 1);
                    edges.push((u, v));
                }
                _ => return Err(Error::Parse(format!("line {}: expected `u v`", lineno + 1))),
            }
        }
        Self::from_edges(n, &edges)
    }
}

/// Cay(Γ, S): `g ~ h` iff `h = g·s` for some `s ∈ S`.
pub fn build_cayley<G: FiniteGroup>(group: &G, gens: &[G::Element]) -> Result<CayleyGraph> {
    generator_indices(group, gens)?;
    let n = group.order();
    let degree = gens.len();
    let mut neighbors = Vec::with_capacity(n * degree);
    for g in group.elements() {
        let mut row: Vec<u32> =
            gens.iter()
                .map(|s| {
                    let h = group.mul(g, s);
                    group.index_of(&h).map(|i| i as u32).ok_or_else(|| {
                        Error::Domain(format!("product {h:?} is not a group element"))
                    })
                })
                .collect::<Result<_>>()?;
        row.sort_unstable();
        neighbors.extend(row);
    }
    Ok(CayleyGraph {
        n,
        degree,
        neighbors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectivity {
    pub connected: bool,
    pub bipartite: bool,
}

/// BFS two-colouring over every component.
pub fn connectivity_and_bipartiteness(graph: &CayleyGraph) -> Connectivity {
    let mut color = vec![u8::MAX; graph.n];
    let mut components = 0;
    let mut bipartite = true;
    let mut queue = VecDeque::new();
    for start in 0..graph.n {
        if color[start] != u8::MAX {
            continue;
        }
        components += 1;
        color[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u) {
                let v = v as usize;
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    bipartite = false;
                }
            }
        }
    }
    Connectivity {
        connected: components <= 1,
        bipartite,
    }
}

/// λ₂ and λ_min: dense Jacobi up to [`DENSE_LIMIT`] vertices, Lanczos beyond.
pub fn extreme_eigenvalues(
    graph: &CayleyGraph,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<ExtremeEigen> {
    if graph.n <= DENSE_LIMIT {
        Ok(eigen::dense_extremes(graph))
    } else {
        eigen::lanczos_extremes(graph, tol, max_iter, seed)
    }
}

/// Forces one solver regardless of size; used to cross-check the two paths.
pub fn extreme_eigenvalues_with(
    graph: &CayleyGraph,
    method: EigenMethod,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<ExtremeEigen> {
    match method {
        EigenMethod::Dense => Ok(eigen::dense_extremes(graph)),
        EigenMethod::Lanczos => eigen::lanczos_extremes(graph, tol, max_iter, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Absolute slack on the Ramanujan bound, in units of D.
    pub cert_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 3000,
            seed: 0,
            cert_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralReport {
    pub n: usize,
    #[serde(rename = "D")]
    pub degree: usize,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub ramanujan_bound: f64,
    pub is_ramanujan: bool,
    pub connected: bool,
    pub bipartite: bool,
    pub residual_norm: f64,
    pub solver: String,
    pub iterations: usize,
}

pub fn ramanujan_bound(degree: usize) -> f64 {
    2.0 * ((degree as f64) - 1.0).max(0.0).sqrt()
}

/// Certifies `max(|λ₂|, |λ_min|) ≤ 2√(D-1) + cert_tolerance·D`.
pub fn ramanujan_check(graph: &CayleyGraph, config: &SolverConfig) -> Result<SpectralReport> {
    let conn = connectivity_and_bipartiteness(graph);
    let ext = extreme_eigenvalues(graph, config.tol, config.max_iter, config.seed)?;
    let bound = ramanujan_bound(graph.degree);
    let radius = ext.lambda2.abs().max(ext.lambda_min.abs());
    let slack = config.cert_tolerance * graph.degree as f64;
    if conn.connected && ext.lambda2 >= graph.degree as f64 - 1e-9 {
        return Err(Error::Internal(format!(
            "connected graph but λ₂ = {} reaches the degree",
            ext.lambda2
        )));
    }
    Ok(SpectralReport {
        n: graph.n,
        degree: graph.degree,
        lambda2: ext.lambda2,
        lambda_min: ext.lambda_min,
        ramanujan_bound: bound,
        is_ramanujan: radius <= bound + slack,
        connected: conn.connected,
        bipartite: conn.bipartite,
        residual_norm: ext.residual_norm,
        solver: format!("{:?}", ext.method).to_lowercase(),
        iterations: ext.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MixingReport {
    /// max of `⟨f, Mg⟩ − (Dn f̄ ḡ + θ‖f°‖‖g°‖)` over the trials.
    pub max_violation: f64,
    /// max of `‖Mh‖ − θ‖h‖` over zero-sum `h`.
    pub max_l2_violation: f64,
    pub trials: usize,
}

fn center(f: &[f64]) -> (f64, Vec<f64>) {
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    (mean, f.iter().map(|x| x - mean).collect())
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mixing-inequality slack for one pair of functions.
pub fn mixing_violation(graph: &CayleyGraph, theta: f64, f: &[f64], g: &[f64]) -> f64 {
    let mg = graph.apply(g);
    let lhs: f64 = f.iter().zip(&mg).map(|(a, b)| a * b).sum();
    let (fbar, fc) = center(f);
    let (gbar, gc) = center(g);
    let mean_term = graph.degree as f64 * graph.n as f64 * fbar * gbar;
    lhs - (mean_term + theta * norm2(&fc) * norm2(&gc))
}

/// Samples `trials` pairs `f, g` uniform in `[-1, 1]` per vertex.
pub fn verify_mixing(graph: &CayleyGraph, theta: f64, trials: usize, seed: u64) -> MixingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_l2_violation = f64::NEG_INFINITY;
    for _ in 0..trials {
        let f: Vec<f64> = (0..graph.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..graph.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        max_violation = max_violation.max(mixing_violation(graph, theta, &f, &g));
        let (_, h) = center(&f);
        let l2 = norm2(&graph.apply(&h)) - theta * norm2(&h);
        max_l2_violation = max_l2_violation.max(l2);
    }
    MixingReport {
        max_violation,
        max_l2_violation,
        trials,
    }
}

/// Largest |eigenvalue| on the zero-sum subspace, from the dense spectrum.
pub fn nontrivial_radius_dense(graph: &CayleyGraph) -> f64 {
    let (values, _) = jacobi_eigen(&graph.dense_adjacency(), graph.n);
    values[..values.len() - 1]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}
