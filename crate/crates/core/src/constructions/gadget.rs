use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::group::{generator_indices, FiniteGroup};
use crate::hypergraph::{lagrangian_poly, RGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    X,
    Y,
    Z,
}

/// Three copies X, Y, Z of a group of order `n` (vertices `0..n`, `n..2n`,
/// `2n..3n`) with `{x, y, z}` an edge iff `z = x·s·y` for some generator `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetGraph {
    pub graph: RGraph,
    pub n: usize,
    pub degree: usize,
}

impl GadgetGraph {
    pub fn part(&self, v: usize) -> Part {
        match v / self.n {
            0 => Part::X,
            1 => Part::Y,
            _ => Part::Z,
        }
    }

    /// Same vertex layout, different edges. Used to probe the verifiers.
    pub fn with_graph(&self, graph: RGraph) -> Self {
        Self {
            graph,
            n: self.n,
            degree: self.degree,
        }
    }
}

pub fn build_gadget<G: FiniteGroup>(group: &G, gens: &[G::Element]) -> Result<GadgetGraph> {
    generator_indices(group, gens)?;
    let elems = group.elements();
    let n = elems.len();
    let mut edges = Vec::with_capacity(gens.len() * n * n);
    for (xi, x) in elems.iter().enumerate() {
        for s in gens {
            let xs = group.mul(x, s);
            for (yi, y) in elems.iter().enumerate() {
                let z = group.mul(&xs, y);
                let zi = group.index_of(&z);
                ensure!(zi.is_some(), Domain, "product {z:?} is not a group element");
                edges.push(vec![
                    xi as u32,
                    (n + yi) as u32,
                    (2 * n + zi.unwrap()) as u32,
                ]);
            }
        }
    }
    let graph = RGraph::new(3, 3 * n, edges)?;
    ensure!(
        graph.edge_count() == gens.len() * n * n,
        Internal,
        "gadget has {} edges, expected D·n² = {}",
        graph.edge_count(),
        gens.len() * n * n
    );
    Ok(GadgetGraph {
        graph,
        n,
        degree: gens.len(),
    })
}

/// Checks that the link of every vertex, after the fixed relabelling for its
/// class, is exactly the arc set `{(u, u·s)}` of Cay(Γ, S):
///
/// * `x* ∈ X`: `(y, z) ↦ (y⁻¹, z⁻¹·x*)`
/// * `y* ∈ Y`: `(x, z) ↦ (x, z·y*⁻¹)`
/// * `z* ∈ Z`: `(x, y) ↦ (z*⁻¹·x, y⁻¹)`
pub fn verify_link_relabel<G: FiniteGroup>(
    h: &GadgetGraph,
    group: &G,
    gens: &[G::Element],
) -> bool {
    let elems = group.elements();
    let n = h.n;
    if elems.len() != n || generator_indices(group, gens).is_err() {
        return false;
    }
    let idx = |g: &G::Element| group.index_of(g).expect("group is closed");
    let inv: Vec<usize> = elems.iter().map(|g| idx(&group.inverse(g))).collect();

    let mut cayley: Vec<(usize, usize)> = Vec::with_capacity(n * gens.len());
    for (u, g) in elems.iter().enumerate() {
        for s in gens {
            cayley.push((u, idx(&group.mul(g, s))));
        }
    }
    cayley.sort_unstable();

    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 3 * n];
    for e in h.graph.edges() {
        let (x, y, z) = (e[0] as usize, e[1] as usize, e[2] as usize);
        if x >= n || !(n..2 * n).contains(&y) || !(2 * n..3 * n).contains(&z) {
            return false;
        }
        let (y, z) = (y - n, z - 2 * n);
        let (gx, gy, gz) = (&elems[x], &elems[y], &elems[z]);
        links[x].push((inv[y], idx(&group.mul(&group.inverse(gz), gx))));
        links[n + y].push((x, idx(&group.mul(gz, &group.inverse(gy)))));
        links[2 * n + z].push((idx(&group.mul(&group.inverse(gz), gx)), inv[y]));
    }
    links.into_iter().all(|mut l| {
        l.sort_unstable();
        l == cayley
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CenteredReport {
    /// max of `P_H(y) − [2D/(3m) + θ(Σ y_v² − 1/m)]`.
    pub max_violation: f64,
    pub samples: usize,
}

/// Slack of the centered bound at one simplex vector (`m = 3n`).
pub fn centered_violation(h: &GadgetGraph, theta: f64, y: &[f64]) -> f64 {
    let m = 3.0 * h.n as f64;
    let sq: f64 = y.iter().map(|v| v * v).sum();
    let bound = 2.0 * h.degree as f64 / (3.0 * m) + theta * (sq - 1.0 / m);
    lagrangian_poly(&h.graph, y) - bound
}

/// Samples `trials` simplex vectors: half flat Dirichlet, half supported on a
/// random subset of at most six vertices, plus every vector in `extra`.
pub fn verify_centered_bound(
    h: &GadgetGraph,
    theta: f64,
    trials: usize,
    seed: u64,
    extra: &[Vec<f64>],
) -> CenteredReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = h.graph.n();
    let mut worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let mut y = vec![0.0; nv];
        if t % 2 == 0 {
            y.iter_mut()
                .for_each(|v| *v = -(1.0 - rng.gen::<f64>()).ln());
        } else {
            for _ in 0..rng.gen_range(1..=6) {
                y[rng.gen_range(0..nv)] += rng.gen::<f64>() + 1e-3;
            }
        }
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        worst = worst.max(centered_violation(h, theta, &y));
    }
    for y in extra {
        worst = worst.max(centered_violation(h, theta, y));
    }
    CenteredReport {
        max_violation: worst,
        samples: trials + extra.len(),
    }
}
