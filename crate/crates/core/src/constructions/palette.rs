use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::hypergraph::{LagrangianConfig, RGraph, SimplexPolynomial, Term};

/// S₃ in the order identity, (12), (13), (23), (123), (132), written as the
/// position map `i ↦ σ(i)` used to reorder an edge `(v₀, v₁, v₂)`.
pub const S3_ORDER: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
    [1, 2, 0],
    [2, 0, 1],
];

/// Colours `0..colors` and admissible ordered triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    pub colors: usize,
    pub triples: Vec<[u32; 3]>,
}

impl Palette {
    pub fn new(colors: usize, mut triples: Vec<[u32; 3]>) -> Result<Self> {
        ensure!(colors >= 1, Parameter, "palette needs at least one colour");
        ensure!(
            triples.iter().flatten().all(|&c| (c as usize) < colors),
            Domain,
            "triple uses a colour outside 0..{colors}"
        );
        triples.sort_unstable();
        triples.dedup();
        Ok(Self { colors, triples })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "colors": self.colors, "triples": self.triples })
    }
}

/// For each edge, in ascending vertex order, the orderings given by the
/// first `k` permutations of [`S3_ORDER`] (or by `perms` when supplied).
pub fn palette_from_graph(g: &RGraph, k: usize, perms: Option<&[[usize; 3]]>) -> Result<Palette> {
    ensure!(g.r() == 3, Parameter, "palettes are built from 3-graphs");
    ensure!((1..=6).contains(&k), Domain, "k must lie in 1..=6, got {k}");
    let chosen: Vec<[usize; 3]> = match perms {
        Some(p) => {
            ensure!(
                p.len() == k,
                Parameter,
                "expected {k} permutations, got {}",
                p.len()
            );
            ensure!(
                p.iter().all(|s| S3_ORDER.contains(s)),
                Parameter,
                "not a permutation of 0..3"
            );
            let mut uniq = p.to_vec();
            uniq.sort_unstable();
            uniq.dedup();
            ensure!(uniq.len() == k, Parameter, "permutations must be distinct");
            p.to_vec()
        }
        None => S3_ORDER[..k].to_vec(),
    };
    let mut triples = Vec::with_capacity(g.edge_count() * k);
    for e in g.edges() {
        for s in &chosen {
            triples.push([e[s[0]], e[s[1]], e[s[2]]]);
        }
    }
    Palette::new(g.n().max(1), triples)
}

/// `max Σ_{(a,b,c)∈T} x_a x_b x_c` over probability vectors on the colours.
pub fn palette_lagrangian(p: &Palette, config: &LagrangianConfig) -> Result<f64> {
    let terms = p
        .triples
        .iter()
        .map(|t| Term {
            coef: 1.0,
            vars: t.to_vec(),
        })
        .collect();
    Ok(SimplexPolynomial::new(p.colors, terms)?
        .maximize(config)?
        .value)
}
