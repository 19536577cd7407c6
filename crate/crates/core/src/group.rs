//! Finite groups given by a sorted element list and a multiplication rule.
//!
//! Cayley graphs and the spectral gadget only need `mul`, `inverse` and an
//! element → index lookup, so cyclic groups, symmetric groups and
//! PSL₂(F_q) share one interface.

use std::fmt::Debug;

use crate::error::{ensure, Result};
use crate::psl2::{enumerate_group, Psl2Element};

pub trait FiniteGroup {
    type Element: Clone + Ord + Debug;

    /// All elements, sorted ascending and distinct.
    fn elements(&self) -> &[Self::Element];
    fn identity(&self) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;

    fn order(&self) -> usize {
        self.elements().len()
    }

    fn index_of(&self, a: &Self::Element) -> Option<usize> {
        self.elements().binary_search(a).ok()
    }
}

/// Checks `S ⊆ Γ`, `S = S⁻¹`, `1 ∉ S` and distinctness; returns the indices of `S`.
pub fn generator_indices<G: FiniteGroup>(group: &G, gens: &[G::Element]) -> Result<Vec<usize>> {
    let identity = group.identity();
    let mut idx = Vec::with_capacity(gens.len());
    for s in gens {
        ensure!(
            *s != identity,
            Domain,
            "generator set contains the identity"
        );
        let i = group.index_of(s);
        ensure!(
            i.is_some(),
            Domain,
            "generator {s:?} is not a group element"
        );
        idx.push(i.unwrap());
    }
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    ensure!(
        sorted.len() == idx.len(),
        Domain,
        "generator set has repeated elements"
    );
    for s in gens {
        let inv = group.inverse(s);
        ensure!(
            gens.contains(&inv),
            Domain,
            "generator set is not closed under inverses"
        );
    }
    Ok(idx)
}

/// Z_n written additively.
#[derive(Debug, Clone)]
pub struct CyclicGroup {
    n: u64,
    elems: Vec<u64>,
}

impl CyclicGroup {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        Self {
            n,
            elems: (0..n).collect(),
        }
    }

    /// Every non-identity element; the Cayley graph is the complete graph.
    pub fn all_nonzero(&self) -> Vec<u64> {
        (1..self.n).collect()
    }
}

impl FiniteGroup for CyclicGroup {
    type Element = u64;

    fn elements(&self) -> &[u64] {
        &self.elems
    }
    fn identity(&self) -> u64 {
        0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.n
    }
    fn inverse(&self, a: &u64) -> u64 {
        (self.n - a) % self.n
    }
    fn index_of(&self, a: &u64) -> Option<usize> {
        (*a < self.n).then_some(*a as usize)
    }
}

/// The symmetric group on `{0, …, k-1}`; `(ab)(i) = a(b(i))`.
#[derive(Debug, Clone)]
pub struct SymmetricGroup {
    degree: usize,
    elems: Vec<Vec<u8>>,
}

impl SymmetricGroup {
    pub fn new(degree: usize) -> Self {
        assert!(
            (1..=8).contains(&degree),
            "symmetric group degree must lie in 1..=8"
        );
        let mut elems = Vec::new();
        let mut perm: Vec<u8> = (0..degree as u8).collect();
        permutations(&mut perm, 0, &mut elems);
        elems.sort();
        Self { degree, elems }
    }

    /// All transpositions `(i j)`.
    pub fn transpositions(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for i in 0..self.degree {
            for j in i + 1..self.degree {
                let mut t: Vec<u8> = (0..self.degree as u8).collect();
                t.swap(i, j);
                out.push(t);
            }
        }
        out
    }
}

fn permutations(perm: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == perm.len() {
        out.push(perm.clone());
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, out);
        perm.swap(k, i);
    }
}

impl FiniteGroup for SymmetricGroup {
    type Element = Vec<u8>;

    fn elements(&self) -> &[Vec<u8>] {
        &self.elems
    }
    fn identity(&self) -> Vec<u8> {
        (0..self.degree as u8).collect()
    }
    fn mul(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        b.iter().map(|&i| a[i as usize]).collect()
    }
    fn inverse(&self, a: &Vec<u8>) -> Vec<u8> {
        let mut inv = vec![0u8; a.len()];
        for (i, &ai) in a.iter().enumerate() {
            inv[ai as usize] = i as u8;
        }
        inv
    }
}

/// PSL₂(F_q) with canonical representatives.
#[derive(Debug, Clone)]
pub struct Psl2Group {
    q: u64,
    elems: Vec<Psl2Element>,
}

impl Psl2Group {
    pub fn new(q: u64) -> Result<Self> {
        Ok(Self {
            q,
            elems: enumerate_group(q)?,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl FiniteGroup for Psl2Group {
    type Element = Psl2Element;

    fn elements(&self) -> &[Psl2Element] {
        &self.elems
    }
    fn identity(&self) -> Psl2Element {
        Psl2Element::identity(self.q)
    }
    fn mul(&self, a: &Psl2Element, b: &Psl2Element) -> Psl2Element {
        a.mul(b)
    }
    fn inverse(&self, a: &Psl2Element) -> Psl2Element {
        a.inverse()
    }
}
