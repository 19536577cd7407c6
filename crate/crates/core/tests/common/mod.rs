#![allow(dead_code)]

use turan_core::constructions::{build_gadget, GadgetGraph};
use turan_core::group::{CyclicGroup, FiniteGroup, Psl2Group, SymmetricGroup};
use turan_core::psl2::lps_style_generators;
use turan_core::spectral::{build_cayley, nontrivial_radius_dense, CayleyGraph};

pub struct Fixture {
    pub name: &'static str,
    pub cayley: CayleyGraph,
    pub gadget: GadgetGraph,
    /// Largest non-trivial |eigenvalue| of the Cayley graph (dense spectrum).
    pub theta: f64,
    pub link_ok: bool,
}

fn fixture<G: FiniteGroup>(name: &'static str, group: &G, gens: &[G::Element]) -> Fixture {
    let cayley = build_cayley(group, gens).unwrap();
    let gadget = build_gadget(group, gens).unwrap();
    let theta = nontrivial_radius_dense(&cayley);
    let link_ok = turan_core::constructions::verify_link_relabel(&gadget, group, gens);
    Fixture {
        name,
        cayley,
        gadget,
        theta,
        link_ok,
    }
}

/// Z₆ with every non-identity generator, Z₅ with ±1, S₃ with
/// transpositions and PSL₂(F₅) with the LPS-style set for p = 29.
pub fn small_fixtures() -> Vec<Fixture> {
    let z6 = CyclicGroup::new(6);
    let z5 = CyclicGroup::new(5);
    let s3 = SymmetricGroup::new(3);
    let psl = Psl2Group::new(5).unwrap();
    let lps = lps_style_generators(29, 5).unwrap();
    vec![
        fixture("Z6 complete", &z6, &z6.all_nonzero()),
        fixture("Z5 cycle", &z5, &[1, 4]),
        fixture("S3 transpositions", &s3, &s3.transpositions()),
        fixture("PSL2(5) LPS-style", &psl, &lps.elements),
    ]
}
