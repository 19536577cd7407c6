//! PSL₂(F_q) arithmetic and the LPS quaternion generator set.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numtheory::{
    four_square_representations, inv_mod, is_prime, legendre, mul_mod, reduce, sqrt_mod,
    QuadrupleRep,
};

/// Largest group order `enumerate_group` will materialize.
pub const MAX_ENUMERATED_ORDER: u64 = 600_000;

/// A canonical representative of `{M, -M}` for `M ∈ SL₂(F_q)`.
///
/// The first non-zero entry in scan order `(a, b, c, d)` lies in `[1, (q-1)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Psl2Element {
    pub entries: [u64; 4],
    pub q: u64,
}

impl Psl2Element {
    pub fn identity(q: u64) -> Self {
        Self {
            entries: [1, 0, 0, 1],
            q,
        }
    }

    /// Canonical form that skips the determinant check; `entries` must be reduced.
    fn canonical_unchecked(entries: [u64; 4], q: u64) -> Self {
        let lead = entries.iter().copied().find(|&x| x != 0).unwrap_or(0);
        if lead > (q - 1) / 2 {
            Self {
                entries: entries.map(|x| (q - x) % q),
                q,
            }
        } else {
            Self { entries, q }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.q, other.q);
        let q = self.q;
        let [a, b, c, d] = self.entries;
        let [e, f, g, h] = other.entries;
        let add = |x: u64, y: u64| (x + y) % q;
        Self::canonical_unchecked(
            [
                add(mul_mod(a, e, q), mul_mod(b, g, q)),
                add(mul_mod(a, f, q), mul_mod(b, h, q)),
                add(mul_mod(c, e, q), mul_mod(d, g, q)),
                add(mul_mod(c, f, q), mul_mod(d, h, q)),
            ],
            q,
        )
    }

    /// `(a b; c d)⁻¹ = (d -b; -c a)` for determinant one.
    pub fn inverse(&self) -> Self {
        let q = self.q;
        let [a, b, c, d] = self.entries;
        Self::canonical_unchecked([d, (q - b) % q, (q - c) % q, a], q)
    }

    pub fn is_identity(&self) -> bool {
        self.entries == [1, 0, 0, 1]
    }
}

pub fn psl2_order(q: u64) -> u64 {
    q * (q * q - 1) / 2
}

/// Projects a determinant-one matrix (entries taken mod `q`) to its canonical class.
pub fn canonicalize(entries: [i64; 4], q: u64) -> Result<Psl2Element> {
    ensure!(q > 2 && is_prime(q), Parameter, "{q} is not an odd prime");
    let [a, b, c, d] = entries.map(|x| reduce(x, q));
    let det = (mul_mod(a, d, q) + q - mul_mod(b, c, q)) % q;
    ensure!(det == 1, Domain, "determinant is {det} mod {q}, expected 1");
    Ok(Psl2Element::canonical_unchecked([a, b, c, d], q))
}

/// Every element of PSL₂(F_q) in ascending order.
pub fn enumerate_group(q: u64) -> Result<Vec<Psl2Element>> {
    ensure!(q > 2 && is_prime(q), Parameter, "{q} is not an odd prime");
    let order = psl2_order(q);
    if order > MAX_ENUMERATED_ORDER {
        return Err(Error::Capacity(format!(
            "|PSL2(F_{q})| = {order} exceeds the enumeration limit {MAX_ENUMERATED_ORDER}"
        )));
    }
    let half = (q - 1) / 2;
    let mut out = Vec::with_capacity(order as usize);
    // Canonical means the leading non-zero entry is at most (q-1)/2.
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                if a != 0 {
                    if a > half {
                        continue;
                    }
                    let d = mul_mod((1 + mul_mod(b, c, q)) % q, inv_mod(a, q), q);
                    out.push(Psl2Element {
                        entries: [a, b, c, d],
                        q,
                    });
                } else {
                    // a = 0 forces b·c ≡ -1, so b ≠ 0 leads.
                    if b == 0 || b > half || mul_mod(b, c, q) != q - 1 {
                        continue;
                    }
                    for d in 0..q {
                        out.push(Psl2Element {
                            entries: [0, b, c, d],
                            q,
                        });
                    }
                }
            }
        }
    }
    out.sort_unstable();
    if out.len() as u64 != order {
        return Err(Error::Internal(format!(
            "enumerated {} elements, expected {order}",
            out.len()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub p: u64,
    pub q: u64,
    pub iota: u64,
    pub elements: Vec<Psl2Element>,
    /// Quaternion behind each element, same order.
    pub quadruples: Vec<QuadrupleRep>,
}

impl GeneratorSet {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "q": self.q,
            "iota": self.iota,
            "generators": self.elements.iter().map(|e| e.entries).collect::<Vec<_>>(),
        })
    }
}

fn quaternion_image(rep: &QuadrupleRep, iota: u64, scale: u64, q: u64) -> Psl2Element {
    let i = iota as i64;
    let qi = q as i64;
    let m = |x: i64| reduce(x % qi, q);
    let raw = [
        m(rep.a0 + i * rep.a1 % qi),
        m(rep.a2 + i * rep.a3 % qi),
        m(-rep.a2 + i * rep.a3 % qi),
        m(rep.a0 - i * rep.a1 % qi),
    ];
    Psl2Element::canonical_unchecked(raw.map(|x| mul_mod(x, scale, q)), q)
}

fn quaternion_classes(p: u64, q: u64) -> Result<(u64, Vec<(QuadrupleRep, Psl2Element)>)> {
    for (name, v) in [("p", p), ("q", q)] {
        ensure!(
            is_prime(v) && v % 4 == 1,
            Parameter,
            "{name} = {v} must be a prime ≡ 1 (mod 4)"
        );
    }
    ensure!(p != q, Parameter, "p and q must differ");
    ensure!(
        legendre(p as i64, q)? == 1,
        Domain,
        "({p}/{q}) = -1: bipartite PGL2 case out of scope"
    );
    let iota = sqrt_mod(-1, q)?;
    let scale = inv_mod(sqrt_mod(p as i64, q)?, q);
    let reps = four_square_representations(p)?;
    let images = reps
        .into_iter()
        .map(|rep| {
            let el = quaternion_image(&rep, iota, scale, q);
            (rep, el)
        })
        .collect();
    Ok((iota, images))
}

/// The LPS generator set: one projective class per quadruple of `p`, scaled
/// by the inverse of the smaller square root of `p` mod `q`.
///
/// Collisions between classes are a hard error.
pub fn lps_generators(p: u64, q: u64) -> Result<GeneratorSet> {
    let (iota, images) = quaternion_classes(p, q)?;
    let mut sorted: Vec<Psl2Element> = images.iter().map(|(_, e)| *e).collect();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != images.len() {
        return Err(Error::Internal(format!(
            "only {} distinct classes from {} quadruples for (p, q) = ({p}, {q})",
            sorted.len(),
            images.len()
        )));
    }
    let set = GeneratorSet {
        p,
        q,
        iota,
        elements: images.iter().map(|(_, e)| *e).collect(),
        quadruples: images.iter().map(|(r, _)| *r).collect(),
    };
    check_generator_set(&set)?;
    Ok(set)
}

/// Quaternion generators for a small field where distinct quadruples may
/// collide: classes are deduplicated and the identity dropped. Used for
/// desk-scale graphs on PSL₂(F_5) and similar.
pub fn lps_style_generators(p: u64, q: u64) -> Result<GeneratorSet> {
    let (iota, images) = quaternion_classes(p, q)?;
    let mut elements = Vec::new();
    let mut quadruples = Vec::new();
    for (rep, el) in images {
        if !el.is_identity() && !elements.contains(&el) {
            elements.push(el);
            quadruples.push(rep);
        }
    }
    let set = GeneratorSet {
        p,
        q,
        iota,
        elements,
        quadruples,
    };
    check_generator_set(&set)?;
    Ok(set)
}

fn check_generator_set(set: &GeneratorSet) -> Result<()> {
    for el in &set.elements {
        if el.is_identity() {
            return Err(Error::Internal("identity in generator set".into()));
        }
        if !set.elements.contains(&el.inverse()) {
            return Err(Error::Internal(format!(
                "{el:?} has no inverse in the generator set"
            )));
        }
    }
    Ok(())
}
