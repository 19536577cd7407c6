//! Primality, Legendre symbols, modular square roots, primes in the
//! progression 1 mod 4p and the quaternion four-square representations
//! feeding the LPS generator set.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `q` (Fermat).
pub fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

/// Reduces a signed integer into `[0, q)`.
#[inline]
pub fn reduce(a: i64, q: u64) -> u64 {
    a.rem_euclid(q as i64) as u64
}

/// Deterministic Miller–Rabin; the first twelve prime bases are a proven
/// witness set for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn require_odd_prime(q: u64) -> Result<()> {
    ensure!(q > 2 && is_prime(q), Parameter, "{q} is not an odd prime");
    Ok(())
}

/// Legendre symbol (a/q) by Euler's criterion.
pub fn legendre(a: i64, q: u64) -> Result<i8> {
    require_odd_prime(q)?;
    let r = reduce(a, q);
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    })
}

/// Square root of `a` modulo the odd prime `q` by Tonelli–Shanks.
///
/// Returns the smaller of the two roots, i.e. the one in `(0, q/2]`.
pub fn sqrt_mod(a: i64, q: u64) -> Result<u64> {
    require_odd_prime(q)?;
    let n = reduce(a, q);
    ensure!(
        n != 0,
        Domain,
        "{a} ≡ 0 mod {q} has no non-zero square root"
    );
    ensure!(
        pow_mod(n, (q - 1) / 2, q) == 1,
        Domain,
        "{a} is a quadratic non-residue mod {q}"
    );
    let x = if q % 4 == 3 {
        pow_mod(n, (q + 1) / 4, q)
    } else {
        tonelli_shanks(n, q)
    };
    debug_assert_eq!(mul_mod(x, x, q), n);
    Ok(x.min(q - x))
}

fn tonelli_shanks(n: u64, q: u64) -> u64 {
    let twos = (q - 1).trailing_zeros();
    let odd = (q - 1) >> twos;
    let mut z = 2;
    while pow_mod(z, (q - 1) / 2, q) != q - 1 {
        z += 1;
    }
    let mut c = pow_mod(z, odd, q);
    let mut x = pow_mod(n, odd.div_ceil(2), q);
    let mut t = pow_mod(n, odd, q);
    let mut m = twos;
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, q);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), q);
        x = mul_mod(x, b, q);
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        m = i;
    }
    x
}

/// All primes `≤ bound` via a segmented sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let root = (bound as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }

    const SEGMENT: u64 = 1 << 18;
    let mut primes = Vec::new();
    let mut seg = vec![true; SEGMENT as usize];
    let mut low = 2u64;
    while low <= bound {
        let high = (low + SEGMENT - 1).min(bound);
        let len = (high - low + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start <= high {
                seg[(start - low) as usize] = false;
                start += p;
            }
        }
        primes.extend((0..len).filter(|&i| seg[i]).map(|i| low + i as u64));
        low = high + 1;
    }
    primes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimeProgression {
    pub p: u64,
    pub modulus: u64,
    pub primes: Vec<u64>,
    pub search_bound: u64,
}

/// Primes `q ≤ bound` with `q ≡ 1 (mod 4p)`. Each one has `(p/q) = 1` by
/// quadratic reciprocity; this is re-checked on every output.
pub fn primes_in_progression(p: u64, bound: u64) -> Result<PrimeProgression> {
    ensure!(
        is_prime(p) && p % 4 == 1,
        Parameter,
        "p = {p} must be a prime ≡ 1 (mod 4)"
    );
    let modulus = 4 * p;
    ensure!(
        bound > modulus,
        Parameter,
        "bound {bound} must exceed 4p = {modulus}"
    );
    let primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|q| q % modulus == 1)
        .collect();
    for &q in &primes {
        if legendre(p as i64, q)? != 1 {
            return Err(Error::Internal(format!(
                "reciprocity check failed: ({p}/{q}) != 1"
            )));
        }
    }
    Ok(PrimeProgression {
        p,
        modulus,
        primes,
        search_bound: bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioStats {
    pub max_ratio: f64,
    pub tail_max_ratio: f64,
    pub window: usize,
}

/// Maximum of `q_{j+1}/q_j` overall and over the last `window` ratios.
pub fn consecutive_ratio_stats(
    progression: &PrimeProgression,
    window: usize,
) -> Result<RatioStats> {
    let qs = &progression.primes;
    ensure!(
        qs.len() >= 2,
        Domain,
        "need at least two primes, have {}",
        qs.len()
    );
    ensure!(window >= 1, Parameter, "window must be positive");
    let ratios: Vec<f64> = qs.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let max_of = |rs: &[f64]| rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = &ratios[ratios.len().saturating_sub(window)..];
    Ok(RatioStats {
        max_ratio: max_of(&ratios),
        tail_max_ratio: max_of(tail),
        window,
    })
}

/// `p = a0² + a1² + a2² + a3²` with `a0 > 0` odd and `a1, a2, a3` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadrupleRep {
    pub a0: i64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
}

impl QuadrupleRep {
    pub fn norm(&self) -> i64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    /// The conjugate quaternion; it maps to the inverse generator.
    pub fn conjugate(&self) -> Self {
        Self {
            a0: self.a0,
            a1: -self.a1,
            a2: -self.a2,
            a3: -self.a3,
        }
    }
}

/// Exhaustive list in lexicographic order on `(a0, a1, a2, a3)`.
/// Jacobi's four-square theorem fixes the count at `p + 1`.
pub fn four_square_representations(p: u64) -> Result<Vec<QuadrupleRep>> {
    ensure!(
        is_prime(p) && p % 4 == 1,
        Parameter,
        "p = {p} must be a prime ≡ 1 (mod 4)"
    );
    let p = p as i64;
    let root = (p as f64).sqrt() as i64 + 1;
    let evens: Vec<i64> = (-root..=root).filter(|a| a % 2 == 0).collect();
    let mut reps = Vec::new();
    for a0 in (1..=root).step_by(2) {
        for &a1 in &evens {
            for &a2 in &evens {
                let partial = a0 * a0 + a1 * a1 + a2 * a2;
                if partial > p {
                    continue;
                }
                for &a3 in &evens {
                    if partial + a3 * a3 == p {
                        reps.push(QuadrupleRep { a0, a1, a2, a3 });
                    }
                }
            }
        }
    }
    if reps.len() as i64 != p + 1 {
        return Err(Error::Internal(format!(
            "found {} quadruples for p = {p}, expected {}",
            reps.len(),
            p + 1
        )));
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(is_prime(1097));
        assert!(!is_prime(1096));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        // Strong pseudoprime to many small bases.
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), is_prime_trial(n), "n = {n}");
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(10, 5).unwrap(), 0);
        assert_eq!(legendre(5, 29).unwrap(), 1);
        assert_eq!(legendre(2, 5).unwrap(), -1);
        assert!(matches!(legendre(3, 9), Err(Error::Parameter(_))));
        assert!(matches!(legendre(3, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn legendre_matches_exhaustive_squares() {
        for q in primes_up_to(1000).into_iter().filter(|&q| q > 2) {
            let mut square = vec![false; q as usize];
            for x in 1..q {
                square[mul_mod(x, x, q) as usize] = true;
            }
            for a in 0..q {
                let expected = if a == 0 {
                    0
                } else if square[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a as i64, q).unwrap(), expected, "({a}/{q})");
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_mod(-1, 5).unwrap(), 2);
        assert_eq!(sqrt_mod(4, 7).unwrap(), 2);
        assert_eq!(sqrt_mod(5, 29).unwrap(), 11);
        assert!(matches!(sqrt_mod(2, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_exhaustive_below_1000() {
        for q in primes_up_to(1000).into_iter().filter(|&q| q > 2) {
            for a in 1..q {
                if legendre(a as i64, q).unwrap() == 1 {
                    let x = sqrt_mod(a as i64, q).unwrap();
                    assert_eq!(mul_mod(x, x, q), a);
                    assert!(x > 0 && 2 * x <= q);
                }
            }
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        let sieved = primes_up_to(300_000);
        let trial: Vec<u64> = (0..=300_000).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(sieved, trial);
    }

    #[test]
    fn progression_examples() {
        assert_eq!(
            primes_in_progression(5, 200).unwrap().primes,
            vec![41, 61, 101, 181]
        );
        assert_eq!(primes_in_progression(137, 2000).unwrap().primes[0], 1097);
        assert!(primes_in_progression(5, 21).unwrap().primes.is_empty());
        assert!(matches!(
            primes_in_progression(7, 100),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            primes_in_progression(5, 20),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn ratio_examples() {
        let prog = primes_in_progression(5, 200).unwrap();
        let stats = consecutive_ratio_stats(&prog, 10).unwrap();
        assert!((stats.max_ratio - 181.0 / 101.0).abs() < 1e-15);

        let two = PrimeProgression {
            p: 5,
            modulus: 20,
            primes: vec![41, 61],
            search_bound: 61,
        };
        assert_eq!(
            consecutive_ratio_stats(&two, 1).unwrap().max_ratio,
            61.0 / 41.0
        );

        let one = PrimeProgression {
            primes: vec![41],
            ..two
        };
        assert!(matches!(
            consecutive_ratio_stats(&one, 1),
            Err(Error::Domain(_))
        ));

        let long = primes_in_progression(5, 1_000_000).unwrap();
        assert!(consecutive_ratio_stats(&long, 10).unwrap().tail_max_ratio < 1.1);
    }

    #[test]
    fn four_squares_small() {
        let reps = four_square_representations(5).unwrap();
        let as_tuples: Vec<_> = reps.iter().map(|r| (r.a0, r.a1, r.a2, r.a3)).collect();
        assert_eq!(
            as_tuples,
            vec![
                (1, -2, 0, 0),
                (1, 0, -2, 0),
                (1, 0, 0, -2),
                (1, 0, 0, 2),
                (1, 0, 2, 0),
                (1, 2, 0, 0)
            ]
        );
        let reps13 = four_square_representations(13).unwrap();
        assert_eq!(reps13.len(), 14);
        assert_eq!(reps13.iter().filter(|r| r.a0 == 1).count(), 8);
        assert_eq!(reps13.iter().filter(|r| r.a0 == 3).count(), 6);
    }

    #[test]
    fn four_square_counts_and_constraints() {
        for p in [5u64, 13, 17, 29, 37, 137] {
            let reps = four_square_representations(p).unwrap();
            assert_eq!(reps.len() as u64, p + 1);
            for r in &reps {
                assert_eq!(r.norm(), p as i64);
                assert!(r.a0 > 0 && r.a0 % 2 == 1);
                assert!(r.a1 % 2 == 0 && r.a2 % 2 == 0 && r.a3 % 2 == 0);
                assert!(reps.contains(&r.conjugate()));
            }
            assert!(reps.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
