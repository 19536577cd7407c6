use serde::{Deserialize, Serialize};

use super::{PsiEvaluator, ROUNDING_SLACK};
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSource {
    Synthetic,
    GadgetDerived,
    /// `ε_i = 0` throughout; used to probe the constant-tail value.
    Constant,
}

/// Side densities `β_i = α + ε_i`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSequence {
    pub alpha: f64,
    pub eps: Vec<f64>,
    pub source: BetaSource,
}

impl BetaSequence {
    /// `ε` must be positive and strictly decreasing, with `α + ε₁ ≤ 1`.
    pub fn new(alpha: f64, eps: Vec<f64>, source: BetaSource) -> Result<Self> {
        ensure!(
            (0.0..1.0).contains(&alpha),
            Domain,
            "alpha = {alpha} outside [0, 1)"
        );
        ensure!(!eps.is_empty(), Parameter, "empty ε sequence");
        ensure!(
            eps.iter().all(|&e| e > 0.0 && e.is_finite()),
            Domain,
            "ε values must be positive"
        );
        ensure!(
            eps.windows(2).all(|w| w[0] > w[1]),
            Domain,
            "ε must be strictly decreasing"
        );
        ensure!(
            alpha + eps[0] <= 1.0,
            Domain,
            "β₁ = {} exceeds 1",
            alpha + eps[0]
        );
        Ok(Self { alpha, eps, source })
    }

    pub fn constant(alpha: f64, count: usize) -> Result<Self> {
        ensure!(
            (0.0..=1.0).contains(&alpha),
            Domain,
            "alpha = {alpha} outside [0, 1]"
        );
        ensure!(count >= 1, Parameter, "empty sequence");
        Ok(Self {
            alpha,
            eps: vec![0.0; count],
            source: BetaSource::Constant,
        })
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// `β_j` for `1 ≤ j ≤ len`.
    pub fn beta(&self, j: usize) -> f64 {
        self.alpha + self.eps[j - 1]
    }

    /// Drops the first `offset` terms; the old `β_{offset+1}` becomes `β₁`.
    pub fn relabel(&self, offset: usize) -> Result<Self> {
        ensure!(
            offset < self.len(),
            Parameter,
            "cannot drop {offset} of {} terms",
            self.len()
        );
        Ok(Self {
            alpha: self.alpha,
            eps: self.eps[offset..].to_vec(),
            source: self.source,
        })
    }
}

/// `ε_i = c/(m₀ + i)` for `i = 1..=count`.
pub fn synthetic_beta(alpha: f64, c: f64, m0: u64, count: usize) -> Result<BetaSequence> {
    ensure!(c > 0.0, Parameter, "c must be positive, got {c}");
    ensure!(m0 >= 1, Parameter, "m0 must be at least 1");
    let eps = (1..=count as u64).map(|i| c / (m0 + i) as f64).collect();
    BetaSequence::new(alpha, eps, BetaSource::Synthetic)
}

/// Bracket `lower ≤ ν_j ≤ upper` from a truncated composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TailBracket {
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    /// The requested depth ran past the end of the sequence.
    pub truncated: bool,
}

impl TailBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Upper seed for the tail starting at index `j`: ν_j ≤ μ(β_j) because
/// every later β is at most β_j.
fn upper_seed(betas: &BetaSequence, j: usize, ev: &PsiEvaluator) -> Result<f64> {
    Ok(ev.mu_of(betas.beta(j.min(betas.len())))?.mu)
}

/// Applies `ψ_{β_from} ∘ … ∘ ψ_{β_to}` to `seed` (innermost is `to`).
fn compose_range(
    betas: &BetaSequence,
    from: usize,
    to: usize,
    ev: &PsiEvaluator,
    seed: f64,
) -> Result<f64> {
    (from..=to)
        .rev()
        .try_fold(seed, |t, i| ev.psi(betas.beta(i), t))
}

/// `ψ_{β_j} ∘ … ∘ ψ_{β_{j+depth}}` seeded at 0 (lower) and at μ(β_{j+depth+1})
/// (upper).
pub fn tail_value(
    betas: &BetaSequence,
    j: usize,
    depth: usize,
    ev: &PsiEvaluator,
) -> Result<TailBracket> {
    ensure!(
        j >= 1 && j <= betas.len(),
        Parameter,
        "index {j} outside 1..={}",
        betas.len()
    );
    let wanted = j + depth;
    let last = wanted.min(betas.len());
    let seed = upper_seed(betas, last + 1, ev)?;
    let lower = compose_range(betas, j, last, ev, 0.0)?;
    let upper = compose_range(betas, j, last, ev, seed)?;
    ensure!(
        lower <= upper + ROUNDING_SLACK,
        Internal,
        "tail bracket inverted at j = {j}: {lower} > {upper}"
    );
    Ok(TailBracket {
        j,
        lower,
        upper: upper.max(lower),
        depth: last - j,
        truncated: last < wanted,
    })
}

/// Brackets for every `ν_j` sharing one truncation point, the end of the
/// sequence; `lower[j] = ψ_{β_j}(lower[j+1])` holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailTable {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TailTable {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn bracket(&self, j: usize) -> TailBracket {
        TailBracket {
            j,
            lower: self.lower[j - 1],
            upper: self.upper[j - 1],
            depth: self.len() - j,
            truncated: false,
        }
    }

    /// `j,nu_lower,nu_upper` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,nu_lower,nu_upper\n");
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            out.push_str(&format!("{},{:.17e},{:.17e}\n", i + 1, lo, hi));
        }
        out
    }
}

pub fn tail_table(betas: &BetaSequence, ev: &PsiEvaluator) -> Result<TailTable> {
    let n = betas.len();
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let (mut lo, mut hi) = (0.0, upper_seed(betas, n, ev)?);
    for j in (1..=n).rev() {
        lo = ev.psi(betas.beta(j), lo)?;
        hi = ev.psi(betas.beta(j), hi)?;
        // Both ends saturate to the same float deep in the tail, where an
        // ulp of evaluation noise can land either way.
        ensure!(
            lo <= hi + ROUNDING_SLACK,
            Internal,
            "tail bracket inverted at j = {j}: {lo} > {hi}"
        );
        hi = hi.max(lo);
        lower[j - 1] = lo;
        upper[j - 1] = hi;
    }
    Ok(TailTable { lower, upper })
}

fn check_index_set(c: &[usize], betas: &BetaSequence) -> Result<()> {
    ensure!(
        c.windows(2).all(|w| w[0] < w[1]),
        Parameter,
        "index set must be strictly increasing"
    );
    ensure!(
        c.iter().all(|&j| j >= 1 && j <= betas.len()),
        Parameter,
        "index set must lie in 1..={}",
        betas.len()
    );
    Ok(())
}

/// `Ψ_C(seed) = ψ_{β_{c₁}} ∘ … ∘ ψ_{β_{c_s}}(seed)`.
pub(crate) fn compose_set(
    c: &[usize],
    betas: &BetaSequence,
    ev: &PsiEvaluator,
    seed: f64,
) -> Result<f64> {
    c.iter()
        .rev()
        .try_fold(seed, |t, &i| ev.psi(betas.beta(i), t))
}

/// `Λ_C = Ψ_C(μ)`; the empty set gives μ.
pub fn lambda_finite(c: &[usize], betas: &BetaSequence, ev: &PsiEvaluator, mu: f64) -> Result<f64> {
    check_index_set(c, betas)?;
    compose_set(c, betas, ev, mu)
}

/// `ψ_{β_j}(μ) ≤ lower(ν_{j+1}) + 1e-9`, with the bracket at the given depth.
pub fn verify_overlap(
    betas: &BetaSequence,
    j: usize,
    ev: &PsiEvaluator,
    depth: usize,
    mu: f64,
) -> Result<bool> {
    ensure!(j < betas.len(), Parameter, "no tail after index {j}");
    let step = ev.psi(betas.beta(j), mu)?;
    Ok(step <= tail_value(betas, j + 1, depth, ev)?.lower + 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlapScan {
    /// Smallest `j₀` such that every tested `j ≥ j₀` satisfies the overlap.
    pub first_holding: Option<usize>,
    pub failures: Vec<usize>,
    pub checked: usize,
    pub tolerance: f64,
}

/// Tests the overlap for `j = 1..=len − 1 − min_depth` against a tail table,
/// so every bracket used has depth at least `min_depth`.
pub fn scan_overlap(
    table: &TailTable,
    betas: &BetaSequence,
    ev: &PsiEvaluator,
    mu: f64,
    min_depth: usize,
    tol: f64,
) -> Result<OverlapScan> {
    ensure!(
        table.len() == betas.len(),
        Parameter,
        "table and sequence lengths differ"
    );
    ensure!(
        betas.len() > min_depth + 1,
        Parameter,
        "sequence too short for tail depth {min_depth}"
    );
    let checked = betas.len() - 1 - min_depth;
    let mut failures = Vec::new();
    for j in 1..=checked {
        if ev.psi(betas.beta(j), mu)? > table.lower[j] + tol {
            failures.push(j);
        }
    }
    let first_holding = match failures.last() {
        None => Some(1),
        Some(&f) if f < checked => Some(f + 1),
        Some(_) => None,
    };
    Ok(OverlapScan {
        first_holding,
        failures,
        checked,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OneStepGap {
    pub eta: f64,
    pub gap: f64,
    pub ratio_to_r_eta: f64,
}

/// `ψ_{α+η}(μ) − μ` and its ratio to `Rη`; the test vector `z*` forces
/// `gap ≥ Rη`, which is checked to `1e-10`.
pub fn one_step_gap(
    eta: f64,
    ev: &PsiEvaluator,
    alpha: f64,
    mu: f64,
    r: f64,
) -> Result<OneStepGap> {
    ensure!(
        eta >= 0.0 && alpha + eta <= 1.0,
        Domain,
        "η = {eta} out of range"
    );
    let gap = ev.psi(alpha + eta, mu)? - mu;
    ensure!(
        gap >= r * eta - 1e-10,
        Internal,
        "gap {gap} below Rη = {}",
        r * eta
    );
    let ratio_to_r_eta = if eta > 0.0 { gap / (r * eta) } else { f64::NAN };
    Ok(OneStepGap {
        eta,
        gap,
        ratio_to_r_eta,
    })
}

pub fn eta_ladder(
    etas: &[f64],
    ev: &PsiEvaluator,
    alpha: f64,
    mu: f64,
    r: f64,
) -> Result<Vec<OneStepGap>> {
    etas.iter()
        .map(|&eta| one_step_gap(eta, ev, alpha, mu, r))
        .collect()
}

/// `eta,gap,ratio` rows.
pub fn ladder_csv(rows: &[OneStepGap]) -> String {
    let mut out = String::from("eta,gap,ratio\n");
    for row in rows {
        out.push_str(&format!(
            "{:e},{:.17e},{:.17e}\n",
            row.eta, row.gap, row.ratio_to_r_eta
        ));
    }
    out
}

/// Iterates `t ← ψ_a(t)` from 0 until within `tol` of `target`; returns the
/// final iterate and the number of steps.
pub fn constant_tail(
    a: f64,
    ev: &PsiEvaluator,
    target: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let mut t = 0.0;
    for it in 1..=max_iter {
        t = ev.psi(a, t)?;
        if (t - target).abs() <= tol {
            return Ok((t, it));
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: (t - target).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (PsiEvaluator, f64) {
        let ev = PsiEvaluator::new(6).unwrap();
        let mu = ev.mu_of(0.4).unwrap().mu;
        (ev, mu)
    }

    #[test]
    fn synthetic_formula() {
        let b = synthetic_beta(0.4, 0.05, 10, 3).unwrap();
        assert_eq!(b.eps, vec![0.05 / 11.0, 0.05 / 12.0, 0.05 / 13.0]);
        assert!((b.eps[0] / b.eps[1] - 12.0 / 11.0).abs() < 1e-15);
        let long = synthetic_beta(0.4, 0.05, 10, 10_000).unwrap();
        assert!(long.eps[9_998] / long.eps[9_999] < 1.0002);
        assert!(synthetic_beta(0.4, -1.0, 10, 3).is_err());
        assert!(BetaSequence::new(0.4, vec![0.1, 0.1], BetaSource::GadgetDerived).is_err());
        assert_eq!(b.relabel(1).unwrap().beta(1), 0.4 + 0.05 / 12.0);
    }

    #[test]
    fn constant_sequence_collapses() {
        let (ev, mu) = toy();
        let betas = BetaSequence::constant(0.4, 201).unwrap();
        let br = tail_value(&betas, 1, 200, &ev).unwrap();
        assert!(!br.truncated);
        assert!(br.lower <= br.upper);
        assert!((br.lower - mu).abs() < 1e-8 && (br.upper - mu).abs() < 1e-8);
    }

    #[test]
    fn depth_zero_and_truncation() {
        let (ev, _) = toy();
        let betas = synthetic_beta(0.4, 0.05, 10, 5).unwrap();
        let br = tail_value(&betas, 2, 0, &ev).unwrap();
        assert_eq!(br.lower, ev.psi(betas.beta(2), 0.0).unwrap());
        let seed = ev.mu_of(betas.beta(3)).unwrap().mu;
        assert_eq!(br.upper, ev.psi(betas.beta(2), seed).unwrap());
        let clipped = tail_value(&betas, 3, 10, &ev).unwrap();
        assert!(clipped.truncated && clipped.depth == 2);
    }

    #[test]
    fn table_matches_direct_brackets() {
        let (ev, _) = toy();
        let betas = synthetic_beta(0.4, 0.05, 10, 40).unwrap();
        let table = tail_table(&betas, &ev).unwrap();
        for j in [1, 7, 40] {
            let direct = tail_value(&betas, j, 40 - j, &ev).unwrap();
            assert_eq!(direct.lower, table.lower[j - 1]);
            assert_eq!(direct.upper, table.upper[j - 1]);
        }
        assert!(table.to_csv().starts_with("j,nu_lower,nu_upper\n1,"));
    }

    #[test]
    fn tails_decrease() {
        let (ev, mu) = toy();
        let betas = synthetic_beta(0.4, 0.05, 10, 60).unwrap();
        let one = tail_value(&betas, 1, 50, &ev).unwrap();
        let two = tail_value(&betas, 2, 50, &ev).unwrap();
        assert!(one.lower > two.upper);
        assert!(two.lower >= mu - 1e-9);
    }

    #[test]
    fn finite_compositions() {
        let (ev, mu) = toy();
        let rep = ev.mu_of(0.4).unwrap();
        let betas = synthetic_beta(0.4, 0.05, 10, 10).unwrap();
        assert_eq!(lambda_finite(&[], &betas, &ev, mu).unwrap(), mu);
        let one = lambda_finite(&[1], &betas, &ev, mu).unwrap();
        assert!(one >= mu + rep.r * betas.eps[0] - 1e-9);
        let both = lambda_finite(&[1, 2], &betas, &ev, mu).unwrap();
        assert!(both >= one);
        assert!(lambda_finite(&[2, 1], &betas, &ev, mu).is_err());
        assert!(lambda_finite(&[11], &betas, &ev, mu).is_err());
    }

    #[test]
    fn ladder_rows() {
        let (ev, mu) = toy();
        let r = ev.mu_of(0.4).unwrap().r;
        let rows = eta_ladder(&[1e-2, 1e-3, 1e-4], &ev, 0.4, mu, r).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[0].ratio_to_r_eta > w[1].ratio_to_r_eta));
        assert!(rows.iter().all(|row| row.ratio_to_r_eta >= 1.0 - 1e-6));
        assert!(one_step_gap(0.0, &ev, 0.4, mu, r).unwrap().gap.abs() < 1e-12);
        assert_eq!(ladder_csv(&rows).lines().count(), 4);
    }

    #[test]
    fn constant_iteration() {
        let (ev, mu) = toy();
        let (t, it) = constant_tail(0.4, &ev, mu, 1e-8, 500).unwrap();
        assert!((t - mu).abs() <= 1e-8 && it <= 500);
        assert!(matches!(
            constant_tail(0.4, &ev, mu, 0.0, 0),
            Err(Error::Convergence { .. })
        ));
    }
}
