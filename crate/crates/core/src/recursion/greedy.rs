use serde::{Deserialize, Serialize};

use super::tails::{compose_set, scan_overlap, tail_table, BetaSequence, TailBracket, TailTable};
use super::PsiEvaluator;
use crate::error::{ensure, Error, Result};

/// Slack for comparisons that hold exactly in real arithmetic but pass
/// through long chains of rounded ψ evaluations (values lie in `[0, 1]`).
pub const ROUNDING_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GreedyStep {
    pub j: usize,
    /// `Λ_C = Ψ_C(μ)` before deciding `j`.
    pub lambda_c: f64,
    /// `Ψ_C` applied to the lower end of the `ν_j` bracket; the invariant is
    /// checked against this, since it is a certified lower bound on `Λ_{C∪T_j}`.
    pub lambda_c_tail_lower: f64,
    pub lambda_c_tail_upper: f64,
    /// `Λ_{C∪{j}}`.
    pub candidate: f64,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GreedyTrace {
    pub target: f64,
    pub mu: f64,
    /// Terms dropped from the front before relabelling; step `j` uses the
    /// original term `offset + j`.
    pub offset: usize,
    pub depth: usize,
    pub tail_depth: usize,
    pub accepted: Vec<usize>,
    pub per_step: Vec<GreedyStep>,
    /// `[Λ_C, Ψ_C(upper ν_{depth+1})]` for the final `C`.
    pub final_bracket: (f64, f64),
    pub width: f64,
    /// `upper ν_{depth+1} − μ`.
    pub width_bound: f64,
}

impl GreedyTrace {
    /// `Λ_C < y ≤ Ψ_C(lower ν_j)` at every recorded step.
    pub fn invariant_holds(&self) -> bool {
        self.per_step.iter().all(|s| {
            s.lambda_c < self.target && self.target <= s.lambda_c_tail_lower + ROUNDING_SLACK
        })
    }

    pub fn contains_target(&self) -> bool {
        self.final_bracket.0 < self.target && self.target <= self.final_bracket.1 + ROUNDING_SLACK
    }
}

/// A relabelled sequence on which the overlap `ψ_{β_j}(μ) ≤ ν_{j+1}` is
/// certified for `j = 1..=depth`, plus the tail brackets the greedy needs.
#[derive(Debug, Clone)]
pub struct GreedyPlan {
    ev: PsiEvaluator,
    betas: BetaSequence,
    table: TailTable,
    mu: f64,
    offset: usize,
    depth: usize,
    tail_depth: usize,
}

impl GreedyPlan {
    /// Finds the first `j₀` from which the overlap holds on `depth`
    /// consecutive indices (no tolerance), drops the `j₀ − 1` earlier terms
    /// and keeps brackets for the rest. Every bracket shares the sequence end
    /// as truncation point, so the one for `ν_{depth+1}` has depth at least
    /// `tail_depth`.
    pub fn prepare(
        betas: &BetaSequence,
        ev: &PsiEvaluator,
        depth: usize,
        tail_depth: usize,
    ) -> Result<Self> {
        ensure!(depth >= 1, Parameter, "depth must be positive");
        let mu = ev.mu_of(betas.alpha)?.mu;
        let table = tail_table(betas, ev)?;
        let scan = scan_overlap(&table, betas, ev, mu, tail_depth, 0.0)?;
        let mut run = 0usize;
        let mut start = None;
        for j in 1..=scan.checked {
            run = if scan.failures.binary_search(&j).is_ok() {
                0
            } else {
                run + 1
            };
            if run == depth {
                start = Some(j + 1 - depth);
                break;
            }
        }
        let j0 = start.ok_or_else(|| {
            Error::Parameter(format!(
                "no run of {depth} overlapping indices within {} terms",
                betas.len()
            ))
        })?;
        let offset = j0 - 1;
        ensure!(
            offset + depth + tail_depth < betas.len(),
            Parameter,
            "sequence of {} terms too short for offset {offset}, depth {depth}, tail depth {tail_depth}",
            betas.len()
        );
        Ok(Self {
            ev: *ev,
            betas: betas.relabel(offset)?,
            table: TailTable {
                lower: table.lower[offset..].to_vec(),
                upper: table.upper[offset..].to_vec(),
            },
            mu,
            offset,
            depth,
            tail_depth,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// The relabelled sequence.
    pub fn betas(&self) -> &BetaSequence {
        &self.betas
    }

    /// Minimum truncation depth requested for the tail brackets.
    pub fn tail_depth(&self) -> usize {
        self.tail_depth
    }

    pub fn table(&self) -> &TailTable {
        &self.table
    }

    /// Bracket of `ν₁` after relabelling.
    pub fn nu1(&self) -> TailBracket {
        self.table.bracket(1)
    }

    /// Runs the inclusion rule `j ∈ A ⇔ Λ_{C∪{j}} < y` for `j = 1..=depth`.
    pub fn target(&self, y: f64) -> Result<GreedyTrace> {
        let nu1 = self.nu1().lower;
        if !(y > self.mu && y <= nu1) {
            return Err(Error::TargetOutOfRange {
                y,
                lower: self.mu,
                upper: nu1,
            });
        }
        let (ev, betas, mu) = (&self.ev, &self.betas, self.mu);
        let mut accepted: Vec<usize> = Vec::new();
        let mut per_step = Vec::with_capacity(self.depth);
        for j in 1..=self.depth {
            let lambda_c = compose_set(&accepted, betas, ev, mu)?;
            let tail_lower = compose_set(&accepted, betas, ev, self.table.lower[j - 1])?;
            let tail_upper = compose_set(&accepted, betas, ev, self.table.upper[j - 1])?;
            ensure!(
                lambda_c < y && y <= tail_lower + ROUNDING_SLACK,
                Internal,
                "greedy invariant broken at j = {j}: {lambda_c} < {y} <= {tail_lower} fails"
            );
            let candidate = compose_set(&accepted, betas, ev, ev.psi(betas.beta(j), mu)?)?;
            let included = candidate < y;
            per_step.push(GreedyStep {
                j,
                lambda_c,
                lambda_c_tail_lower: tail_lower,
                lambda_c_tail_upper: tail_upper,
                candidate,
                included,
            });
            if included {
                accepted.push(j);
            }
        }
        let next = self.depth + 1;
        let low = compose_set(&accepted, betas, ev, mu)?;
        let tail_lower = compose_set(&accepted, betas, ev, self.table.lower[next - 1])?;
        let high = compose_set(&accepted, betas, ev, self.table.upper[next - 1])?;
        ensure!(
            low < y && y <= tail_lower + ROUNDING_SLACK,
            Internal,
            "final bracket [{low}, {tail_lower}] misses {y}"
        );
        let width_bound = self.table.upper[next - 1] - mu;
        ensure!(
            high - low <= width_bound + ROUNDING_SLACK,
            Internal,
            "bracket width exceeds ν − μ"
        );
        Ok(GreedyTrace {
            target: y,
            mu,
            offset: self.offset,
            depth: self.depth,
            tail_depth: self.table.len() - next,
            accepted,
            per_step,
            final_bracket: (low, high),
            width: high - low,
            width_bound,
        })
    }
}
