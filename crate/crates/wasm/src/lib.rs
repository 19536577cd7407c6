//! Browser bindings for the recursion layer. Every export returns a JSON
//! string; errors come back as `{"error": "..."}` so the page can show them.

use serde_json::{json, Value};
use turan_core::recursion::{synthetic_beta, GreedyPlan, PsiEvaluator};
use turan_core::Result;
use wasm_bindgen::prelude::*;

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Samples `t ↦ ψ_b(t)` at `points` evenly spaced `t` in `[0, 1]`.
pub fn psi_curve_value(m: usize, b: f64, points: usize) -> Result<Value> {
    let ev = PsiEvaluator::new(m)?;
    let n = points.clamp(2, 400);
    let rows = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            ev.psi(b, t).map(|v| json!([t, v]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "m": m, "b": b, "points": rows }))
}

pub fn mu_report_value(m: usize, alpha: f64) -> Result<Value> {
    let rep = PsiEvaluator::new(m)?.mu_of(alpha)?;
    Ok(serde_json::to_value(rep).expect("report serializes"))
}

/// Toy sequence `β_i = 0.4 + 0.05/(10+i)` on six parts; `fraction` places
/// the target between μ and the first tail value.
pub fn greedy_report_value(fraction: f64, depth: usize) -> Result<Value> {
    let ev = PsiEvaluator::new(6)?;
    let betas = synthetic_beta(0.4, 0.05, 10, 1200)?;
    let plan = GreedyPlan::prepare(&betas, &ev, depth.clamp(1, 200), 400)?;
    let y = plan.mu() + fraction * (plan.nu1().lower - plan.mu());
    let trace = plan.target(y)?;
    Ok(json!({
        "target": y,
        "mu": plan.mu(),
        "discardedPrefix": plan.offset(),
        "accepted": trace.accepted,
        "finalBracket": trace.final_bracket,
        "width": trace.width,
        "invariantHolds": trace.invariant_holds(),
    }))
}

#[wasm_bindgen]
pub fn psi_curve(m: usize, b: f64, points: usize) -> String {
    respond(psi_curve_value(m, b, points))
}

#[wasm_bindgen]
pub fn mu_report(m: usize, alpha: f64) -> String {
    respond(mu_report_value(m, alpha))
}

#[wasm_bindgen]
pub fn greedy_report(fraction: f64, depth: usize) -> String {
    respond(greedy_report_value(fraction, depth))
}
