use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turan_core::hypergraph::{LagrangianConfig, SimplexPolynomial, Term};
use turan_core::recursion::{
    lambda_finite, scan_overlap, synthetic_beta, tail_table, tail_value, verify_overlap,
    BetaSequence, BetaSource, GreedyPlan, PsiEvaluator,
};

const TOY_MU: f64 = 0.5603085426654565;

/// `6·Σ_{i<j<k} z_i z_j z_k + t z₁³ + b z₂³`, which equals the ψ objective
/// on the simplex, as a plain polynomial over all `m` coordinates.
fn full_psi_polynomial(m: usize, b: f64, t: f64) -> SimplexPolynomial {
    let mut terms = Vec::new();
    for i in 0..m as u32 {
        for j in i + 1..m as u32 {
            for k in j + 1..m as u32 {
                terms.push(Term {
                    coef: 6.0,
                    vars: vec![i, j, k],
                });
            }
        }
    }
    terms.push(Term {
        coef: t,
        vars: vec![0, 0, 0],
    });
    terms.push(Term {
        coef: b,
        vars: vec![1, 1, 1],
    });
    SimplexPolynomial::new(m, terms).unwrap()
}

fn full_psi(m: usize, b: f64, t: f64) -> f64 {
    let cfg = LagrangianConfig {
        starts: 24,
        ..LagrangianConfig::default()
    };
    full_psi_polynomial(m, b, t).maximize(&cfg).unwrap().value
}

#[test]
fn reduced_matches_full_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 4..=8 {
        let ev = PsiEvaluator::new(m).unwrap();
        for _ in 0..100 {
            let (b, t) = (rng.gen::<f64>(), rng.gen::<f64>());
            let reduced = ev.psi(b, t).unwrap();
            let full = full_psi(m, b, t);
            assert!(
                (reduced - full).abs() <= 1e-8,
                "m = {m}, b = {b}, t = {t}: {reduced} vs {full}"
            );
        }
    }
}

/// μ(a) is the least `t` with `ψ_a(t) ≤ t`; bisect on that using the
/// full-dimensional maximizer.
#[test]
fn toy_mu_by_bisection() {
    let (mut lo, mut hi) = (0.4, 1.0);
    for _ in 0..45 {
        let mid = 0.5 * (lo + hi);
        if full_psi(6, 0.4, mid) - mid > 1e-13 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ev = PsiEvaluator::new(6).unwrap();
    let mu = ev.mu_of(0.4).unwrap().mu;
    assert!((mu - hi).abs() <= 1e-9, "{mu} vs bisection {hi}");
    assert!((mu - TOY_MU).abs() <= 1e-12);
}

#[test]
fn paper_scale_mu() {
    let ev = PsiEvaluator::new(2701).unwrap();
    let alpha = 899.0 / 900.0;
    let rep = ev.mu_of(alpha).unwrap();
    assert!((rep.mu - 0.998_889_574_505_890_6).abs() <= 1e-10);
    assert!(rep.q > 0.0 && rep.q < 1.0 && rep.r > 0.0);
    assert!((ev.psi(alpha, rep.mu).unwrap() - rep.mu).abs() <= 1e-9);
}

#[test]
fn finer_grid_agrees() {
    let coarse = PsiEvaluator::new(6).unwrap();
    let fine = PsiEvaluator::with_resolution(6, 4000, 1e-14).unwrap();
    for (b, t) in [(0.0, 0.0), (0.4, TOY_MU), (0.9, 0.2), (0.7, 0.95)] {
        assert!((coarse.psi(b, t).unwrap() - fine.psi(b, t).unwrap()).abs() < 1e-12);
    }
    assert!((fine.mu_of(0.4).unwrap().mu - TOY_MU).abs() < 1e-12);
}

#[test]
fn overlap_needs_a_discarded_prefix() {
    let ev = PsiEvaluator::new(6).unwrap();
    let betas = synthetic_beta(0.4, 0.05, 10, 1200).unwrap();
    let mu = ev.mu_of(0.4).unwrap().mu;
    assert!(!verify_overlap(&betas, 20, &ev, 400, mu).unwrap());
    assert!(verify_overlap(&betas, 400, &ev, 400, mu).unwrap());
    let table = tail_table(&betas, &ev).unwrap();
    let scan = scan_overlap(&table, &betas, &ev, mu, 400, 0.0).unwrap();
    let first = scan.first_holding.unwrap();
    assert!((150..=200).contains(&first), "first holding index {first}");

    let constant = BetaSequence::constant(0.4, 300).unwrap();
    assert!((1..50).all(|j| verify_overlap(&constant, j, &ev, 200, mu).unwrap()));

    let fast: Vec<f64> = (1..=40).map(|i| 0.5f64.powi(i)).collect();
    let fast = BetaSequence::new(0.4, fast, BetaSource::Synthetic).unwrap();
    assert!(!verify_overlap(&fast, 1, &ev, 30, mu).unwrap());
}

#[test]
fn deeper_tails_are_tighter() {
    let ev = PsiEvaluator::new(6).unwrap();
    let betas = synthetic_beta(0.4, 0.05, 10, 60).unwrap();
    let mut prev = tail_value(&betas, 1, 0, &ev).unwrap();
    for depth in 1..6 {
        let next = tail_value(&betas, 1, depth, &ev).unwrap();
        assert!(next.lower >= prev.lower && next.upper <= prev.upper + 1e-15);
        assert!(next.lower <= next.upper);
        prev = next;
    }
}

#[test]
fn greedy_trace_serializes() {
    let ev = PsiEvaluator::new(6).unwrap();
    let betas = synthetic_beta(0.4, 0.05, 10, 800).unwrap();
    let plan = GreedyPlan::prepare(&betas, &ev, 20, 200).unwrap();
    let y = plan.mu() + 0.5 * (plan.nu1().lower - plan.mu());
    let trace = plan.target(y).unwrap();
    let json = serde_json::to_value(&trace).unwrap();
    assert_eq!(json["perStep"].as_array().unwrap().len(), 20);
    assert!(json["finalBracket"].is_array());
    let accepted = trace.accepted.clone();
    let direct = lambda_finite(&accepted, plan.betas(), &ev, plan.mu()).unwrap();
    assert_eq!(direct, trace.final_bracket.0);
}

fn toy() -> &'static (PsiEvaluator, f64, f64) {
    static TOY: std::sync::OnceLock<(PsiEvaluator, f64, f64)> = std::sync::OnceLock::new();
    TOY.get_or_init(|| {
        let ev = PsiEvaluator::new(6).unwrap();
        let rep = ev.mu_of(0.4).unwrap();
        (ev, rep.mu, rep.q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_is_monotone_and_lipschitz(b in 0.0..=1.0f64, b2 in 0.0..=1.0f64, t in 0.0..=1.0f64, t2 in 0.0..=1.0f64) {
        let (ev, _, _) = toy();
        let base = ev.psi(b, t).unwrap();
        let moved_t = ev.psi(b, t2).unwrap();
        let moved_b = ev.psi(b2, t).unwrap();
        prop_assert!((base - moved_t).abs() <= (t - t2).abs() + 1e-9);
        prop_assert!((base - moved_b).abs() <= (b - b2).abs() + 1e-9);
        prop_assert!(base >= t - 1e-9);
        if t2 >= t { prop_assert!(moved_t >= base - 1e-9); }
        if b2 >= b { prop_assert!(moved_b >= base - 1e-9); }
    }

    #[test]
    fn contraction_toward_mu(frac in 0.0..=1.0f64) {
        let (ev, mu, q) = toy();
        let t = frac * mu;
        prop_assert!(ev.psi(0.4, t).unwrap() >= mu - q * (mu - t) - 1e-9);
    }

    #[test]
    fn tail_recursion_is_exact(j in 1usize..30, depth in 0usize..10) {
        let (ev, _, _) = toy();
        let betas = synthetic_beta(0.4, 0.05, 10, 50).unwrap();
        let outer = tail_value(&betas, j, depth + 1, ev).unwrap();
        let inner = tail_value(&betas, j + 1, depth, ev).unwrap();
        prop_assert!((ev.psi(betas.beta(j), inner.lower).unwrap() - outer.lower).abs() <= 1e-12);
    }
}
