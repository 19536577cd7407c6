use serde_json::{json, Value};
use turan_core::constructions::{
    build_gadget, build_outer, check_parameter_constraints, join_density_limit, lift_constant,
    outer_uniform_lower_bound, symbolic_outer_identity, terminal_interval, verify_centered_bound,
    verify_link_relabel,
};
use turan_core::error::{Error, Result};
use turan_core::group::{CyclicGroup, FiniteGroup, Psl2Group, SymmetricGroup};
use turan_core::numtheory::primes_in_progression;
use turan_core::psl2::lps_generators;
use turan_core::recursion::{GreedyPlan, PsiEvaluator};
use turan_core::spectral::{
    build_cayley, nontrivial_radius_dense, ramanujan_bound, ramanujan_check, verify_mixing,
    SolverConfig,
};
use turan_core::Rational;

use crate::commands::{lps, toy_sequence};
use crate::{Cli, Payload, ToyArgs};

/// Status attached to results that hold only in the limit.
pub const ASYMPTOTIC_LABEL: &str = "asymptotic — property-checked only";

/// Reference value of μ at m = 2701, α = 899/900.
const MU_2701: f64 = 0.998_889_574_505_890_6;

struct Stages(Vec<Value>);

impl Stages {
    fn check(&mut self, name: &str, outcome: Result<(bool, Value)>) {
        let (status, detail) = match outcome {
            Ok((true, d)) => ("pass", d),
            Ok((false, d)) => ("fail", d),
            Err(e) => ("fail", json!({ "error": e.to_string() })),
        };
        self.0
            .push(json!({ "name": name, "status": status, "detail": detail }));
    }

    fn note(&mut self, name: &str, status: &str, detail: Value) {
        self.0
            .push(json!({ "name": name, "status": status, "detail": detail }));
    }

    fn all_passed(&self) -> bool {
        self.0.iter().all(|s| s["status"] != "fail")
    }
}

fn primes_stage(p: u64, bound: u64, expect_first: u64) -> Result<(bool, Value)> {
    let prog = primes_in_progression(p, bound)?;
    let ok = prog.primes.first() == Some(&expect_first);
    Ok((
        ok,
        json!({ "p": p, "bound": bound, "primes": prog.primes.len(), "first": prog.primes.first() }),
    ))
}

fn lps_count_stage(p: u64, q: u64, generators_only: bool) -> Result<(bool, Value)> {
    let Payload::Json(v) = lps(p, q, None, generators_only)? else {
        return Err(Error::Internal("lps returned a non-JSON payload".into()));
    };
    let count = v["count"].as_u64().unwrap_or(0);
    Ok((
        count == p + 1,
        json!({ "p": p, "q": q, "generators": count }),
    ))
}

fn ramanujan_stage(seed: u64) -> Result<(bool, Value)> {
    let gens = lps_generators(5, 29)?;
    let graph = build_cayley(&Psl2Group::new(29)?, &gens.elements)?;
    let rep = ramanujan_check(
        &graph,
        &SolverConfig {
            seed,
            ..SolverConfig::default()
        },
    )?;
    let radius = rep.lambda2.abs().max(rep.lambda_min.abs());
    let ok = rep.is_ramanujan
        && rep.connected
        && !rep.bipartite
        && radius <= ramanujan_bound(rep.degree) + 1e-6
        && rep.residual_norm <= 1e-8;
    Ok((ok, serde_json::to_value(rep).expect("report serializes")))
}

fn gadget_check<G: FiniteGroup>(
    name: &str,
    group: &G,
    gens: &[G::Element],
    seed: u64,
) -> Result<(bool, Value)> {
    let cayley = build_cayley(group, gens)?;
    let theta = nontrivial_radius_dense(&cayley);
    let h = build_gadget(group, gens)?;
    let links = verify_link_relabel(&h, group, gens);
    let centered = verify_centered_bound(&h, theta, 1000, seed, &[]);
    let mixing = verify_mixing(&cayley, theta, 1000, seed);
    let ok = links
        && centered.max_violation <= 1e-12
        && mixing.max_violation <= 1e-10
        && mixing.max_l2_violation <= 1e-10;
    Ok((
        ok,
        json!({
            "group": name,
            "vertices": h.graph.n(),
            "edges": h.graph.edge_count(),
            "theta": theta,
            "linkRelabel": links,
            "centered": centered,
            "mixing": mixing,
        }),
    ))
}

fn gadgets_stage(seed: u64) -> Result<(bool, Value)> {
    let z6 = CyclicGroup::new(6);
    let s3 = SymmetricGroup::new(3);
    let runs = [
        gadget_check("Z6", &z6, &z6.all_nonzero(), seed)?,
        gadget_check("Z5", &CyclicGroup::new(5), &[1, 4], seed)?,
        gadget_check("S3", &s3, &s3.transpositions(), seed)?,
    ];
    let ok = runs.iter().all(|r| r.0);
    Ok((ok, Value::Array(runs.into_iter().map(|r| r.1).collect())))
}

fn outer_identity_stage() -> Result<(bool, Value)> {
    let z6 = CyclicGroup::new(6);
    let cases = [
        (2u64, build_gadget(&z6, &z6.all_nonzero())?),
        (3, build_gadget(&CyclicGroup::new(5), &[1, 4])?),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (k, h) in &cases {
        let q = build_outer(*k as usize, h)?;
        let m = q.m as u64;
        let counted = Rational::new(6 * q.graph.edge_count() as i128, ((k * m) as i128).pow(3));
        let (_, _, formula) = outer_uniform_lower_bound(*k, h.degree as u64, m);
        ok &= counted == formula;
        rows.push(json!({ "k": k, "D": h.degree, "m": m, "value": format!("{}/{}", formula.numer(), formula.denom()), "exact": counted == formula }));
    }
    let symbolic = symbolic_outer_identity(30, 138);
    ok &= symbolic;
    Ok((ok, json!({ "cases": rows, "symbolic_k30_D138": symbolic })))
}

fn mu_stage() -> Result<(bool, Value)> {
    let rep = PsiEvaluator::new(2701)?.mu_of(899.0 / 900.0)?;
    let err = (rep.mu - MU_2701).abs();
    Ok((
        err <= 1e-10,
        json!({ "mu": rep.mu, "q": rep.q, "R": rep.r, "absError": err }),
    ))
}

fn greedy_stage() -> Result<(bool, Value)> {
    let toy = ToyArgs {
        m: 6,
        alpha: "2/5".into(),
        c: 0.05,
        m0: 10,
        count: 2000,
    };
    let (ev, betas) = toy_sequence(&toy)?;
    let plan = GreedyPlan::prepare(&betas, &ev, 200, 400)?;
    let y = plan.mu() + 0.5 * (plan.nu1().lower - plan.mu());
    let trace = plan.target(y)?;
    let ok = trace.invariant_holds() && trace.contains_target() && trace.width <= 1e-5;
    Ok((
        ok,
        json!({
            "target": y,
            "mu": plan.mu(),
            "discardedPrefix": plan.offset(),
            "accepted": trace.accepted.len(),
            "finalBracket": trace.final_bracket,
            "width": trace.width,
        }),
    ))
}

fn transfer_stage() -> Result<(bool, Value)> {
    let l4 = lift_constant(4)?;
    let l5 = lift_constant(5)?;
    let join = join_density_limit(2.0 / 9.0, 2, 3);
    let t = terminal_interval(0.8, 0.9, 3)?;
    let ok = l4 == Rational::new(27, 64)
        && l5 == Rational::new(108, 625)
        && (join - 29.0 / 36.0).abs() < 1e-15
        && t.m0 == 3
        && (t.delta - 0.2 / 9.0).abs() < 1e-15;
    Ok((
        ok,
        json!({
            "liftConstant4": format!("{}/{}", l4.numer(), l4.denom()),
            "liftConstant5": format!("{}/{}", l5.numer(), l5.denom()),
            "joinLimit": join,
            "terminalInterval": t,
        }),
    ))
}

fn constraints_stage() -> Result<(bool, Value)> {
    let good = check_parameter_constraints(137, 30, 2701)?;
    let bad = check_parameter_constraints(137, 32, 2701)?;
    let ok = good.k_choice_ok && good.m_choice_ok && good.c0_positive && !bad.k_choice_ok;
    Ok((ok, json!({ "accepted": good, "rejected": bad })))
}

fn asymptotic_notes(stages: &mut Stages) {
    stages.note(
        "interval [1 - delta_r, 1] in every uniformity",
        ASYMPTOTIC_LABEL,
        json!({ "coveredBy": ["terminal interval constants", "join and lift Lagrangian identities", "palette scaling"] }),
    );
    stages.note(
        "infinite gadget sequence with decreasing densities",
        ASYMPTOTIC_LABEL,
        json!({ "coveredBy": ["exact outer lower bound", "sampled centered bound", "finite-window extraction"] }),
    );
    stages.note(
        "o(1/m) term of the outer Lagrangian",
        ASYMPTOTIC_LABEL,
        json!({ "coveredBy": ["sampled part-wise upper bound", "exact uniform value"] }),
    );
}

pub(crate) fn run(cli: &Cli, paper: bool, toy: bool) -> Result<Payload> {
    if paper == toy {
        return Err(Error::Parameter(
            "choose exactly one of --paper-params or --toy-params".into(),
        ));
    }
    let mut stages = Stages(Vec::new());
    if toy {
        stages.check("primes", primes_stage(5, 200, 41));
        stages.check("lps", lps_count_stage(5, 29, false));
        stages.check("ramanujan", ramanujan_stage(cli.seed));
        stages.check("gadgets", gadgets_stage(cli.seed));
        stages.check("outer identity", outer_identity_stage());
        stages.check("mu", mu_stage());
        stages.check("toy greedy", greedy_stage());
        stages.check("transfer constants", transfer_stage());
    } else {
        stages.check("primes", primes_stage(137, 2000, 1097));
        stages.check("lps generators", lps_count_stage(137, 1097, true));
        stages.note(
            "ramanujan",
            "skipped",
            json!({ "notice": "out of desk scale: PSL2(F_1097) has about 6.6e8 elements" }),
        );
        stages.check("parameter constraints", constraints_stage());
        stages.check("outer identity", outer_identity_stage());
        stages.check("mu", mu_stage());
    }
    asymptotic_notes(&mut stages);
    let passed = stages.all_passed();
    let report =
        json!({ "mode": if toy { "toy" } else { "paper" }, "passed": passed, "stages": stages.0 });
    Ok(if passed {
        Payload::Json(report)
    } else {
        Payload::Failed(report)
    })
}
