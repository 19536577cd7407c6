use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use turan_core::error::{Error, Result};
use turan_core::group::Psl2Group;
use turan_core::hypergraph::{lagrangian, lagrangian_oracle_grid, LagrangianConfig, RGraph};
use turan_core::numtheory::{consecutive_ratio_stats, primes_in_progression};
use turan_core::psl2::lps_generators;
use turan_core::recursion::{
    eta_ladder, ladder_csv, synthetic_beta, tail_table, BetaSequence, GreedyPlan, PsiEvaluator,
};
use turan_core::spectral::{
    build_cayley, connectivity_and_bipartiteness, ramanujan_check, CayleyGraph, SolverConfig,
};

use crate::{parse_number, Cli, Command, Format, Payload, ToyArgs};

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn json_only(cli: &Cli) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Error::Parameter(format!(
            "`{}` has no CSV form; CSV is available for primes, tails and ladder",
            cli.command.name()
        )));
    }
    Ok(())
}

pub(crate) fn run(cli: &Cli, command: &Command) -> Result<Payload> {
    match command {
        Command::Primes { p, bound } => primes(cli, *p, *bound),
        Command::Lps {
            p,
            q,
            out,
            generators_only,
        } => {
            json_only(cli)?;
            lps(*p, *q, out.as_deref(), *generators_only)
        }
        Command::Ramanujan { graph } => {
            json_only(cli)?;
            ramanujan(cli, graph)
        }
        Command::Lagrangian {
            graph,
            oracle,
            starts,
        } => {
            json_only(cli)?;
            lagrangian_cmd(cli, graph, *oracle, *starts)
        }
        Command::Mu { m, alpha } => {
            json_only(cli)?;
            mu(*m, alpha).map(Payload::Json)
        }
        Command::Target {
            y,
            depth,
            tail_depth,
            toy,
        } => {
            json_only(cli)?;
            target(y, *depth, *tail_depth, toy).map(Payload::Json)
        }
        Command::Tails { toy } => tails(cli, toy),
        Command::Ladder { m, alpha, etas } => ladder(cli, *m, alpha, etas),
        Command::Pipeline { .. } => unreachable!("dispatched separately"),
    }
}

fn primes(cli: &Cli, p: u64, bound: u64) -> Result<Payload> {
    let prog = primes_in_progression(p, bound)?;
    if cli.format == Format::Csv {
        let mut out = String::from("q\n");
        prog.primes
            .iter()
            .for_each(|q| out.push_str(&format!("{q}\n")));
        return Ok(Payload::Csv(out));
    }
    let stats = consecutive_ratio_stats(&prog, 10).ok();
    let mut v = to_value(&prog);
    v["first"] = json!(prog.primes.first());
    v["ratioStats"] = to_value(&stats);
    Ok(Payload::Json(v))
}

/// Writes through a sibling temporary file so a failed run leaves nothing
/// half-written at `path`.
fn write_atomically(
    path: &Path,
    write: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        write(&mut w)?;
        w.flush()?;
        Ok(())
    })();
    match result {
        Ok(()) => Ok(std::fs::rename(&tmp, path)?),
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(e)
        }
    }
}

pub(crate) fn lps(p: u64, q: u64, out: Option<&Path>, generators_only: bool) -> Result<Payload> {
    if generators_only && out.is_some() {
        return Err(Error::Parameter(
            "--out needs the graph; drop --generators-only".into(),
        ));
    }
    let gens = lps_generators(p, q)?;
    let mut v = gens.to_json();
    v["count"] = json!(gens.size());
    if !generators_only {
        let group = Psl2Group::new(q)?;
        let graph = build_cayley(&group, &gens.elements)?;
        let conn = connectivity_and_bipartiteness(&graph);
        if let Some(path) = out {
            write_atomically(path, |w| graph.write_edge_list(w))?;
            v["edgeListFile"] = json!(path.display().to_string());
        }
        v["vertices"] = json!(graph.n);
        v["edges"] = json!(graph.edge_count());
        v["degree"] = json!(graph.degree);
        v["connected"] = json!(conn.connected);
        v["bipartite"] = json!(conn.bipartite);
    }
    Ok(Payload::Json(v))
}

fn ramanujan(cli: &Cli, path: &Path) -> Result<Payload> {
    let graph = CayleyGraph::read_edge_list(BufReader::new(File::open(path)?))?;
    let mut config = SolverConfig {
        seed: cli.seed,
        ..SolverConfig::default()
    };
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    Ok(Payload::Json(to_value(&ramanujan_check(&graph, &config)?)))
}

fn lagrangian_cmd(
    cli: &Cli,
    path: &Path,
    oracle: Option<usize>,
    starts: Option<usize>,
) -> Result<Payload> {
    let graph = RGraph::read_text(BufReader::new(File::open(path)?))?;
    let mut config = LagrangianConfig {
        seed: cli.seed,
        ..LagrangianConfig::default()
    };
    if let Some(tol) = cli.tol {
        config.kkt_tol = tol;
    }
    if let Some(s) = starts {
        config.starts = s;
    }
    let res = lagrangian(&graph, &config)?;
    let mut v = to_value(&res);
    v["r"] = json!(graph.r());
    v["n"] = json!(graph.n());
    v["edges"] = json!(graph.edge_count());
    if let Some(resolution) = oracle {
        let grid = lagrangian_oracle_grid(&graph, resolution)?;
        v["oracle"] = json!({
            "resolution": resolution,
            "value": grid,
            "difference": res.value - grid,
        });
    }
    Ok(Payload::Json(v))
}

pub(crate) fn mu(m: usize, alpha: &str) -> Result<Value> {
    let (a, exact) = parse_number(alpha)?;
    let ev = PsiEvaluator::new(m)?;
    let rep = ev.mu_of(a)?;
    let mut v = to_value(&rep);
    v["alpha"] = json!(exact.map_or_else(
        || alpha.trim().to_string(),
        |r| format!("{}/{}", r.numer(), r.denom())
    ));
    v["alphaValue"] = json!(a);
    v["fixedPointGap"] = json!(ev.psi(a, rep.mu)? - rep.mu);
    Ok(v)
}

pub(crate) fn toy_sequence(toy: &ToyArgs) -> Result<(PsiEvaluator, BetaSequence)> {
    let (alpha, _) = parse_number(&toy.alpha)?;
    Ok((
        PsiEvaluator::new(toy.m)?,
        synthetic_beta(alpha, toy.c, toy.m0, toy.count)?,
    ))
}

fn toy_json(toy: &ToyArgs) -> Value {
    json!({ "m": toy.m, "alpha": toy.alpha, "c": toy.c, "m0": toy.m0, "count": toy.count })
}

pub(crate) fn target(y: &str, depth: usize, tail_depth: usize, toy: &ToyArgs) -> Result<Value> {
    let (y, _) = parse_number(y)?;
    let (ev, betas) = toy_sequence(toy)?;
    let plan = GreedyPlan::prepare(&betas, &ev, depth, tail_depth)?;
    let trace = plan.target(y)?;
    Ok(json!({
        "sequence": toy_json(toy),
        "mu": plan.mu(),
        "discardedPrefix": plan.offset(),
        "nu1": to_value(&plan.nu1()),
        "invariantHolds": trace.invariant_holds(),
        "containsTarget": trace.contains_target(),
        "trace": to_value(&trace),
    }))
}

fn tails(cli: &Cli, toy: &ToyArgs) -> Result<Payload> {
    let (ev, betas) = toy_sequence(toy)?;
    let table = tail_table(&betas, &ev)?;
    if cli.format == Format::Csv {
        return Ok(Payload::Csv(table.to_csv()));
    }
    let rows: Vec<Value> = (1..=table.len())
        .map(|j| to_value(&table.bracket(j)))
        .collect();
    Ok(Payload::Json(
        json!({ "sequence": toy_json(toy), "brackets": rows }),
    ))
}

fn ladder(cli: &Cli, m: usize, alpha: &str, etas: &[f64]) -> Result<Payload> {
    let (a, _) = parse_number(alpha)?;
    let ev = PsiEvaluator::new(m)?;
    let rep = ev.mu_of(a)?;
    let rows = eta_ladder(etas, &ev, a, rep.mu, rep.r)?;
    if cli.format == Format::Csv {
        return Ok(Payload::Csv(ladder_csv(&rows)));
    }
    Ok(Payload::Json(
        json!({ "m": m, "alpha": alpha, "mu": rep.mu, "R": rep.r, "rows": to_value(&rows) }),
    ))
}
