//! Seeded random instance generation: structured mini-IR programs (so the
//! flow graphs have small treewidth by construction) with random flow
//! relations on intraprocedural edges and bandwidth-1 relations (subsets
//! of the identity) on interprocedural edges. Output is byte-identical
//! for equal parameters.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::mini::{lower, Cfg, MiniProc, MiniProgram, NodeKind, Stmt};

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub seed: u64,
    /// Target total vertex count across all procedures.
    pub n: usize,
    /// |D|; the instance uses facts x0..x{dsize-1}.
    pub dsize: usize,
    /// Average procedure size in vertices.
    pub proc_size: usize,
    /// Probability that a generated statement is a call.
    pub call_density: f64,
    /// Maximum control-flow nesting depth (bounds the decomposition width).
    pub max_depth: usize,
    /// Probability of each candidate pair in an intra-edge relation.
    pub rel_p: f64,
}

impl RandomSpec {
    pub fn new(seed: u64, n: usize, dsize: usize) -> Self {
        RandomSpec { seed, n, dsize, proc_size: 40, call_density: 0.08, max_depth: 3, rel_p: 0.3 }
    }
}

/// Statement budget is in lowered-vertex units (plain = 1, call = 2,
/// if/while ≈ 2 + bodies).
fn gen_body(rng: &mut ChaCha8Rng, budget: usize, depth: usize, nprocs: usize, spec: &RandomSpec) -> Vec<Stmt> {
    let mut out = Vec::new();
    let mut left = budget as isize;
    while left > 0 {
        let roll: f64 = rng.gen();
        if roll < spec.call_density && nprocs > 0 {
            out.push(Stmt::Call { callee: rng.gen_range(0..nprocs), args: vec![] });
            left -= 2;
        } else if roll < spec.call_density + 0.15 && depth < spec.max_depth && left > 6 {
            let inner = rng.gen_range(2..=(left as usize).min(14) - 2);
            if rng.gen_bool(0.5) {
                let a = gen_body(rng, inner / 2, depth + 1, nprocs, spec);
                let b = gen_body(rng, inner - inner / 2, depth + 1, nprocs, spec);
                out.push(Stmt::If(a, b));
            } else {
                out.push(Stmt::While(gen_body(rng, inner, depth + 1, nprocs, spec)));
            }
            left -= inner as isize + 2;
        } else {
            out.push(Stmt::Use(vec![]));
            left -= 1;
        }
    }
    out
}

/// A random mini-IR program with variables, for the analysis encoders.
/// Every procedure has the same parameter count so any callee fits any
/// call site; argument by-ref flags mirror the callee's parameters.
pub fn gen_program(seed: u64, n: usize, nvars: usize, proc_size: usize, call_density: f64) -> MiniProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nprocs = (n / proc_size).max(1);
    let nvars = nvars.max(2);
    let nparams = 2.min(nvars);
    let flags: Vec<Vec<bool>> =
        (0..nprocs).map(|_| (0..nparams).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let procs = (0..nprocs)
        .map(|i| {
            let budget = proc_size.saturating_sub(2).max(1);
            let body = gen_var_body(&mut rng, budget, 0, nvars, call_density, &flags);
            MiniProc { name: format!("p{i}"), params: flags[i].clone(), nvars, body }
        })
        .collect();
    MiniProgram { procs }
}

fn gen_var_body(
    rng: &mut ChaCha8Rng,
    budget: usize,
    depth: usize,
    nvars: usize,
    call_density: f64,
    flags: &[Vec<bool>],
) -> Vec<Stmt> {
    let mut out = Vec::new();
    let mut left = budget as isize;
    let var = |rng: &mut ChaCha8Rng| rng.gen_range(0..nvars);
    while left > 0 {
        let roll: f64 = rng.gen();
        if roll < call_density {
            let callee = rng.gen_range(0..flags.len());
            // Distinct argument variables, so the entry/exit renamings stay
            // one-to-one on facts.
            let mut pool: Vec<usize> = (0..nvars).collect();
            pool.shuffle(rng);
            let args = flags[callee].iter().zip(pool).map(|(&r, v)| (v, r)).collect();
            out.push(Stmt::Call { callee, args });
            left -= 2;
        } else if roll < call_density + 0.12 && depth < 3 && left > 6 {
            let inner = rng.gen_range(2..=(left as usize).min(14) - 2);
            if rng.gen_bool(0.5) {
                let a = gen_var_body(rng, inner / 2, depth + 1, nvars, call_density, flags);
                let b = gen_var_body(rng, inner - inner / 2, depth + 1, nvars, call_density, flags);
                out.push(Stmt::If(a, b));
            } else {
                out.push(Stmt::While(gen_var_body(rng, inner, depth + 1, nvars, call_density, flags)));
            }
            left -= inner as isize + 2;
        } else {
            let s = match rng.gen_range(0..4) {
                0 => Stmt::Decl(vec![var(rng)]),
                1 | 2 => {
                    let uses = (0..rng.gen_range(0..3usize)).map(|_| var(rng)).collect();
                    Stmt::Assign(var(rng), uses)
                }
                _ => Stmt::Use((0..rng.gen_range(1..3usize)).map(|_| var(rng)).collect()),
            };
            out.push(s);
            left -= 1;
        }
    }
    out
}

fn random_rel(rng: &mut ChaCha8Rng, dsize: usize, p: f64) -> Value {
    let mut rel = vec![json!(["0", "0"])];
    for b in 1..=dsize {
        if rng.gen_bool(p / 2.0) {
            rel.push(json!(["0", format!("x{}", b - 1)]));
        }
        for a in 1..=dsize {
            if rng.gen_bool(p) {
                rel.push(json!([format!("x{}", a - 1), format!("x{}", b - 1)]));
            }
        }
    }
    json!(rel)
}

/// Identity subset: in/out degree of every fact is at most 1.
fn bandwidth1_rel(rng: &mut ChaCha8Rng, dsize: usize) -> Value {
    let mut rel = vec![json!(["0", "0"])];
    for a in 0..dsize {
        if rng.gen_bool(0.75) {
            rel.push(json!([format!("x{a}"), format!("x{a}")]));
        }
    }
    json!(rel)
}

pub fn gen_random(spec: &RandomSpec) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nprocs = (spec.n / spec.proc_size).max(1);
    let procs: Vec<MiniProc> = (0..nprocs)
        .map(|i| {
            let budget = spec.proc_size.saturating_sub(2).max(1);
            MiniProc {
                name: format!("p{i}"),
                params: vec![],
                nvars: 0,
                body: gen_body(&mut rng, budget, 0, nprocs, spec),
            }
        })
        .collect();
    let cfgs = lower(&MiniProgram { procs });
    encode_random(&mut rng, &cfgs, spec)
}

fn encode_random(rng: &mut ChaCha8Rng, cfgs: &[Cfg], spec: &RandomSpec) -> Vec<u8> {
    let mut procedures = Vec::new();
    let mut calls = Vec::new();
    let mut flow = Vec::new();
    for cfg in cfgs {
        let name = |i: usize| cfg.vertex_names[i].clone();
        for &(a, b) in &cfg.edges {
            // The call-to-return edge keeps bandwidth 1 as well; the other
            // intra edges get dense random relations.
            let rel = if matches!(cfg.kind[a], NodeKind::Call(_)) {
                bandwidth1_rel(rng, spec.dsize)
            } else {
                random_rel(rng, spec.dsize, spec.rel_p)
            };
            flow.push(json!({ "from": name(a), "to": name(b), "rel": rel }));
        }
        procedures.push(json!({
            "name": cfg.name,
            "start": name(cfg.start),
            "exit": name(cfg.exit),
            "vertices": cfg.vertex_names,
            "edges": cfg.edges.iter().map(|&(a, b)| json!({"from": name(a), "to": name(b)})).collect::<Vec<_>>(),
        }));
        for c in &cfg.calls {
            calls.push(json!({
                "call": name(c.call),
                "returnSite": name(c.ret),
                "callee": cfgs[c.callee].name,
            }));
            flow.push(json!({
                "from": name(c.call),
                "to": cfgs[c.callee].vertex_names[cfgs[c.callee].start].clone(),
                "rel": bandwidth1_rel(rng, spec.dsize),
            }));
            flow.push(json!({
                "from": cfgs[c.callee].vertex_names[cfgs[c.callee].exit].clone(),
                "to": name(c.ret),
                "rel": bandwidth1_rel(rng, spec.dsize),
            }));
        }
    }
    let domain: Vec<String> = (0..spec.dsize).map(|i| format!("x{i}")).collect();
    serde_json::to_vec_pretty(&json!({
        "domain": domain,
        "procedures": procedures,
        "calls": calls,
        "flow": flow,
    }))
    .unwrap()
}
