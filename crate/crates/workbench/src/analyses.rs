//! Encodes five classical data-flow analyses over the mini-IR as instance
//! files: plain reachability, possibly-uninitialized variables, simple
//! uninitialized variables, liveness (over the reversed flow graphs), and
//! per-variable reaching definitions. Fact `x{i}` refers to local
//! variable `i` of whichever procedure the vertex belongs to; call edges
//! translate between caller argument and callee parameter indices. See
//! docs/analyses.md for the exact transfer rules.

use serde_json::{json, Value};

use crate::mini::{lower, Cfg, MiniProc, MiniProgram, NodeKind, Stmt};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisKind {
    Reach,
    PossUninit,
    SimpUninit,
    Live,
    ReachDefs,
}

impl AnalysisKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "reach" => AnalysisKind::Reach,
            "poss-uninit" => AnalysisKind::PossUninit,
            "simp-uninit" => AnalysisKind::SimpUninit,
            "live" => AnalysisKind::Live,
            "reach-defs" => AnalysisKind::ReachDefs,
            _ => return None,
        })
    }
}

type Rel = Vec<(String, String)>;

fn fact(i: usize) -> String {
    format!("x{i}")
}

fn rel_json(rel: &Rel) -> Value {
    json!(rel.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>())
}

/// {(0,0)} ∪ {(0,g)} ∪ {(a,a) | a ∉ kill}, over k variable facts.
fn gen_kill(k: usize, gen: &[usize], kill: &[usize]) -> Rel {
    let mut rel = vec![("0".into(), "0".into())];
    for &g in gen {
        rel.push(("0".into(), fact(g)));
    }
    for a in 0..k {
        if !kill.contains(&a) {
            rel.push((fact(a), fact(a)));
        }
    }
    rel
}

fn identity(k: usize) -> Rel {
    gen_kill(k, &[], &[])
}

/// Forward transfer of the statement at vertex `u`, attached to u's
/// outgoing intraprocedural edges.
fn forward_rel(kind: AnalysisKind, cfg: &Cfg, u: usize, k: usize) -> Rel {
    use AnalysisKind::*;
    match (&cfg.kind[u], kind) {
        (_, Reach) => vec![("0".into(), "0".into())],
        (NodeKind::Decl(xs), PossUninit | SimpUninit) => gen_kill(k, xs, &[]),
        (NodeKind::Assign(x, uses), PossUninit) => {
            if uses.is_empty() {
                gen_kill(k, &[], &[*x])
            } else {
                // x is uninitialized iff one of its operands is.
                let mut rel = gen_kill(k, &[], &[*x]);
                for &u2 in uses {
                    rel.push((fact(u2), fact(*x)));
                }
                rel
            }
        }
        (NodeKind::Assign(x, _), SimpUninit) => gen_kill(k, &[], &[*x]),
        (NodeKind::Call(ci), PossUninit | SimpUninit) => {
            // Call-to-return edge: by-reference arguments are rewritten by
            // the callee, so their caller facts do not survive locally.
            let by_ref: Vec<usize> =
                cfg.calls[*ci].args.iter().filter(|(_, r)| *r).map(|(a, _)| *a).collect();
            gen_kill(k, &[], &by_ref)
        }
        (_, PossUninit | SimpUninit) => identity(k),
        (NodeKind::Decl(xs), ReachDefs) => gen_kill(k, &[], xs),
        (NodeKind::Assign(x, _), ReachDefs) => gen_kill(k, &[*x], &[]),
        (_, ReachDefs) => identity(k),
        (_, Live) => unreachable!("liveness uses backward_rel"),
    }
}

/// Backward (liveness) transfer of the statement at vertex `u`, attached
/// to the reversed edges ending at `u`.
fn backward_rel(cfg: &Cfg, u: usize, k: usize) -> Rel {
    match &cfg.kind[u] {
        NodeKind::Use(xs) => gen_kill(k, xs, &[]),
        NodeKind::Assign(x, uses) => gen_kill(k, uses, &[*x]),
        NodeKind::Decl(xs) => gen_kill(k, &[], xs),
        NodeKind::Ret(ci) => {
            // Reversed call-to-return edge: the call reads its arguments.
            let args: Vec<usize> = cfg.calls[*ci].args.iter().map(|(a, _)| *a).collect();
            gen_kill(k, &args, &[])
        }
        _ => identity(k),
    }
}

/// The instance file for `kind` over `prog`, as pretty-printed JSON.
pub fn gen_analysis(prog: &MiniProgram, kind: AnalysisKind) -> Vec<u8> {
    let cfgs = lower(prog);
    let k = if kind == AnalysisKind::Reach {
        0
    } else {
        cfgs.iter().map(|c| c.nvars).max().unwrap_or(0)
    };
    let backward = kind == AnalysisKind::Live;

    let mut procedures = Vec::new();
    let mut calls = Vec::new();
    let mut flow = Vec::new();

    for cfg in &cfgs {
        let name = |i: usize| cfg.vertex_names[i].clone();
        let (start, exit) =
            if backward { (cfg.exit, cfg.start) } else { (cfg.start, cfg.exit) };
        let edges: Vec<(usize, usize)> = if backward {
            cfg.edges.iter().map(|&(a, b)| (b, a)).collect()
        } else {
            cfg.edges.clone()
        };
        for &(a, b) in &edges {
            let rel = if backward { backward_rel(cfg, b, k) } else { forward_rel(kind, cfg, a, k) };
            flow.push(json!({ "from": name(a), "to": name(b), "rel": rel_json(&rel) }));
        }
        procedures.push(json!({
            "name": cfg.name,
            "start": name(start),
            "exit": name(exit),
            "vertices": cfg.vertex_names,
            "edges": edges.iter().map(|&(a, b)| json!({"from": name(a), "to": name(b)})).collect::<Vec<_>>(),
        }));
        for c in &cfg.calls {
            let (cv, rv) = if backward { (c.ret, c.call) } else { (c.call, c.ret) };
            calls.push(json!({
                "call": name(cv),
                "returnSite": name(rv),
                "callee": cfgs[c.callee].name,
            }));
        }
    }

    // Interprocedural relations: positional argument/parameter binding.
    for cfg in &cfgs {
        for c in &cfg.calls {
            let callee = &cfgs[c.callee];
            let name = |i: usize| cfg.vertex_names[i].clone();
            let cname = |i: usize| callee.vertex_names[i].clone();
            let mut into = vec![("0".to_string(), "0".to_string())];
            let mut back = vec![("0".to_string(), "0".to_string())];
            match kind {
                AnalysisKind::Reach => {}
                AnalysisKind::PossUninit | AnalysisKind::SimpUninit => {
                    // Facts of all arguments flow in; by-reference
                    // parameters flow back out.
                    for (j, &(a, by_ref)) in c.args.iter().enumerate() {
                        into.push((fact(a), fact(j)));
                        if by_ref {
                            back.push((fact(j), fact(a)));
                        }
                    }
                }
                AnalysisKind::ReachDefs => {
                    for (j, &(a, by_ref)) in c.args.iter().enumerate() {
                        into.push((fact(a), fact(j)));
                        if by_ref {
                            back.push((fact(j), fact(a)));
                        }
                    }
                }
                AnalysisKind::Live => {
                    // Reversed: liveness of by-reference arguments after
                    // the call flows into the callee (at its exit); live
                    // parameters at the callee entry make the arguments
                    // live before the call.
                    for (j, &(a, by_ref)) in c.args.iter().enumerate() {
                        if by_ref {
                            into.push((fact(a), fact(j)));
                        }
                        back.push((fact(j), fact(a)));
                    }
                }
            }
            let (call_v, ret_v) = if backward { (c.ret, c.call) } else { (c.call, c.ret) };
            let (callee_start, callee_exit) =
                if backward { (callee.exit, callee.start) } else { (callee.start, callee.exit) };
            flow.push(json!({ "from": name(call_v), "to": cname(callee_start), "rel": rel_json(&into) }));
            flow.push(json!({ "from": cname(callee_exit), "to": name(ret_v), "rel": rel_json(&back) }));
        }
    }

    let domain: Vec<String> = (0..k).map(fact).collect();
    serde_json::to_vec_pretty(&json!({
        "domain": domain,
        "procedures": procedures,
        "calls": calls,
        "flow": flow,
    }))
    .unwrap()
}

/// The canonical two-procedure example: `f(int*& x, int* y)` that only
/// initializes its local `y`, and `main` declaring two pointers, calling
/// `f(x, y)` and then using both. Under `PossUninit` its exploded graph
/// matches the handcrafted nullness fixture edge for edge.
pub fn fig_program() -> MiniProgram {
    MiniProgram {
        procs: vec![
            MiniProc {
                name: "f".into(),
                params: vec![true, false],
                nvars: 2,
                body: vec![Stmt::Assign(1, vec![]), Stmt::Assign(1, vec![])],
            },
            MiniProc {
                name: "main".into(),
                params: vec![],
                nvars: 2,
                body: vec![
                    Stmt::Decl(vec![0, 1]),
                    Stmt::Call { callee: 0, args: vec![(0, true), (1, false)] },
                    Stmt::Use(vec![0, 1]),
                ],
            },
        ],
    }
}
