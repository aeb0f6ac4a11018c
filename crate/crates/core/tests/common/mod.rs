//! Shared test support: a random instance generator and independent
//! reference implementations (naive fixpoint over the exploded
//! supergraph, stack-walk path sampling, set-based index references)
//! that the engine is checked against.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ifds_core::bits::BitString;
use ifds_core::flow::{xid, ExplodedGraph, FactDomain, RelationTable};
use ifds_core::instance::{EdgeKind, Supergraph, VertexId};

// ---------------------------------------------------------------------------
// Random instance generation

pub struct GenCfg {
    pub nprocs: usize,
    /// Vertices per procedure (inclusive range).
    pub verts: (usize, usize),
    pub dsize: usize,
    /// Extra intraprocedural edges per procedure beyond the spine chain.
    pub extra_edges: usize,
    /// Call sites per procedure (best effort; capped by chain length).
    pub calls: usize,
    /// Probability of including each candidate relation pair.
    pub rel_p: f64,
}

impl GenCfg {
    pub fn small() -> Self {
        GenCfg { nprocs: 3, verts: (4, 13), dsize: 3, extra_edges: 6, calls: 2, rel_p: 0.35 }
    }
}

/// Deterministic random instance as JSON bytes. Each procedure is a chain
/// v0 → … → v_{m-1} (so start reaches everything and everything reaches
/// exit) plus random extra edges; call sites replace chain edges, which
/// keeps the call-to-return edge the return site's only intra in-edge.
pub fn gen_instance(seed: u64, cfg: &GenCfg) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let facts: Vec<String> = (0..cfg.dsize).map(|i| format!("f{i}")).collect();

    let mut procedures = Vec::new();
    let mut calls = Vec::new();
    let mut flow = Vec::new();
    let mut sizes = Vec::new();
    for p in 0..cfg.nprocs {
        sizes.push(rng.gen_range(cfg.verts.0..=cfg.verts.1).max(2));
        let _ = p;
    }

    let rel_pairs = |rng: &mut ChaCha8Rng| {
        let mut rel = vec![("0".to_string(), "0".to_string())];
        for b in 0..cfg.dsize {
            if rng.gen_bool(cfg.rel_p / 2.0) {
                rel.push(("0".to_string(), facts[b].clone()));
            }
            for a in 0..cfg.dsize {
                if rng.gen_bool(cfg.rel_p) {
                    rel.push((facts[a].clone(), facts[b].clone()));
                }
            }
        }
        rel
    };

    for p in 0..cfg.nprocs {
        let m = sizes[p];
        let name = |j: usize| format!("p{p}_v{j}");
        let vertices: Vec<String> = (0..m).map(name).collect();
        let mut edges: Vec<(usize, usize)> = (0..m - 1).map(|j| (j, j + 1)).collect();

        // Call sites on interior chain edges, each vertex used once.
        let mut used: HashSet<usize> = HashSet::new();
        let mut return_sites: HashSet<usize> = HashSet::new();
        let mut cands: Vec<usize> = (1..m.saturating_sub(2)).collect();
        cands.shuffle(&mut rng);
        for &j in cands.iter() {
            if calls.len() >= (p + 1) * cfg.calls {
                break;
            }
            if used.contains(&j) || used.contains(&(j + 1)) {
                continue;
            }
            used.insert(j);
            used.insert(j + 1);
            return_sites.insert(j + 1);
            let callee = rng.gen_range(0..cfg.nprocs);
            calls.push(json!({
                "call": name(j),
                "returnSite": name(j + 1),
                "callee": format!("proc{callee}"),
            }));
        }
        let call_vertices: HashSet<usize> =
            used.iter().copied().filter(|j| !return_sites.contains(j)).collect();

        // Extra edges: never into a return site, never out of a call vertex.
        for _ in 0..cfg.extra_edges {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            if a == b || call_vertices.contains(&a) || return_sites.contains(&b) {
                continue;
            }
            if !edges.contains(&(a, b)) {
                edges.push((a, b));
            }
        }

        for &(a, b) in &edges {
            flow.push(json!({ "from": name(a), "to": name(b), "rel": rel_pairs(&mut rng) }));
        }
        procedures.push(json!({
            "name": format!("proc{p}"),
            "start": name(0),
            "exit": name(m - 1),
            "vertices": vertices,
            "edges": edges.iter().map(|&(a, b)| json!({ "from": name(a), "to": name(b) })).collect::<Vec<_>>(),
        }));
    }

    // Relations for the derived interprocedural edges.
    for c in &calls {
        let callee: usize = c["callee"].as_str().unwrap()[4..].parse().unwrap();
        let callee_start = format!("p{callee}_v0");
        let callee_exit = format!("p{callee}_v{}", sizes[callee] - 1);
        flow.push(json!({ "from": c["call"], "to": callee_start, "rel": rel_pairs(&mut rng) }));
        flow.push(json!({ "from": callee_exit, "to": c["returnSite"], "rel": rel_pairs(&mut rng) }));
    }

    serde_json::to_vec_pretty(&json!({
        "domain": facts,
        "procedures": procedures,
        "calls": calls,
        "flow": flow,
    }))
    .unwrap()
}

// ---------------------------------------------------------------------------
// Naive same-context fixpoint (independent of the worklist summarizer)

/// Same-context reachability for every exploded vertex, computed by a
/// grammar-style fixpoint directly on the exploded supergraph: close over
/// intraprocedural edges, derive call/return-matched summary pairs from
/// start-to-exit reachability, repeat until stable.
pub fn naive_same_context(sg: &Supergraph, eg: &ExplodedGraph) -> Vec<BitString> {
    let dstar = eg.dstar();
    let nx = eg.vertex_count();
    let mut summaries: HashSet<(u32, u32)> = HashSet::new();
    loop {
        // Adjacency: intraprocedural exploded edges plus current summaries.
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nx];
        for x in 0..nx as u32 {
            for &(y, kind) in eg.successors(x) {
                if !kind.is_interprocedural() {
                    adj[x as usize].push(y);
                }
            }
        }
        for &(x, y) in &summaries {
            adj[x as usize].push(y);
        }
        let reach: Vec<BitString> = (0..nx as u32).map(|x| bfs(&adj, x, nx)).collect();

        let mut grew = false;
        for x in 0..nx as u32 {
            for &(y, kind) in eg.successors(x) {
                if kind != EdgeKind::CallToStart {
                    continue;
                }
                let site = sg.call_site_at(x / dstar).unwrap();
                let callee = &sg.procedures[site.callee as usize];
                for d2 in 0..dstar {
                    let xe = xid(callee.exit, d2, dstar);
                    if !reach[y as usize].get(xe as usize) {
                        continue;
                    }
                    for &(xr, k2) in eg.successors(xe) {
                        if k2 == EdgeKind::ExitToReturn
                            && xr / dstar == site.return_site
                            && summaries.insert((x, xr))
                        {
                            grew = true;
                        }
                    }
                }
            }
        }
        if !grew {
            return reach;
        }
    }
}

fn bfs(adj: &[Vec<u32>], from: u32, nx: usize) -> BitString {
    let mut vis = BitString::new(nx);
    let mut queue = std::collections::VecDeque::new();
    vis.set(from as usize);
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x as usize] {
            if !vis.get(y as usize) {
                vis.set(y as usize);
                queue.push_back(y);
            }
        }
    }
    vis
}

// ---------------------------------------------------------------------------
// Stack-walk sampling

/// Random walks over the exploded supergraph keeping a call stack; every
/// prefix whose stack is back to empty ends a same-context valid path, so
/// the returned (source, target) pairs must all be answered positively.
pub fn sample_valid_paths(
    sg: &Supergraph,
    eg: &ExplodedGraph,
    rng: &mut ChaCha8Rng,
    walks: usize,
    max_steps: usize,
) -> Vec<(u32, u32)> {
    let dstar = eg.dstar();
    let nx = eg.vertex_count() as u32;
    let mut pairs = Vec::new();
    for _ in 0..walks {
        let origin = rng.gen_range(0..nx);
        let mut cur = origin;
        let mut stack: Vec<VertexId> = Vec::new();
        for _ in 0..max_steps {
            let succs = eg.successors(cur);
            if succs.is_empty() {
                break;
            }
            let &(next, kind) = &succs[rng.gen_range(0..succs.len())];
            match kind {
                EdgeKind::CallToStart => stack.push(cur / dstar),
                EdgeKind::ExitToReturn => {
                    // Only a return matching the pending call keeps the
                    // path valid; an empty stack would leave the origin's
                    // context, so stop the walk instead.
                    match stack.last() {
                        Some(&c) => {
                            let site = sg.call_site_at(c).unwrap();
                            if next / dstar != site.return_site {
                                continue;
                            }
                            stack.pop();
                        }
                        None => break,
                    }
                }
                _ => {}
            }
            cur = next;
            if stack.is_empty() {
                pairs.push((origin, cur));
            }
        }
    }
    pairs
}

// ---------------------------------------------------------------------------
// Convenience

pub fn parse(bytes: &[u8]) -> (Supergraph, FactDomain, RelationTable) {
    ifds_core::instance::parse_instance(bytes).expect("generated instance parses")
}
