//! Summary-edge computation: reduces same-context valid-path reachability
//! in the exploded supergraph to plain reachability in `GHat`.
//!
//! A summary edge (c_l, d3) → (r_l, d4) records a same-context valid path
//! through the callee of call site l; a shortcut edge (s_p, d1) → (v, d2)
//! records same-context reachability from a procedure's start vertex. The
//! worklist pass below grows the edge set E′ (intraprocedural ∪ shortcut ∪
//! summary edges) to its fixpoint, then assembles `GHat` as the exploded
//! graph with interprocedural edges dropped and summary edges added.

use std::collections::{HashSet, VecDeque};

use crate::bits::BitString;
use crate::flow::{xid, ExplodedGraph};
use crate::instance::{EdgeKind, Supergraph};

#[derive(Clone, Debug)]
pub struct SummarySet {
    /// Exploded-id pairs ((c_l,d3),(r_l,d4)).
    pub summaries: HashSet<(u32, u32)>,
    /// Exploded-id pairs ((s_p,d1),(v,d2)), including the trivial ones
    /// given directly by intraprocedural edges out of s_p.
    pub shortcuts: HashSet<(u32, u32)>,
}

/// The exploded supergraph after summarization: intraprocedural edges plus
/// summary edges, no interprocedural edges. Local-reachability edges found
/// later are appended into the same adjacency (append-only; published
/// structures never change afterwards).
#[derive(Clone, Debug)]
pub struct GHat {
    dstar: u32,
    adj: Vec<Vec<u32>>,
    edges: HashSet<(u32, u32)>,
}

impl GHat {
    pub fn new(vertex_count: usize, dstar: u32) -> Self {
        GHat { dstar, adj: vec![Vec::new(); vertex_count], edges: HashSet::new() }
    }

    pub fn dstar(&self) -> u32 {
        self.dstar
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn successors(&self, x: u32) -> &[u32] {
        &self.adj[x as usize]
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        self.edges.contains(&(x, y))
    }

    /// Adds an edge unless already present; returns whether it was new.
    pub fn add_edge(&mut self, x: u32, y: u32) -> bool {
        if self.edges.insert((x, y)) {
            self.adj[x as usize].push(y);
            true
        } else {
            false
        }
    }
}

/// Worklist fixpoint over the exploded supergraph. Every popped
/// intraprocedural edge enters E′; shortcut edges are propagated from the
/// procedure start, shortcut-of-shortcut propagation fires when the source
/// is the start vertex, and summary edges are emitted when a shortcut
/// spans start to exit, pairing call-to-start predecessors with matching
/// exit-to-return-site successors.
pub fn compute_summaries(sg: &Supergraph, eg: &ExplodedGraph) -> (SummarySet, GHat) {
    let dstar = eg.dstar();
    let nx = eg.vertex_count();

    // Call-to-start predecessors of each exploded start vertex.
    let mut call_preds: Vec<Vec<u32>> = vec![Vec::new(); nx];
    for x in 0..nx as u32 {
        for &(y, kind) in eg.successors(x) {
            if kind == EdgeKind::CallToStart {
                call_preds[y as usize].push(x);
            }
        }
    }

    // Worklist seeded with the intraprocedural exploded edges; the
    // interprocedural ones would be skipped immediately and only matter
    // through the precomputed `call_preds` / exit successor lookups.
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    for x in 0..nx as u32 {
        for &(y, kind) in eg.successors(x) {
            if !kind.is_interprocedural() && seen.insert((x, y)) {
                queue.push_back((x, y));
            }
        }
    }

    // E′ as adjacency plus, per exploded vertex, the set of start facts d3
    // with a shortcut edge ((s_p,d3), ·) already in E′.
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); nx];
    let mut eprime: HashSet<(u32, u32)> = HashSet::new();
    let mut from_start: Vec<BitString> = vec![BitString::new(dstar as usize); nx];

    let mut summaries: HashSet<(u32, u32)> = HashSet::new();

    while let Some((xu, xv)) = queue.pop_front() {
        if !eprime.insert((xu, xv)) {
            continue;
        }
        succ[xu as usize].push(xv);

        let (u, d1) = (xu / dstar, xu % dstar);
        let v = xv / dstar;
        let p = &sg.procedures[sg.proc_of(u) as usize];
        let s_p = p.start;
        if u == s_p {
            from_start[xv as usize].set(d1 as usize);
        }

        // Extend shortcuts that end at (u,d1) across the new edge.
        let mut d3s: Vec<u32> = from_start[xu as usize].iter_ones().map(|d| d as u32).collect();
        if u == s_p && !d3s.contains(&d1) {
            d3s.push(d1);
        }
        for d3 in d3s {
            let xs = xid(s_p, d3, dstar);
            if !seen.contains(&(xs, xv)) {
                seen.insert((xs, xv));
                queue.push_back((xs, xv));
            }
        }

        // A new shortcut edge also extends across E′ successors of (v,d2).
        if u == s_p {
            let succs = succ[xv as usize].clone();
            for xw in succs {
                if !seen.contains(&(xu, xw)) {
                    seen.insert((xu, xw));
                    queue.push_back((xu, xw));
                }
            }
        }

        // Start-to-exit shortcut: emit summary edges at every call site of
        // this procedure. The summary is recorded even when the same
        // exploded pair already exists as a call-to-return-site edge; the
        // pair is still witnessed through the callee.
        if u == s_p && v == p.exit {
            for &xc in &call_preds[xu as usize] {
                let c_l = xc / dstar;
                let site = sg.call_site_at(c_l).expect("call-to-start source is a call vertex");
                if site.callee != sg.proc_of(u) {
                    continue;
                }
                for &(xr, kind) in eg.successors(xv) {
                    if kind == EdgeKind::ExitToReturn && xr / dstar == site.return_site {
                        summaries.insert((xc, xr));
                        if !seen.contains(&(xc, xr)) {
                            seen.insert((xc, xr));
                            queue.push_back((xc, xr));
                        }
                    }
                }
            }
        }
    }

    // Shortcuts are exactly the E′ edges leaving a start vertex.
    let mut shortcuts: HashSet<(u32, u32)> = HashSet::new();
    for p in &sg.procedures {
        for d in 0..dstar {
            let xs = xid(p.start, d, dstar);
            for &xv in &succ[xs as usize] {
                shortcuts.insert((xs, xv));
            }
        }
    }

    // GHat: intraprocedural exploded edges plus summaries.
    let mut gh = GHat::new(nx, dstar);
    for x in 0..nx as u32 {
        for &(y, kind) in eg.successors(x) {
            if !kind.is_interprocedural() {
                gh.add_edge(x, y);
            }
        }
    }
    for &(x, y) in &summaries {
        gh.add_edge(x, y);
    }

    (SummarySet { summaries, shortcuts }, gh)
}

/// Forward BFS within GHat; the result never leaves the source's procedure
/// because GHat has no interprocedural edges.
pub fn reachable_in_ghat(gh: &GHat, from: u32) -> BitString {
    let mut vis = BitString::new(gh.vertex_count());
    let mut queue = VecDeque::new();
    vis.set(from as usize);
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        for &y in gh.successors(x) {
            if !vis.get(y as usize) {
                vis.set(y as usize);
                queue.push_back(y);
            }
        }
    }
    vis
}

/// Text dump of the summary set, one line `summary c_l d3 r_l d4` per
/// edge, sorted, with vertex and fact names resolved.
pub fn dump_summaries(sg: &Supergraph, dom: &crate::flow::FactDomain, s: &SummarySet) -> String {
    let dstar = dom.dstar();
    let mut lines: Vec<String> = s
        .summaries
        .iter()
        .map(|&(xc, xr)| {
            let (c, d3) = (xc / dstar, xc % dstar);
            let (r, d4) = (xr / dstar, xr % dstar);
            format!(
                "summary {} {} {} {}",
                sg.vertex_name(c),
                dom.name_of(d3),
                sg.vertex_name(r),
                dom.name_of(d4)
            )
        })
        .collect();
    lines.sort();
    lines.join("\n")
}

/// Loop-trip accounting for the summary-emission pairing under the
/// bounded-bandwidth assumption; exposed for tests.
pub fn summary_pairing_trips(sg: &Supergraph, eg: &ExplodedGraph, xu: u32, xv: u32) -> usize {
    let dstar = eg.dstar();
    let mut trips = 0;
    let u = xu / dstar;
    for x in 0..eg.vertex_count() as u32 {
        for &(y, kind) in eg.successors(x) {
            if kind == EdgeKind::CallToStart && y == xu {
                let c_l = x / dstar;
                if let Some(site) = sg.call_site_at(c_l) {
                    if site.callee == sg.proc_of(u) {
                        for &(r, k2) in eg.successors(xv) {
                            if k2 == EdgeKind::ExitToReturn && r / dstar == site.return_site {
                                trips += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    trips
}
