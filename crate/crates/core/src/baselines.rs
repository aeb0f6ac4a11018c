//! Reference strategies the tree-indexed engine is measured against. All
//! three share the summarization pass (they query `GHat`), and all produce
//! answers in the same layout as the engine so results compare
//! bit-for-bit.
//!
//! * no-preprocessing: a fresh BFS per query;
//! * complete preprocessing: all-pairs closure tables per procedure,
//!   guarded by a build budget;
//! * on-demand caching: per-source BFS results memoized across queries.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::bits::BitString;
use crate::flow::xid;
use crate::instance::{FactId, Supergraph, VertexId};
use crate::query::{QueryIndex, SourceAnswer};
use crate::summary::{reachable_in_ghat, GHat};

fn xids_of(vis: &BitString) -> impl Iterator<Item = u32> + '_ {
    vis.iter_ones().map(|i| i as u32)
}

// ---------------------------------------------------------------------------
// No preprocessing

pub fn nopp_pair(gh: &GHat, sg: &Supergraph, u: VertexId, d1: FactId, v: VertexId, d2: FactId) -> bool {
    if sg.proc_of(u) != sg.proc_of(v) {
        return false;
    }
    let dstar = gh.dstar();
    reachable_in_ghat(gh, xid(u, d1, dstar)).get(xid(v, d2, dstar) as usize)
}

pub fn nopp_source(gh: &GHat, ix: &QueryIndex, u: VertexId, d1: FactId) -> SourceAnswer {
    let vis = reachable_in_ghat(gh, xid(u, d1, gh.dstar()));
    ix.answer_from_xids(ix.sg.proc_of(u), xids_of(&vis))
}

// ---------------------------------------------------------------------------
// Complete preprocessing

/// All-pairs reachability in GHat: one reachable-set bit string per
/// exploded vertex. Reachability never leaves the source's procedure, so
/// each row only covers that procedure's exploded-id range (the table is
/// still quadratic in procedure size). `build` gives up once `budget`
/// elapses so benchmark runs terminate.
pub struct CppTable {
    dstar: u32,
    /// Per procedure, the first exploded id of its (contiguous) range.
    base: Vec<u32>,
    reach: Vec<BitString>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverBudget {
    pub elapsed: Duration,
    pub done: usize,
    pub total: usize,
}

impl CppTable {
    pub fn build(gh: &GHat, sg: &Supergraph, budget: Duration) -> Result<CppTable, OverBudget> {
        let start = Instant::now();
        let dstar = gh.dstar();
        let nx = gh.vertex_count();
        let base: Vec<u32> = sg
            .procedures
            .iter()
            .map(|p| xid(*p.vertices.iter().min().unwrap(), 0, dstar))
            .collect();
        let span: Vec<usize> = sg.procedures.iter().map(|p| p.vertices.len() * dstar as usize).collect();
        for p in &sg.procedures {
            let (lo, hi) = (p.vertices.iter().min().unwrap(), p.vertices.iter().max().unwrap());
            debug_assert_eq!((hi - lo + 1) as usize, p.vertices.len(), "procedure ids contiguous");
        }
        let mut reach = Vec::with_capacity(nx);
        for x in 0..nx as u32 {
            // Check the clock every few sources, not every bit.
            if x % 64 == 0 && start.elapsed() > budget {
                return Err(OverBudget { elapsed: start.elapsed(), done: x as usize, total: nx });
            }
            let p = sg.proc_of(x / dstar) as usize;
            reach.push(proc_bfs(gh, x, base[p], span[p]));
        }
        Ok(CppTable { dstar, base, reach })
    }

    pub fn pair(&self, sg: &Supergraph, u: VertexId, d1: FactId, v: VertexId, d2: FactId) -> bool {
        if sg.proc_of(u) != sg.proc_of(v) {
            return false;
        }
        let b = self.base[sg.proc_of(u) as usize];
        self.reach[xid(u, d1, self.dstar) as usize].get((xid(v, d2, self.dstar) - b) as usize)
    }

    pub fn source(&self, ix: &QueryIndex, u: VertexId, d1: FactId) -> SourceAnswer {
        let p = ix.sg.proc_of(u);
        let b = self.base[p as usize];
        let vis = &self.reach[xid(u, d1, self.dstar) as usize];
        ix.answer_from_xids(p, vis.iter_ones().map(move |i| i as u32 + b))
    }
}

/// BFS over GHat from `from`, recording visits as offsets into the
/// procedure's exploded-id range `[base, base + span)`.
fn proc_bfs(gh: &GHat, from: u32, base: u32, span: usize) -> BitString {
    let mut vis = BitString::new(span);
    let mut queue = std::collections::VecDeque::new();
    vis.set((from - base) as usize);
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        for &y in gh.successors(x) {
            if !vis.get((y - base) as usize) {
                vis.set((y - base) as usize);
                queue.push_back(y);
            }
        }
    }
    vis
}

// ---------------------------------------------------------------------------
// On-demand caching

/// Memoizes the BFS result per source exploded vertex; never evicts.
/// `bfs_runs` counts actual traversals so tests can observe reuse.
pub struct OdCache<'a> {
    gh: &'a GHat,
    memo: HashMap<u32, BitString>,
    pub bfs_runs: usize,
}

impl<'a> OdCache<'a> {
    pub fn new(gh: &'a GHat) -> Self {
        OdCache { gh, memo: HashMap::new(), bfs_runs: 0 }
    }

    fn reach(&mut self, x: u32) -> &BitString {
        if !self.memo.contains_key(&x) {
            self.bfs_runs += 1;
            let vis = reachable_in_ghat(self.gh, x);
            self.memo.insert(x, vis);
        }
        &self.memo[&x]
    }

    pub fn pair(&mut self, sg: &Supergraph, u: VertexId, d1: FactId, v: VertexId, d2: FactId) -> bool {
        if sg.proc_of(u) != sg.proc_of(v) {
            return false;
        }
        let dstar = self.gh.dstar();
        let xv = xid(v, d2, dstar) as usize;
        self.reach(xid(u, d1, dstar)).get(xv)
    }

    pub fn source(&mut self, ix: &QueryIndex, u: VertexId, d1: FactId) -> SourceAnswer {
        let p = ix.sg.proc_of(u);
        let vis = self.reach(xid(u, d1, self.gh.dstar())).clone();
        ix.answer_from_xids(p, xids_of(&vis))
    }
}
