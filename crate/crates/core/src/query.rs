//! The on-demand query engine: builds the immutable `QueryIndex` from a
//! parsed instance and answers pair / single-source queries over it,
//! sequentially or with a bounded set of worker threads per query.

use std::collections::HashMap;

use crate::bits::{BitString, WORD_BITS};
use crate::flow::{build_exploded, xid, FactDomain, RelationTable};
use crate::instance::{FactId, ProcId, Supergraph, VertexId};
use crate::reach::{
    compute_ancestors, compute_descendants, compute_local, AncestorSets, DescendantSets, LocalIndex,
};
use crate::summary::{compute_summaries, GHat, SummarySet};
use crate::tree::{balance_binarize, decompose, TreeLayout};

/// Everything needed to answer queries; immutable and shareable across
/// threads once built.
pub struct QueryIndex {
    pub sg: Supergraph,
    pub dom: FactDomain,
    /// Kept for re-serialization and for baselines run from a stored index.
    pub rels: RelationTable,
    pub layouts: Vec<TreeLayout>,
    pub anc: AncestorSets,
    pub desc: DescendantSets,
}

/// Construction metrics reported by `build_index`.
#[derive(Clone, Debug, Default)]
pub struct BuildStats {
    /// Per procedure: width of the raw decomposition.
    pub raw_widths: Vec<usize>,
    /// Per procedure: width after balancing (≤ 4·raw + 3).
    pub balanced_widths: Vec<usize>,
    /// Per procedure: height and bag count after balancing.
    pub heights: Vec<u32>,
    pub bag_counts: Vec<usize>,
    pub summary_count: usize,
    /// Raw widths exceeding the configured cap (guarantees degrade,
    /// correctness does not).
    pub width_cap_exceeded: Vec<ProcId>,
}

pub fn build_index(
    sg: Supergraph,
    dom: FactDomain,
    rels: RelationTable,
    width_cap: usize,
) -> (QueryIndex, BuildStats, SummarySet, GHat) {
    let eg = build_exploded(&sg, &dom, &rels);
    let (summaries, gh) = compute_summaries(&sg, &eg);
    let dstar = dom.dstar();

    let mut stats = BuildStats { summary_count: summaries.summaries.len(), ..Default::default() };
    let mut layouts = Vec::with_capacity(sg.procedures.len());
    for (pi, p) in sg.procedures.iter().enumerate() {
        let raw = decompose(&p.vertices, &p.intra_edges);
        if raw.width > width_cap {
            stats.width_cap_exceeded.push(pi as ProcId);
        }
        let balanced = balance_binarize(&raw);
        stats.raw_widths.push(raw.width);
        stats.balanced_widths.push(balanced.width);
        stats.heights.push(balanced.height());
        stats.bag_counts.push(balanced.bag_count());
        layouts.push(TreeLayout::build(balanced));
    }

    let locals: Vec<LocalIndex> = layouts.iter().map(|l| compute_local(&gh, l)).collect();
    let nx = gh.vertex_count();
    let mut anc = AncestorSets::empty(nx, dstar);
    compute_ancestors(&layouts, &locals, dstar, &mut anc);
    let mut desc = DescendantSets::empty(nx, dstar);
    compute_descendants(&layouts, &locals, dstar, &mut desc);

    (QueryIndex { sg, dom, rels, layouts, anc, desc }, stats, summaries, gh)
}

// ---------------------------------------------------------------------------
// Pair queries

struct PairSlices {
    off_u: usize,
    off_v: usize,
    len: usize,
}

impl QueryIndex {
    pub fn dstar(&self) -> u32 {
        self.dom.dstar()
    }

    /// The aligned LCA-bag segments of the forward string of (u,d1) and
    /// the backward string of (v,d2); None when u, v live in different
    /// procedures.
    fn pair_slices(&self, u: VertexId, v: VertexId) -> Option<PairSlices> {
        let pu = self.sg.proc_of(u);
        if pu != self.sg.proc_of(v) {
            return None;
        }
        let layout = &self.layouts[pu as usize];
        let dstar = self.dstar() as usize;
        let bu = layout.root_bag[&u] as usize;
        let bv = layout.root_bag[&v] as usize;
        let b = layout.lca.lca(bu as u32, bv as u32) as usize;
        let jd = layout.td.bags[b].depth as usize;
        Some(PairSlices {
            off_u: layout.seg_off[bu][jd] * dstar,
            off_v: layout.seg_off[bv][jd] * dstar,
            len: layout.td.bags[b].vertices.len() * dstar,
        })
    }

    /// Whether a same-context valid path leads from (u, d1) to (v, d2).
    pub fn pair_query(&self, u: VertexId, d1: FactId, v: VertexId, d2: FactId) -> bool {
        let Some(s) = self.pair_slices(u, v) else { return false };
        let dstar = self.dstar();
        let xu = xid(u, d1, dstar) as usize;
        let xv = xid(v, d2, dstar) as usize;
        self.anc.fwd[xu].range_and_nonzero(s.off_u, &self.anc.bwd[xv], s.off_v, s.len)
    }

    /// Same answer as `pair_query`; the AND scan over the LCA-bag segment
    /// is partitioned word-wise across `k` workers.
    pub fn pair_query_parallel(&self, u: VertexId, d1: FactId, v: VertexId, d2: FactId, k: usize) -> bool {
        if k <= 1 {
            return self.pair_query(u, d1, v, d2);
        }
        let Some(s) = self.pair_slices(u, v) else { return false };
        let dstar = self.dstar();
        let fwd = &self.anc.fwd[xid(u, d1, dstar) as usize];
        let bwd = &self.anc.bwd[xid(v, d2, dstar) as usize];
        let nwords = s.len.div_ceil(WORD_BITS);
        let per = nwords.div_ceil(k);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..k {
                let lo = t * per;
                let hi = ((t + 1) * per).min(nwords);
                if lo >= hi {
                    break;
                }
                handles.push(scope.spawn(move || {
                    fwd.range_and_nonzero_words(s.off_u, bwd, s.off_v, s.len, lo, hi)
                }));
            }
            handles.into_iter().any(|h| h.join().unwrap())
        })
    }
}

// ---------------------------------------------------------------------------
// Single-source queries

/// Answer to a single-source query: one bit per (vertex, fact) of the
/// source's procedure, laid out as (procedure vertex order × fact order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceAnswer {
    pub proc: ProcId,
    pub dstar: u32,
    pub bits: BitString,
}

impl SourceAnswer {
    pub fn get(&self, local_vertex: usize, d: FactId) -> bool {
        self.bits.get(local_vertex * self.dstar as usize + d as usize)
    }

    /// Hex dump, low bit first within each byte, for the CLI output.
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for w in self.bits.words() {
            for byte in w.to_le_bytes() {
                s.push_str(&format!("{byte:02x}"));
            }
        }
        let nbytes = self.bits.len().div_ceil(8);
        s.truncate(nbytes * 2);
        s
    }
}

impl QueryIndex {
    /// All exploded vertices (w, d2) that are ancestor-reachable from x,
    /// collected bag segment by bag segment from rootbag(u) upward.
    fn anc_hits(&self, layout: &TreeLayout, x: u32) -> Vec<u32> {
        let dstar = self.dstar();
        let u = x / dstar;
        let s = &self.anc.fwd[x as usize];
        let rb = layout.root_bag[&u] as usize;
        let mut hits = Vec::new();
        let mut b = rb;
        loop {
            let jd = layout.td.bags[b].depth as usize;
            let off = layout.seg_off[rb][jd] * dstar as usize;
            for (bi, &w) in layout.td.bags[b].vertices.iter().enumerate() {
                for d2 in 0..dstar {
                    if s.get(off + bi * dstar as usize + d2 as usize) {
                        hits.push(xid(w, d2, dstar));
                    }
                }
            }
            match layout.td.bags[b].parent {
                Some(p) => b = p as usize,
                None => break,
            }
        }
        hits
    }

    fn or_desc_into(&self, layout: &TreeLayout, a: &mut BitString, wx: u32) {
        let dstar = self.dstar() as usize;
        let w = wx / self.dstar();
        let base = layout.subtree_start[layout.root_bag[&w] as usize] * dstar;
        a.set(layout.pre_pos[&w] * dstar + (wx % self.dstar()) as usize);
        a.or_shifted(&self.desc.fwd[wx as usize], base);
    }

    /// All (v, d2) same-context reachable from (u, d1): the descendant
    /// string of the source plus, for every ancestor-bag hit (w, d2), that
    /// hit and its descendant string, all aligned into one pre-order
    /// answer, finally permuted into procedure vertex order.
    pub fn source_query(&self, u: VertexId, d1: FactId) -> SourceAnswer {
        let p = self.sg.proc_of(u);
        let layout = &self.layouts[p as usize];
        let dstar = self.dstar();
        let x = xid(u, d1, dstar);
        let nbits = self.sg.procedures[p as usize].vertices.len() * dstar as usize;
        let mut a = BitString::new(nbits);
        self.or_desc_into(layout, &mut a, x);
        for wx in self.anc_hits(layout, x) {
            self.or_desc_into(layout, &mut a, wx);
        }
        self.permute_answer(p, a)
    }

    fn permute_answer(&self, p: ProcId, a: BitString) -> SourceAnswer {
        let dstar = self.dstar() as usize;
        let layout = &self.layouts[p as usize];
        let proc = &self.sg.procedures[p as usize];
        let mut bits = BitString::new(a.len());
        for (li, &v) in proc.vertices.iter().enumerate() {
            let pp = layout.pre_pos[&v];
            for d in 0..dstar {
                if a.get(pp * dstar + d) {
                    bits.set(li * dstar + d);
                }
            }
        }
        SourceAnswer { proc: p, dstar: dstar as u32, bits }
    }

    /// Equal to `source_query`; the OR work (one task per ancestor hit) is
    /// split across `k` workers, each building a private partial answer,
    /// merged at the end. Bit-identical to the sequential result.
    pub fn source_query_parallel(&self, u: VertexId, d1: FactId, k: usize) -> SourceAnswer {
        if k <= 1 {
            return self.source_query(u, d1);
        }
        let p = self.sg.proc_of(u);
        let layout = &self.layouts[p as usize];
        let dstar = self.dstar();
        let x = xid(u, d1, dstar);
        let nbits = self.sg.procedures[p as usize].vertices.len() * dstar as usize;
        let mut tasks = vec![x];
        tasks.extend(self.anc_hits(layout, x));
        let per = tasks.len().div_ceil(k);
        let mut a = BitString::new(nbits);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in tasks.chunks(per.max(1)) {
                handles.push(scope.spawn(move || {
                    let mut part = BitString::new(nbits);
                    for &wx in chunk {
                        self.or_desc_into(layout, &mut part, wx);
                    }
                    part
                }));
            }
            for h in handles {
                a.or_assign(&h.join().unwrap());
            }
        });
        self.permute_answer(p, a)
    }

    /// Answers a batch of single-source queries with `k` worker threads,
    /// splitting the queries across workers. Answer order matches the
    /// query order.
    pub fn source_query_batch(&self, queries: &[(VertexId, FactId)], k: usize) -> Vec<SourceAnswer> {
        if k <= 1 {
            return queries.iter().map(|&(u, d)| self.source_query(u, d)).collect();
        }
        let per = queries.len().div_ceil(k).max(1);
        std::thread::scope(|scope| {
            let handles: Vec<_> = queries
                .chunks(per)
                .map(|chunk| {
                    scope.spawn(move || {
                        chunk.iter().map(|&(u, d)| self.source_query(u, d)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        })
    }

    /// Builds a `SourceAnswer` in the engine's layout from a set of
    /// reachable exploded ids (used by the baselines so answers compare
    /// bit-for-bit).
    pub fn answer_from_xids(&self, p: ProcId, xids: impl Iterator<Item = u32>) -> SourceAnswer {
        let dstar = self.dstar() as usize;
        let proc = &self.sg.procedures[p as usize];
        let local: HashMap<VertexId, usize> =
            proc.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut bits = BitString::new(proc.vertices.len() * dstar);
        for x in xids {
            let v = x / dstar as u32;
            let d = (x % dstar as u32) as usize;
            bits.set(local[&v] * dstar + d);
        }
        SourceAnswer { proc: p, dstar: dstar as u32, bits }
    }
}
