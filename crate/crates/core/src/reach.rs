//! Reachability indices over `GHat`, per procedure:
//!
//! * local: for every bag, the full reachability closure among the
//!   exploded vertices of that bag (kernelization by leaf peeling — a
//!   down pass propagates separator closures towards the root, an up pass
//!   propagates them back, after which every co-bagged reachable pair is
//!   recorded in its bag's closure matrix);
//! * ancestors: for every exploded vertex, bit strings F / F′ over the
//!   vertices of its root bag's ancestors, giving forward / backward
//!   reachability into each ancestor bag (one segment per ancestor, own
//!   bag first);
//! * descendants: for every exploded vertex (u, d), a bit string over the
//!   pre-order index range of rootbag(u)'s subtree, giving reachability
//!   via paths that stay below rootbag(u).
//!
//! All strings are packed so the query engine works with whole-word AND /
//! OR / shift operations only.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::flow::xid;
use crate::instance::VertexId;
use crate::summary::GHat;
use crate::tree::TreeLayout;

/// Reachability closure among one bag's exploded vertices. Row/column
/// index is `pos_in_bag(u) * |D*| + d`; the closure is reflexive.
#[derive(Clone, Debug)]
pub struct BagClosure {
    pub k: usize,
    pub rows: Vec<BitString>,
}

impl BagClosure {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }
}

/// Final per-bag closures of one procedure's tree decomposition.
#[derive(Clone, Debug)]
pub struct LocalIndex {
    pub per_bag: Vec<BagClosure>,
}

fn bag_xids(layout: &TreeLayout, b: usize, dstar: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for &v in &layout.td.bags[b].vertices {
        for d in 0..dstar {
            out.push(xid(v, d, dstar));
        }
    }
    out
}

/// Reflexive transitive closure of `rows` in place (Warshall with bitset
/// rows).
fn close(rows: &mut [BitString]) {
    let k = rows.len();
    for i in 0..k {
        rows[i].set(i);
    }
    for j in 0..k {
        let rj = rows[j].clone();
        for i in 0..k {
            if i != j && rows[i].get(j) {
                rows[i].or_assign(&rj);
            }
        }
    }
}

/// Computes the per-bag reachability closures for one procedure.
///
/// Bags are peeled in decreasing-depth order (each is a leaf of the
/// remaining tree): the down pass closes each bag over its direct `GHat`
/// edges plus the closures its children left on the shared separator, and
/// forwards its own separator closure to the parent. The up pass walks
/// back root-to-leaf, importing the parent's final closure on the shared
/// vertices, after which each bag's closure is exactly co-bagged
/// reachability in `GHat`.
pub fn compute_local(gh: &GHat, layout: &TreeLayout) -> LocalIndex {
    let dstar = gh.dstar();
    let nb = layout.td.bags.len();
    let mut order: Vec<usize> = (0..nb).collect();
    order.sort_by_key(|&b| std::cmp::Reverse(layout.td.bags[b].depth));

    let mut mats: Vec<Option<BagClosure>> = vec![None; nb];
    let mut extra: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nb];

    let locate = |b: usize| -> (Vec<u32>, HashMap<u32, usize>) {
        let xids = bag_xids(layout, b, dstar);
        let pos: HashMap<u32, usize> = xids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        (xids, pos)
    };

    // Down pass.
    for &b in &order {
        let (xids, pos) = locate(b);
        let k = xids.len();
        let mut rows: Vec<BitString> = vec![BitString::new(k); k];
        for (i, &x) in xids.iter().enumerate() {
            for &y in gh.successors(x) {
                if let Some(&j) = pos.get(&y) {
                    rows[i].set(j);
                }
            }
        }
        for &(x, y) in &extra[b] {
            rows[pos[&x]].set(pos[&y]);
        }
        extra[b].clear();
        close(&mut rows);

        if let Some(p) = layout.td.bags[b].parent {
            let p = p as usize;
            let shared: Vec<usize> = xids
                .iter()
                .enumerate()
                .filter(|(_, x)| {
                    let v = *x / dstar;
                    layout.td.bags[p].vertices.binary_search(&v).is_ok()
                })
                .map(|(i, _)| i)
                .collect();
            for &i in &shared {
                for &j in &shared {
                    if rows[i].get(j) {
                        extra[p].push((xids[i], xids[j]));
                    }
                }
            }
        }
        mats[b] = Some(BagClosure { k, rows });
    }

    // Up pass: root (last of `order`) is already final.
    for &b in order.iter().rev().skip(1) {
        let p = layout.td.bags[b].parent.unwrap() as usize;
        let (_, pos) = locate(b);
        let p_xids = bag_xids(layout, p, dstar);
        let mut imported: Vec<(usize, usize)> = Vec::new();
        {
            let pmat = mats[p].as_ref().unwrap();
            for (pi, &x) in p_xids.iter().enumerate() {
                if let Some(&i) = pos.get(&x) {
                    for (pj, &y) in p_xids.iter().enumerate() {
                        if pmat.get(pi, pj) {
                            if let Some(&j) = pos.get(&y) {
                                imported.push((i, j));
                            }
                        }
                    }
                }
            }
        }
        let mat = mats[b].as_mut().unwrap();
        for (i, j) in imported {
            mat.rows[i].set(j);
        }
        close(&mut mat.rows);
    }

    LocalIndex { per_bag: mats.into_iter().map(|m| m.unwrap()).collect() }
}

// ---------------------------------------------------------------------------
// Ancestor sets

/// Bit-packed ancestor reachability, indexed by exploded vertex id. Only
/// the string at each vertex's root bag is retained — queries never look
/// at the strings of deeper bags. `fwd[x]` has length
/// `delta[rootbag(x)] * |D*|`; segment j (ancestor at depth j, own bag
/// first) is laid out as (bag vertex order × fact order). `bwd` is the
/// symmetric backward index.
#[derive(Clone, Debug)]
pub struct AncestorSets {
    pub dstar: u32,
    pub fwd: Vec<BitString>,
    pub bwd: Vec<BitString>,
}

impl AncestorSets {
    pub fn empty(nx: usize, dstar: u32) -> Self {
        AncestorSets {
            dstar,
            fwd: vec![BitString::new(0); nx],
            bwd: vec![BitString::new(0); nx],
        }
    }
}

/// Top-down pass per tree: each bag's strings start as the parent's
/// strings shifted up by one fresh own-bag segment (for vertices shared
/// with the parent), then every local closure pair sets its own-bag bit
/// and ORs whole strings. Because the closure is transitive and the copy
/// step precedes the pair loop, a single pass over the pairs suffices.
pub fn compute_ancestors(
    layouts: &[TreeLayout],
    locals: &[LocalIndex],
    dstar: u32,
    out: &mut AncestorSets,
) {
    for (pi, layout) in layouts.iter().enumerate() {
        let local = &locals[pi];
        // Iterative DFS; per-bag transient strings are dropped at
        // post-visit, except those owned by the bag (root bag of the
        // vertex), which move into `out`.
        let nb = layout.td.bags.len();
        let mut store: Vec<Option<(Vec<BitString>, Vec<BitString>)>> = vec![None; nb];
        let mut stack: Vec<(u32, bool)> = vec![(layout.td.root, true)];
        while let Some((b, entering)) = stack.pop() {
            let bu = b as usize;
            if entering {
                let xids = bag_xids(layout, bu, dstar);
                let k = xids.len();
                let len = layout.delta[bu] * dstar as usize;
                let own = layout.td.bags[bu].vertices.len() * dstar as usize;
                let mut fwd: Vec<BitString> = vec![BitString::new(len); k];
                let mut bwd: Vec<BitString> = vec![BitString::new(len); k];
                if let Some(p) = layout.td.bags[bu].parent {
                    let p = p as usize;
                    let (pf, pb) = store[p].as_ref().expect("parent visited before child");
                    let p_xids = bag_xids(layout, p, dstar);
                    let ppos: HashMap<u32, usize> =
                        p_xids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
                    for (i, &x) in xids.iter().enumerate() {
                        if let Some(&pix) = ppos.get(&x) {
                            fwd[i].or_shifted(&pf[pix], own);
                            bwd[i].or_shifted(&pb[pix], own);
                        }
                    }
                }
                let mat = &local.per_bag[bu];
                for i in 0..k {
                    for j in mat.rows[i].iter_ones() {
                        fwd[i].set(j);
                        bwd[j].set(i);
                    }
                }
                // Whole-string merges after all own-bag bits are set.
                for i in 0..k {
                    let mut acc_f = fwd[i].clone();
                    for j in mat.rows[i].iter_ones() {
                        if j != i {
                            acc_f.or_assign(&fwd[j]);
                        }
                    }
                    fwd[i] = acc_f;
                }
                for j in 0..k {
                    let mut acc_b = bwd[j].clone();
                    for i in 0..k {
                        if i != j && mat.get(i, j) {
                            acc_b.or_assign(&bwd[i]);
                        }
                    }
                    bwd[j] = acc_b;
                }
                store[bu] = Some((fwd, bwd));
                stack.push((b, false));
                for &c in layout.td.bags[bu].children.iter().rev() {
                    stack.push((c, true));
                }
            } else {
                let (fwd, bwd) = store[bu].take().unwrap();
                let xids = bag_xids(layout, bu, dstar);
                for (i, &x) in xids.iter().enumerate() {
                    let v = x / dstar;
                    if layout.root_bag[&v] == b {
                        out.fwd[x as usize] = fwd[i].clone();
                        out.bwd[x as usize] = bwd[i].clone();
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Descendant sets

/// Bit-packed subtree reachability, indexed by exploded vertex id.
/// `fwd[x]` for x = (u, d) has length `subtree_len[rootbag(u)] * |D*|`;
/// bit j corresponds to the exploded vertex with pre-order index
/// `subtree_start[rootbag(u)] * |D*| + j`.
#[derive(Clone, Debug)]
pub struct DescendantSets {
    pub dstar: u32,
    pub fwd: Vec<BitString>,
}

impl DescendantSets {
    pub fn empty(nx: usize, dstar: u32) -> Self {
        DescendantSets { dstar, fwd: vec![BitString::new(0); nx] }
    }
}

/// Bottom-up pass per tree: strings start with just the own bit; at each
/// bag, every local closure pair whose target is rooted there ORs the
/// target's (already final) string into the source's, shifted to align
/// the pre-order ranges.
pub fn compute_descendants(
    layouts: &[TreeLayout],
    locals: &[LocalIndex],
    dstar: u32,
    out: &mut DescendantSets,
) {
    for (pi, layout) in layouts.iter().enumerate() {
        let local = &locals[pi];
        // Initialize own bits.
        for (&v, &pp) in &layout.pre_pos {
            let rb = layout.root_bag[&v] as usize;
            let base = layout.subtree_start[rb];
            let len = layout.subtree_len[rb] * dstar as usize;
            for d in 0..dstar {
                let x = xid(v, d, dstar) as usize;
                let mut s = BitString::new(len);
                s.set((pp - base) * dstar as usize + d as usize);
                out.fwd[x] = s;
            }
        }
        let nb = layout.td.bags.len();
        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_by_key(|&b| std::cmp::Reverse(layout.td.bags[b].depth));
        for &b in &order {
            let xids = bag_xids(layout, b, dstar);
            let mat = &local.per_bag[b];
            for (j, &y) in xids.iter().enumerate() {
                let v = y / dstar;
                if layout.root_bag[&v] != b as u32 {
                    continue;
                }
                let base_v = layout.subtree_start[b];
                for (i, &x) in xids.iter().enumerate() {
                    if i == j || !mat.get(i, j) {
                        continue;
                    }
                    let u = x / dstar;
                    let base_u = layout.subtree_start[layout.root_bag[&u] as usize];
                    let shift = (base_v - base_u) * dstar as usize;
                    let src = out.fwd[y as usize].clone();
                    out.fwd[x as usize].or_shifted(&src, shift);
                }
            }
        }
    }
}

/// Decoded view of an ancestor string: the (vertex, fact) pairs of the
/// segment for ancestor bag `anc` within the string stored for exploded
/// vertex `x`. Test support.
pub fn decode_anc_segment(
    layout: &TreeLayout,
    sets: &AncestorSets,
    x: u32,
    anc: u32,
    backward: bool,
) -> Vec<(VertexId, u32)> {
    let dstar = sets.dstar;
    let v = x / dstar;
    let rb = layout.root_bag[&v] as usize;
    let off = layout.seg_off[rb][layout.td.bags[anc as usize].depth as usize] * dstar as usize;
    let s = if backward { &sets.bwd[x as usize] } else { &sets.fwd[x as usize] };
    let bag = &layout.td.bags[anc as usize];
    let mut outv = Vec::new();
    for (bi, &w) in bag.vertices.iter().enumerate() {
        for d in 0..dstar {
            let bit = off + bi * dstar as usize + d as usize;
            if bit < s.len() && s.get(bit) {
                outv.push((w, d));
            }
        }
    }
    outv
}
