//! Tree decompositions of flow graphs: construction via a min-fill
//! elimination ordering, rebalancing into a binary tree of logarithmic
//! height, constant-time lowest common ancestors, and the per-procedure
//! layout (root bags, ancestor segment offsets, pre-order vertex indices)
//! that the reachability indices are packed against.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::instance::VertexId;

#[derive(Clone, Debug)]
pub struct Bag {
    /// Sorted global vertex ids. Sorting makes equal vertex sets share a
    /// layout, which keeps copy bags aligned with their originals.
    pub vertices: Vec<VertexId>,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    pub depth: u32,
}

#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub bags: Vec<Bag>,
    pub root: u32,
    /// max bag size − 1
    pub width: usize,
}

impl TreeDecomposition {
    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    /// Length in edges of the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.bags.iter().map(|b| b.depth).max().unwrap_or(0)
    }

    /// Whether no bag has more than two children (guaranteed after
    /// balancing, not by raw construction).
    pub fn is_binary(&self) -> bool {
        self.bags.iter().all(|b| b.children.len() <= 2)
    }

    /// Checks the three decomposition conditions (every vertex covered,
    /// every edge co-bagged, each vertex's bags connected) plus structural
    /// consistency (parent/child/depth agreement).
    pub fn validate(&self, vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<(), String> {
        let mut containing: HashMap<VertexId, Vec<u32>> = HashMap::new();
        for (i, b) in self.bags.iter().enumerate() {
            for &c in &b.children {
                let child = &self.bags[c as usize];
                if child.parent != Some(i as u32) || child.depth != b.depth + 1 {
                    return Err(format!("bag {c} disagrees with parent {i}"));
                }
            }
            for &v in &b.vertices {
                containing.entry(v).or_default().push(i as u32);
            }
        }
        if self.bags[self.root as usize].parent.is_some() {
            return Err("root has a parent".into());
        }
        for &v in vertices {
            if !containing.contains_key(&v) {
                return Err(format!("vertex {v} not covered by any bag"));
            }
        }
        for &(u, v) in edges {
            let in_u: HashSet<u32> = containing[&u].iter().copied().collect();
            if !containing[&v].iter().any(|b| in_u.contains(b)) {
                return Err(format!("edge ({u},{v}) not contained in any bag"));
            }
        }
        // Connectivity: the bags holding v must form one connected subtree.
        for (v, bags) in &containing {
            let set: HashSet<u32> = bags.iter().copied().collect();
            let mut seen = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert(bags[0]);
            queue.push_back(bags[0]);
            while let Some(b) = queue.pop_front() {
                let bag = &self.bags[b as usize];
                let mut nbrs: Vec<u32> = bag.children.clone();
                if let Some(p) = bag.parent {
                    nbrs.push(p);
                }
                for nb in nbrs {
                    if set.contains(&nb) && seen.insert(nb) {
                        queue.push_back(nb);
                    }
                }
            }
            if seen.len() != set.len() {
                return Err(format!("bags containing vertex {v} are not connected"));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Construction: min-fill elimination ordering

/// Builds a tree decomposition of the undirected view of a flow graph.
/// Vertices are eliminated in min-fill order (fewest missing edges among
/// the remaining neighbors; ties broken by degree, then id); each
/// elimination yields the bag of the vertex plus its remaining neighbors.
pub fn decompose(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> TreeDecomposition {
    let n = vertices.len();
    assert!(n > 0, "a procedure has at least one vertex");
    let local: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for &(u, v) in edges {
        let (u, v) = (local[&u], local[&v]);
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    let fill_of = |adj: &[HashSet<usize>], v: usize| -> usize {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut fill = 0;
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                if !adj[nbrs[i]].contains(&nbrs[j]) {
                    fill += 1;
                }
            }
        }
        fill
    };

    // Candidates ordered by (fill, degree, id) so the next vertex to
    // eliminate is a cheap first-element lookup instead of a linear scan.
    let mut key: Vec<(usize, usize, usize)> =
        (0..n).map(|v| (fill_of(&adj, v), adj[v].len(), v)).collect();
    let mut heap: std::collections::BTreeSet<(usize, usize, usize)> = key.iter().copied().collect();
    let mut alive = vec![true; n];
    let mut elim_pos = vec![0usize; n];
    let mut bag_vertices: Vec<Vec<usize>> = Vec::with_capacity(n);

    for round in 0..n {
        let &(_, _, v) = heap.first().unwrap();
        heap.remove(&key[v]);
        elim_pos[v] = round;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = vec![v];
        bag.extend(&nbrs);
        bag_vertices.push(bag);

        // Turn the neighborhood into a clique and remove v. Only vertices
        // within distance two of v can see their fill value change.
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        }
        for &u in &nbrs {
            adj[u].remove(&v);
        }
        alive[v] = false;
        let mut dirty: HashSet<usize> = nbrs.iter().copied().collect();
        for &u in &nbrs {
            dirty.extend(adj[u].iter().copied());
        }
        for u in dirty {
            if alive[u] {
                let k = (fill_of(&adj, u), adj[u].len(), u);
                if k != key[u] {
                    heap.remove(&key[u]);
                    key[u] = k;
                    heap.insert(k);
                }
            }
        }
    }

    // Bag of the i-th eliminated vertex attaches under the bag of its
    // earliest-eliminated remaining neighbor; bags without remaining
    // neighbors (last bag, disconnected components) attach under the
    // final bag, which becomes the root.
    let root = n - 1;
    let mut parent: Vec<Option<u32>> = vec![None; n];
    for (i, bag) in bag_vertices.iter().enumerate() {
        let p = bag[1..].iter().map(|&u| elim_pos[u]).min();
        match p {
            Some(p) => parent[i] = Some(p as u32),
            None if i != root => parent[i] = Some(root as u32),
            None => {}
        }
    }

    let mut bags: Vec<Bag> = bag_vertices
        .iter()
        .enumerate()
        .map(|(i, bag)| {
            let mut vs: Vec<VertexId> = bag.iter().map(|&l| vertices[l]).collect();
            vs.sort_unstable();
            Bag { vertices: vs, parent: parent[i], children: Vec::new(), depth: 0 }
        })
        .collect();
    for i in 0..n {
        if let Some(p) = bags[i].parent {
            bags[p as usize].children.push(i as u32);
        }
    }
    assign_depths(&mut bags, root as u32);
    let width = bags.iter().map(|b| b.vertices.len()).max().unwrap() - 1;
    TreeDecomposition { bags, root: root as u32, width }
}

fn assign_depths(bags: &mut [Bag], root: u32) {
    let mut queue = VecDeque::new();
    bags[root as usize].depth = 0;
    queue.push_back(root);
    while let Some(b) = queue.pop_front() {
        let d = bags[b as usize].depth;
        let children = bags[b as usize].children.clone();
        for c in children {
            bags[c as usize].depth = d + 1;
            queue.push_back(c);
        }
    }
}

// ---------------------------------------------------------------------------
// Balancing + binarization

/// Rebuilds a decomposition into a binary tree of logarithmic height.
///
/// The input is first binarized (unrooted degree ≤ 3) by chaining extra
/// children through copy bags. The rebuild then recurses on connected
/// components carrying at most three boundary separators: with three
/// boundaries it splits at the tree median of the attachment bags (each
/// part then inherits at most one old boundary), otherwise at the
/// centroid (each part at most halves). The new bag is the splitter's
/// vertex set united with all boundary separators, so the width is at
/// most 4t + 3 for input width t; three-way splits insert one copy bag to
/// stay binary.
pub fn balance_binarize(td: &TreeDecomposition) -> TreeDecomposition {
    // Undirected adjacency of the binarized old tree.
    let mut contents: Vec<Vec<VertexId>> = td.bags.iter().map(|b| b.vertices.clone()).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); td.bags.len()];
    for (i, b) in td.bags.iter().enumerate() {
        if let Some(p) = b.parent {
            adj[i].push(p as usize);
            adj[p as usize].push(i);
        }
    }
    let mut i = 0;
    while i < contents.len() {
        while adj[i].len() > 3 {
            // Move all but two neighbors to a fresh copy of this bag.
            let copy = contents.len();
            contents.push(contents[i].clone());
            let moved: Vec<usize> = adj[i].split_off(2);
            adj.push(moved.clone());
            adj[i].push(copy);
            adj[copy].push(i);
            for m in moved {
                for e in adj[m].iter_mut() {
                    if *e == i {
                        *e = copy;
                    }
                }
            }
        }
        i += 1;
    }

    let mut builder = Rebuilder { contents: &contents, adj: &adj, out: Vec::new() };
    let all: Vec<usize> = (0..contents.len()).collect();
    let root = builder.rebuild(&all, &[]);
    let mut bags = builder.out;
    for i in 0..bags.len() {
        let children = bags[i].children.clone();
        for c in children {
            bags[c as usize].parent = Some(i as u32);
        }
    }
    assign_depths(&mut bags, root);
    let width = bags.iter().map(|b| b.vertices.len()).max().unwrap() - 1;
    TreeDecomposition { bags, root, width }
}

struct Boundary {
    /// Bag of the component adjacent to the cut edge.
    inner: usize,
    separator: Vec<VertexId>,
}

struct Rebuilder<'a> {
    contents: &'a [Vec<VertexId>],
    adj: &'a [Vec<usize>],
    out: Vec<Bag>,
}

impl Rebuilder<'_> {
    fn rebuild(&mut self, comp: &[usize], boundaries: &[Boundary]) -> u32 {
        debug_assert!(boundaries.len() <= 3);
        let in_comp: HashSet<usize> = comp.iter().copied().collect();
        let c = if boundaries.len() == 3 {
            self.median(comp, &in_comp, boundaries[0].inner, boundaries[1].inner, boundaries[2].inner)
        } else {
            self.centroid(comp, &in_comp)
        };

        let mut content: Vec<VertexId> = self.contents[c].clone();
        for b in boundaries {
            content.extend(&b.separator);
        }
        content.sort_unstable();
        content.dedup();
        let node = self.out.len() as u32;
        self.out.push(Bag { vertices: content, parent: None, children: Vec::new(), depth: 0 });

        // Split comp − c into connected parts; each contains exactly one
        // old neighbor of c, which seeds its new boundary.
        let mut part_of: HashMap<usize, usize> = HashMap::new();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        let mut part_bounds: Vec<Vec<Boundary>> = Vec::new();
        for &nb in &self.adj[c] {
            if !in_comp.contains(&nb) || part_of.contains_key(&nb) {
                continue;
            }
            let pi = parts.len();
            let mut part = Vec::new();
            let mut queue = VecDeque::new();
            part_of.insert(nb, pi);
            queue.push_back(nb);
            while let Some(x) = queue.pop_front() {
                part.push(x);
                for &y in &self.adj[x] {
                    if y != c && in_comp.contains(&y) && !part_of.contains_key(&y) {
                        part_of.insert(y, pi);
                        queue.push_back(y);
                    }
                }
            }
            let sep: Vec<VertexId> = self.contents[c]
                .iter()
                .filter(|v| self.contents[nb].contains(v))
                .copied()
                .collect();
            parts.push(part);
            part_bounds.push(vec![Boundary { inner: nb, separator: sep }]);
        }
        for b in boundaries {
            if let Some(&pi) = part_of.get(&b.inner) {
                part_bounds[pi].push(Boundary { inner: b.inner, separator: b.separator.clone() });
            }
        }

        let children: Vec<u32> = parts
            .iter()
            .zip(&part_bounds)
            .map(|(p, bs)| self.rebuild(p, bs))
            .collect();
        match children.len() {
            0 | 1 | 2 => self.out[node as usize].children = children,
            3 => {
                // Stay binary: a copy of this bag adopts the extra parts.
                let copy = self.out.len() as u32;
                let content = self.out[node as usize].vertices.clone();
                self.out.push(Bag {
                    vertices: content,
                    parent: None,
                    children: vec![children[1], children[2]],
                    depth: 0,
                });
                self.out[node as usize].children = vec![children[0], copy];
            }
            _ => unreachable!("binarized tree has degree at most 3"),
        }
        node
    }

    fn centroid(&self, comp: &[usize], in_comp: &HashSet<usize>) -> usize {
        // Subtree sizes by iterative post-order from an arbitrary root.
        let root = comp[0];
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::with_capacity(comp.len());
        let mut stack = vec![root];
        parent.insert(root, root);
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &self.adj[x] {
                if in_comp.contains(&y) && !parent.contains_key(&y) {
                    parent.insert(y, x);
                    stack.push(y);
                }
            }
        }
        let mut size: HashMap<usize, usize> = comp.iter().map(|&x| (x, 1)).collect();
        for &x in order.iter().rev() {
            if x != root {
                *size.get_mut(&parent[&x]).unwrap() += size[&x];
            }
        }
        let total = comp.len();
        *comp
            .iter()
            .min_by_key(|&&x| {
                // Largest part left after removing x.
                let down = self.adj[x]
                    .iter()
                    .filter(|y| in_comp.contains(y) && parent.get(y) == Some(&x))
                    .map(|y| size[y])
                    .max()
                    .unwrap_or(0);
                down.max(total - size[&x])
            })
            .unwrap()
    }

    /// The unique meeting point of the pairwise paths between x, y and z:
    /// the divergence point of the paths x→y and x→z.
    fn median(&self, comp: &[usize], in_comp: &HashSet<usize>, x: usize, y: usize, z: usize) -> usize {
        let _ = comp;
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        parent.insert(x, x);
        queue.push_back(x);
        while let Some(a) = queue.pop_front() {
            for &b in &self.adj[a] {
                if in_comp.contains(&b) && !parent.contains_key(&b) {
                    parent.insert(b, a);
                    queue.push_back(b);
                }
            }
        }
        let path_from = |mut t: usize| {
            let mut path = vec![t];
            while t != x {
                t = parent[&t];
                path.push(t);
            }
            path.reverse();
            path
        };
        let py = path_from(y);
        let pz = path_from(z);
        let mut med = x;
        for i in 0..py.len().min(pz.len()) {
            if py[i] == pz[i] {
                med = py[i];
            } else {
                break;
            }
        }
        med
    }
}

// ---------------------------------------------------------------------------
// Lowest common ancestors: Euler tour + sparse-table range minimum

#[derive(Clone, Debug)]
pub struct LcaIndex {
    euler: Vec<u32>,
    first: Vec<usize>,
    depth: Vec<u32>,
    /// sparse[k][i] = position of the minimum-depth entry among
    /// euler[i .. i + 2^k].
    sparse: Vec<Vec<u32>>,
}

impl LcaIndex {
    pub fn build(td: &TreeDecomposition) -> LcaIndex {
        let n = td.bags.len();
        let mut euler = Vec::with_capacity(2 * n);
        let mut first = vec![usize::MAX; n];
        // Iterative Euler tour: re-push the parent after each child.
        let mut stack: Vec<(u32, usize)> = vec![(td.root, 0)];
        while let Some((b, ci)) = stack.pop() {
            if ci == 0 || ci <= td.bags[b as usize].children.len() {
                if first[b as usize] == usize::MAX {
                    first[b as usize] = euler.len();
                }
                euler.push(b);
            }
            if ci < td.bags[b as usize].children.len() {
                stack.push((b, ci + 1));
                stack.push((td.bags[b as usize].children[ci], 0));
            }
        }
        let depth: Vec<u32> = td.bags.iter().map(|b| b.depth).collect();
        let m = euler.len();
        let levels = (usize::BITS - m.leading_zeros()) as usize;
        let mut sparse: Vec<Vec<u32>> = Vec::with_capacity(levels);
        sparse.push((0..m as u32).collect());
        let mut k = 1;
        while (1 << k) <= m {
            let half = 1 << (k - 1);
            let prev = &sparse[k - 1];
            let mut row = Vec::with_capacity(m - (1 << k) + 1);
            for i in 0..=m - (1 << k) {
                let a = prev[i];
                let b = prev[i + half];
                row.push(if depth[euler[a as usize] as usize] <= depth[euler[b as usize] as usize] {
                    a
                } else {
                    b
                });
            }
            sparse.push(row);
            k += 1;
        }
        LcaIndex { euler, first, depth, sparse }
    }

    pub fn lca(&self, a: u32, b: u32) -> u32 {
        if a == b {
            return a;
        }
        let (mut i, mut j) = (self.first[a as usize], self.first[b as usize]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let k = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let x = self.sparse[k][i];
        let y = self.sparse[k][j + 1 - (1 << k)];
        let (bx, by) = (self.euler[x as usize], self.euler[y as usize]);
        if self.depth[bx as usize] <= self.depth[by as usize] {
            bx
        } else {
            by
        }
    }
}

// ---------------------------------------------------------------------------
// Cut property verification (test support)

/// For up to `max_samples` tree edges {b, parent(b)}: removing the
/// separator V(b) ∩ V(parent) from the flow graph must disconnect the
/// vertices appearing only below the edge from those appearing only above
/// it. Returns the number of edges checked.
pub fn verify_cut_property(
    td: &TreeDecomposition,
    vertices: &[VertexId],
    edges: &[(VertexId, VertexId)],
    max_samples: usize,
) -> Result<usize, String> {
    let mut undirected: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for &v in vertices {
        undirected.entry(v).or_default();
    }
    for &(u, v) in edges {
        undirected.entry(u).or_default().push(v);
        undirected.entry(v).or_default().push(u);
    }
    let non_root: Vec<usize> = (0..td.bags.len()).filter(|&b| b as u32 != td.root).collect();
    let step = (non_root.len() / max_samples.max(1)).max(1);
    let mut checked = 0;
    for &b in non_root.iter().step_by(step).take(max_samples) {
        let p = td.bags[b].parent.unwrap() as usize;
        let sep: HashSet<VertexId> = td.bags[b]
            .vertices
            .iter()
            .filter(|v| td.bags[p].vertices.contains(v))
            .copied()
            .collect();
        // Vertices appearing in bags of b's subtree vs the rest.
        let mut below: HashSet<VertexId> = HashSet::new();
        let mut stack = vec![b as u32];
        let mut subtree = HashSet::new();
        while let Some(x) = stack.pop() {
            subtree.insert(x);
            below.extend(td.bags[x as usize].vertices.iter().copied());
            stack.extend(td.bags[x as usize].children.iter().copied());
        }
        let mut above: HashSet<VertexId> = HashSet::new();
        for (i, bag) in td.bags.iter().enumerate() {
            if !subtree.contains(&(i as u32)) {
                above.extend(bag.vertices.iter().copied());
            }
        }
        let side_a: HashSet<VertexId> = below.difference(&sep).copied().collect();
        let side_b: HashSet<VertexId> = above.difference(&sep).copied().collect();
        if let Some(v) = side_a.intersection(&side_b).next() {
            return Err(format!("vertex {v} on both sides of tree edge ({b},{p})"));
        }
        // Flood fill from side A avoiding the separator.
        let mut seen: HashSet<VertexId> = HashSet::new();
        let mut queue: VecDeque<VertexId> = side_a.iter().copied().collect();
        seen.extend(side_a.iter().copied());
        while let Some(x) = queue.pop_front() {
            for &y in &undirected[&x] {
                if !sep.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if let Some(v) = seen.intersection(&side_b).next() {
            return Err(format!(
                "separator of tree edge ({b},{p}) does not cut the graph: reached {v}"
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

// ---------------------------------------------------------------------------
// Per-procedure layout for the reachability indices

/// A balanced decomposition together with every precomputed coordinate
/// the bit-packed indices need: root bags, ancestor segment offsets,
/// pre-order vertex positions and subtree ranges (all in vertex units;
/// callers scale by |D*|).
#[derive(Clone, Debug)]
pub struct TreeLayout {
    pub td: TreeDecomposition,
    pub lca: LcaIndex,
    /// Root bag (unique minimum-depth bag) of each vertex of the procedure.
    pub root_bag: HashMap<VertexId, u32>,
    /// Per bag: Σ |V(a)| over ancestors a including the bag itself.
    pub delta: Vec<usize>,
    /// Per bag, indexed by ancestor depth j (0 ..= depth(b)): offset of
    /// that ancestor's segment, in vertex units. Own bag first, then
    /// upward.
    pub seg_off: Vec<Vec<usize>>,
    /// Pre-order position of each vertex (assigned at its root bag,
    /// lexicographic within a bag).
    pub pre_pos: HashMap<VertexId, usize>,
    /// Vertices in pre-order (inverse of `pre_pos`).
    pub pre_list: Vec<VertexId>,
    /// Per bag: start and length of its subtree's pre-order vertex range.
    pub subtree_start: Vec<usize>,
    pub subtree_len: Vec<usize>,
}

impl TreeLayout {
    pub fn build(td: TreeDecomposition) -> TreeLayout {
        let nb = td.bags.len();
        let lca = LcaIndex::build(&td);

        // Root bags: first bag containing the vertex in a top-down sweep.
        let mut root_bag: HashMap<VertexId, u32> = HashMap::new();
        let mut bfs: Vec<u32> = vec![td.root];
        let mut qi = 0;
        while qi < bfs.len() {
            let b = bfs[qi];
            qi += 1;
            for &v in &td.bags[b as usize].vertices {
                root_bag.entry(v).or_insert(b);
            }
            bfs.extend(td.bags[b as usize].children.iter().copied());
        }

        let mut delta = vec![0usize; nb];
        let mut seg_off: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for b in 0..nb {
            let mut offs = vec![0usize; td.bags[b].depth as usize + 1];
            let mut off = 0;
            let mut a = b as u32;
            loop {
                offs[td.bags[a as usize].depth as usize] = off;
                off += td.bags[a as usize].vertices.len();
                match td.bags[a as usize].parent {
                    Some(p) => a = p,
                    None => break,
                }
            }
            delta[b] = off;
            seg_off[b] = offs;
        }

        // Pre-order positions and subtree ranges.
        let mut pre_pos: HashMap<VertexId, usize> = HashMap::new();
        let mut pre_list: Vec<VertexId> = Vec::new();
        let mut subtree_start = vec![0usize; nb];
        let mut subtree_len = vec![0usize; nb];
        // (bag, entering). Bag vertex lists are sorted, so "lexicographic
        // within a bag" is just list order.
        let mut stack: Vec<(u32, bool)> = vec![(td.root, true)];
        while let Some((b, entering)) = stack.pop() {
            if entering {
                subtree_start[b as usize] = pre_list.len();
                for &v in &td.bags[b as usize].vertices {
                    if root_bag[&v] == b {
                        pre_pos.insert(v, pre_list.len());
                        pre_list.push(v);
                    }
                }
                stack.push((b, false));
                for &c in td.bags[b as usize].children.iter().rev() {
                    stack.push((c, true));
                }
            } else {
                subtree_len[b as usize] = pre_list.len() - subtree_start[b as usize];
            }
        }

        TreeLayout {
            td,
            lca,
            root_bag,
            delta,
            seg_off,
            pre_pos,
            pre_list,
            subtree_start,
            subtree_len,
        }
    }

    /// Position of `v` within bag `b`'s vertex list.
    pub fn pos_in_bag(&self, b: u32, v: VertexId) -> usize {
        self.td.bags[b as usize]
            .vertices
            .binary_search(&v)
            .expect("vertex must be in the bag")
    }
}
