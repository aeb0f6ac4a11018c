//! Succinct distributive flow functions and the exploded supergraph.
//!
//! A distributive function f over fact sets is stored as the relation
//! R_f ⊆ D* × D* with D* = D ∪ {0}: (0,0) is always present, (0,b) encodes
//! b ∈ f(∅), and (a,b) with a ≠ 0 encodes b ∈ f({a}) − f(∅). Keeping the
//! representation in this normal form makes function equality equal to
//! representation equality and lets composition work as a relational join
//! followed by one re-normalization.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::instance::{EdgeKind, FactId, Supergraph, VertexId};

/// The global fact domain D. Index 0 of D* is the tautological fact 0;
/// fact `i` of D maps to index `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactDomain {
    facts: Vec<String>,
}

impl FactDomain {
    pub fn new(facts: Vec<String>) -> Self {
        FactDomain { facts }
    }

    /// |D|
    pub fn size(&self) -> u32 {
        self.facts.len() as u32
    }

    /// |D*| = |D| + 1
    pub fn dstar(&self) -> u32 {
        self.facts.len() as u32 + 1
    }

    pub fn facts(&self) -> &[String] {
        &self.facts
    }

    /// Resolves a fact name; `"0"` names the tautological fact.
    pub fn index_of(&self, name: &str) -> Option<FactId> {
        if name == "0" {
            return Some(0);
        }
        self.facts.iter().position(|f| f == name).map(|i| i as FactId + 1)
    }

    pub fn name_of(&self, id: FactId) -> &str {
        if id == 0 {
            "0"
        } else {
            &self.facts[id as usize - 1]
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("fact index {0} out of range for |D*| = {1}")]
    FactOutOfRange(FactId, u32),
    #[error("pair ({0}, 0) is invalid: no fact other than 0 may produce 0")]
    ProducesZero(FactId),
}

/// R_f in normal form. Row `a` holds the targets of source fact `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowRelation {
    dstar: u32,
    rows: Vec<BitString>,
}

impl FlowRelation {
    /// The constant-∅ function λx.∅, i.e. {(0,0)}.
    pub fn empty(dstar: u32) -> Self {
        let mut rows: Vec<BitString> = (0..dstar).map(|_| BitString::new(dstar as usize)).collect();
        rows[0].set(0);
        FlowRelation { dstar, rows }
    }

    /// λx.x
    pub fn identity(dstar: u32) -> Self {
        let mut r = Self::empty(dstar);
        for a in 1..dstar {
            r.rows[a as usize].set(a as usize);
        }
        r
    }

    pub fn from_pairs(dstar: u32, pairs: &[(FactId, FactId)]) -> Result<Self, FlowError> {
        let mut r = Self::empty(dstar);
        for &(a, b) in pairs {
            if a >= dstar || b >= dstar {
                return Err(FlowError::FactOutOfRange(a.max(b), dstar));
            }
            if b == 0 && a != 0 {
                return Err(FlowError::ProducesZero(a));
            }
            r.rows[a as usize].set(b as usize);
        }
        r.normalize();
        Ok(r)
    }

    /// λx.(x − kill) ∪ gen, the transfer shape of the classic bit-vector
    /// analyses. Fact ids are D* indices (never 0).
    pub fn gen_kill(dstar: u32, gen: &[FactId], kill: &[FactId]) -> Self {
        let mut r = Self::identity(dstar);
        for &k in kill {
            debug_assert!(k != 0);
            r.rows[k as usize] = BitString::new(dstar as usize);
        }
        for &g in gen {
            debug_assert!(g != 0);
            r.rows[0].set(g as usize);
        }
        r.normalize();
        r
    }

    pub fn dstar(&self) -> u32 {
        self.dstar
    }

    pub fn contains(&self, a: FactId, b: FactId) -> bool {
        self.rows[a as usize].get(b as usize)
    }

    /// All pairs of the relation, row-major.
    pub fn pairs(&self) -> Vec<(FactId, FactId)> {
        let mut out = Vec::new();
        for a in 0..self.dstar {
            for b in self.rows[a as usize].iter_ones() {
                out.push((a, b as FactId));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        false // (0,0) is always present
    }

    /// f(input) for input ⊆ D; the result is a sorted subset of D.
    pub fn apply(&self, input: &[FactId]) -> Result<Vec<FactId>, FlowError> {
        let mut acc = self.rows[0].clone();
        for &d in input {
            if d == 0 || d >= self.dstar {
                return Err(FlowError::FactOutOfRange(d, self.dstar));
            }
            acc.or_assign(&self.rows[d as usize]);
        }
        Ok(acc.iter_ones().filter(|&b| b != 0).map(|b| b as FactId).collect())
    }

    /// R_{g∘f} = R_f ; R_g, re-normalized.
    pub fn compose(f: &FlowRelation, g: &FlowRelation) -> FlowRelation {
        assert_eq!(f.dstar, g.dstar);
        let dstar = f.dstar;
        let mut rows: Vec<BitString> = (0..dstar).map(|_| BitString::new(dstar as usize)).collect();
        for a in 0..dstar as usize {
            for c in f.rows[a].iter_ones() {
                rows[a].or_assign(&g.rows[c]);
            }
        }
        let mut r = FlowRelation { dstar, rows };
        r.normalize();
        r
    }

    /// Restores the normal form: (0,0) present; rows a ≠ 0 never target 0
    /// and never duplicate a consequence of f(∅).
    fn normalize(&mut self) {
        self.rows[0].set(0);
        let zero_row = self.rows[0].clone();
        for a in 1..self.dstar as usize {
            self.rows[a].and_not_assign(&zero_row);
            self.rows[a].clear(0);
        }
    }
}

/// Index of the exploded vertex (v, d).
#[inline]
pub fn xid(v: VertexId, d: FactId, dstar: u32) -> u32 {
    v * dstar + d
}

#[inline]
pub fn xid_split(x: u32, dstar: u32) -> (VertexId, FactId) {
    (x / dstar, x % dstar)
}

/// Relations keyed by supergraph edge. A (u,v) pair that is both an
/// intraprocedural edge and a derived call-to-start edge (direct recursion
/// from the start vertex) shares one relation.
pub type RelationTable = HashMap<(VertexId, VertexId), FlowRelation>;

/// The exploded supergraph: one vertex per (program vertex, fact) pair,
/// one edge per relation pair of each supergraph edge.
#[derive(Clone, Debug)]
pub struct ExplodedGraph {
    dstar: u32,
    n: u32,
    adj: Vec<Vec<(u32, EdgeKind)>>,
    edge_count: usize,
}

impl ExplodedGraph {
    pub fn dstar(&self) -> u32 {
        self.dstar
    }

    /// Number of program vertices (not exploded vertices).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn successors(&self, x: u32) -> &[(u32, EdgeKind)] {
        &self.adj[x as usize]
    }
}

pub fn build_exploded(sg: &Supergraph, dom: &FactDomain, rels: &RelationTable) -> ExplodedGraph {
    let dstar = dom.dstar();
    let n = sg.n();
    let mut adj: Vec<Vec<(u32, EdgeKind)>> = vec![Vec::new(); (n * dstar) as usize];
    let mut edge_count = 0;
    for (u, v, kind) in sg.edges() {
        let rel = &rels[&(u, v)];
        for (d1, d2) in rel.pairs() {
            adj[xid(u, d1, dstar) as usize].push((xid(v, d2, dstar), kind));
            edge_count += 1;
        }
    }
    ExplodedGraph { dstar, n, adj, edge_count }
}
