//! The supergraph data model, its JSON on-disk format, and path validity.
//!
//! An instance file declares the fact domain, the per-procedure flow graphs
//! (each with a unique start and exit vertex), the call sites, and one flow
//! relation per supergraph edge. Loading resolves string ids to dense
//! integers, derives the interprocedural call-to-start and exit-to-return-
//! site edges, and checks every structural invariant up front so the rest
//! of the engine can assume a well-formed instance.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::flow::{FactDomain, FlowError, FlowRelation, RelationTable};

pub type VertexId = u32;
pub type ProcId = u32;
pub type FactId = u32;

/// Kind of a supergraph edge. `CallToReturn` edges are intraprocedural for
/// every purpose except bookkeeping; `CallToStart` and `ExitToReturn` are
/// the derived interprocedural edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Intra,
    CallToReturn,
    CallToStart,
    ExitToReturn,
}

impl EdgeKind {
    pub fn is_interprocedural(self) -> bool {
        matches!(self, EdgeKind::CallToStart | EdgeKind::ExitToReturn)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub name: String,
    /// Global vertex ids, in file order. This order defines the vertex
    /// axis of single-source answers.
    pub vertices: Vec<VertexId>,
    pub start: VertexId,
    pub exit: VertexId,
    pub intra_edges: Vec<(VertexId, VertexId)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CallSite {
    pub call: VertexId,
    pub return_site: VertexId,
    pub callee: ProcId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supergraph {
    pub procedures: Vec<Procedure>,
    pub calls: Vec<CallSite>,
    vertex_names: Vec<String>,
    proc_of: Vec<ProcId>,
    /// Position of each vertex within its procedure's vertex list.
    local_index: Vec<u32>,
    /// Call-site index by call vertex / by return-site vertex.
    call_at: HashMap<VertexId, usize>,
    return_at: HashMap<VertexId, usize>,
}

impl Supergraph {
    /// Total number of program vertices.
    pub fn n(&self) -> u32 {
        self.vertex_names.len() as u32
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v as usize]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name).map(|i| i as VertexId)
    }

    pub fn proc_of(&self, v: VertexId) -> ProcId {
        self.proc_of[v as usize]
    }

    pub fn local_index(&self, v: VertexId) -> u32 {
        self.local_index[v as usize]
    }

    pub fn call_site_at(&self, call: VertexId) -> Option<&CallSite> {
        self.call_at.get(&call).map(|&i| &self.calls[i])
    }

    pub fn call_site_returning_to(&self, ret: VertexId) -> Option<&CallSite> {
        self.return_at.get(&ret).map(|&i| &self.calls[i])
    }

    /// Every supergraph edge: intraprocedural edges (call-to-return-site
    /// edges marked as such) followed by the derived interprocedural edges,
    /// two per call site.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, EdgeKind)> {
        let mut out = Vec::new();
        for p in &self.procedures {
            for &(u, v) in &p.intra_edges {
                let kind = match self.call_at.get(&u) {
                    Some(&i) if self.calls[i].return_site == v => EdgeKind::CallToReturn,
                    _ => EdgeKind::Intra,
                };
                out.push((u, v, kind));
            }
        }
        for c in &self.calls {
            let callee = &self.procedures[c.callee as usize];
            out.push((c.call, callee.start, EdgeKind::CallToStart));
            out.push((callee.exit, c.return_site, EdgeKind::ExitToReturn));
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance file: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("duplicate fact {0:?} in domain")]
    DuplicateFact(String),
    #[error("duplicate procedure name {0:?}")]
    DuplicateProcedure(String),
    #[error("vertex {0:?} declared more than once")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown procedure {0:?}")]
    UnknownProcedure(String),
    #[error("vertex {0:?} referenced outside its procedure {1:?}")]
    ForeignVertex(String, String),
    #[error("call site {call:?} -> {return_site:?}: call and return site must share a procedure")]
    CallAcrossProcedures { call: String, return_site: String },
    #[error("call site at {0:?} is missing its call-to-return-site edge")]
    MissingCallToReturnEdge(String),
    #[error("return site {0:?} has an intraprocedural incoming edge other than its call-to-return-site edge")]
    ExtraEdgeIntoReturnSite(String),
    #[error("vertex {0:?} serves as more than one call or return site")]
    OverloadedCallVertex(String),
    #[error("no flow relation for edge {0:?} -> {1:?}")]
    MissingRelation(String, String),
    #[error("flow entry {0:?} -> {1:?} does not name a supergraph edge")]
    RelationWithoutEdge(String, String),
    #[error("duplicate flow entry for edge {0:?} -> {1:?}")]
    DuplicateRelation(String, String),
    #[error("unknown fact {0:?}")]
    UnknownFact(String),
    #[error("edge {0:?} -> {1:?}: {2}")]
    BadRelation(String, String, FlowError),
    #[error("procedure {0:?}: per-procedure domain lists unknown fact {1:?}")]
    BadProcedureDomain(String, String),
    #[error("path step {0} -> {1} is not a supergraph edge")]
    NonPath(VertexId, VertexId),
}

// ---------------------------------------------------------------------------
// On-disk format

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub domain: Vec<String>,
    pub procedures: Vec<ProcedureFile>,
    pub calls: Vec<CallFile>,
    pub flow: Vec<FlowFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProcedureFile {
    pub name: String,
    pub start: String,
    pub exit: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
    /// Optional per-procedure domain; validated as a subset of the global
    /// domain, facts are still indexed globally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeFile {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CallFile {
    pub call: String,
    #[serde(rename = "returnSite")]
    pub return_site: String,
    pub callee: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowFile {
    pub from: String,
    pub to: String,
    /// Relation pairs as fact names; "0" is the tautological fact.
    pub rel: Vec<(String, String)>,
}

pub fn parse_instance(bytes: &[u8]) -> Result<(Supergraph, FactDomain, RelationTable), InstanceError> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    build_instance(&file)
}

pub fn build_instance(file: &InstanceFile) -> Result<(Supergraph, FactDomain, RelationTable), InstanceError> {
    // Domain.
    let mut seen = HashMap::new();
    for f in &file.domain {
        if seen.insert(f.clone(), ()).is_some() || f == "0" {
            return Err(InstanceError::DuplicateFact(f.clone()));
        }
    }
    let dom = FactDomain::new(file.domain.clone());

    // Vertices: dense ids in file order.
    let mut name_to_vertex: HashMap<&str, VertexId> = HashMap::new();
    let mut vertex_names = Vec::new();
    let mut proc_of = Vec::new();
    let mut local_index = Vec::new();
    let mut proc_ids: HashMap<&str, ProcId> = HashMap::new();
    for (pi, p) in file.procedures.iter().enumerate() {
        if proc_ids.insert(&p.name, pi as ProcId).is_some() {
            return Err(InstanceError::DuplicateProcedure(p.name.clone()));
        }
        for (li, vname) in p.vertices.iter().enumerate() {
            if name_to_vertex.insert(vname, vertex_names.len() as VertexId).is_some() {
                return Err(InstanceError::DuplicateVertex(vname.clone()));
            }
            vertex_names.push(vname.clone());
            proc_of.push(pi as ProcId);
            local_index.push(li as u32);
        }
        if let Some(pd) = &p.domain {
            for f in pd {
                if dom.index_of(f).is_none() {
                    return Err(InstanceError::BadProcedureDomain(p.name.clone(), f.clone()));
                }
            }
        }
    }

    let resolve = |name: &str| -> Result<VertexId, InstanceError> {
        name_to_vertex
            .get(name)
            .copied()
            .ok_or_else(|| InstanceError::UnknownVertex(name.to_string()))
    };

    // Procedures.
    let mut procedures = Vec::new();
    for (pi, p) in file.procedures.iter().enumerate() {
        let member = |name: &str| -> Result<VertexId, InstanceError> {
            let v = resolve(name)?;
            if proc_of[v as usize] != pi as ProcId {
                return Err(InstanceError::ForeignVertex(name.to_string(), p.name.clone()));
            }
            Ok(v)
        };
        let start = member(&p.start)?;
        let exit = member(&p.exit)?;
        let mut intra_edges = Vec::new();
        for e in &p.edges {
            intra_edges.push((member(&e.from)?, member(&e.to)?));
        }
        let vertices = p.vertices.iter().map(|n| name_to_vertex[n.as_str()]).collect();
        procedures.push(Procedure { name: p.name.clone(), vertices, start, exit, intra_edges });
    }

    // Call sites.
    let mut calls = Vec::new();
    let mut call_at = HashMap::new();
    let mut return_at = HashMap::new();
    for c in &file.calls {
        let call = resolve(&c.call)?;
        let return_site = resolve(&c.return_site)?;
        if proc_of[call as usize] != proc_of[return_site as usize] {
            return Err(InstanceError::CallAcrossProcedures {
                call: c.call.clone(),
                return_site: c.return_site.clone(),
            });
        }
        let callee = *proc_ids
            .get(c.callee.as_str())
            .ok_or_else(|| InstanceError::UnknownProcedure(c.callee.clone()))?;
        let idx = calls.len();
        if call_at.insert(call, idx).is_some() || return_at.insert(return_site, idx).is_some() {
            return Err(InstanceError::OverloadedCallVertex(c.call.clone()));
        }
        calls.push(CallSite { call, return_site, callee });
    }

    // Call-to-return-site edge must exist; it must be the return site's
    // only intraprocedural incoming edge.
    for cs in &calls {
        let p = &procedures[proc_of[cs.call as usize] as usize];
        if !p.intra_edges.contains(&(cs.call, cs.return_site)) {
            return Err(InstanceError::MissingCallToReturnEdge(
                vertex_names[cs.call as usize].clone(),
            ));
        }
        for &(u, v) in &p.intra_edges {
            if v == cs.return_site && u != cs.call {
                return Err(InstanceError::ExtraEdgeIntoReturnSite(
                    vertex_names[cs.return_site as usize].clone(),
                ));
            }
        }
    }

    let sg = Supergraph {
        procedures,
        calls,
        vertex_names,
        proc_of,
        local_index,
        call_at,
        return_at,
    };

    // Flow relations: one per supergraph edge, no extras, full coverage.
    let edge_set: HashMap<(VertexId, VertexId), ()> =
        sg.edges().into_iter().map(|(u, v, _)| ((u, v), ())).collect();
    let mut rels: RelationTable = HashMap::new();
    for f in &file.flow {
        let u = resolve(&f.from)?;
        let v = resolve(&f.to)?;
        if !edge_set.contains_key(&(u, v)) {
            return Err(InstanceError::RelationWithoutEdge(f.from.clone(), f.to.clone()));
        }
        let mut pairs = Vec::new();
        for (a, b) in &f.rel {
            let ai = dom.index_of(a).ok_or_else(|| InstanceError::UnknownFact(a.clone()))?;
            let bi = dom.index_of(b).ok_or_else(|| InstanceError::UnknownFact(b.clone()))?;
            pairs.push((ai, bi));
        }
        let rel = FlowRelation::from_pairs(dom.dstar(), &pairs)
            .map_err(|e| InstanceError::BadRelation(f.from.clone(), f.to.clone(), e))?;
        if rels.insert((u, v), rel).is_some() {
            return Err(InstanceError::DuplicateRelation(f.from.clone(), f.to.clone()));
        }
    }
    for (&(u, v), _) in &edge_set {
        if !rels.contains_key(&(u, v)) {
            return Err(InstanceError::MissingRelation(
                sg.vertex_name(u).to_string(),
                sg.vertex_name(v).to_string(),
            ));
        }
    }

    Ok((sg, dom, rels))
}

/// Reconstructs the on-disk form of a loaded instance; parsing it back
/// yields an identical supergraph, domain and relation table.
pub fn serialize_instance(sg: &Supergraph, dom: &FactDomain, rels: &RelationTable) -> InstanceFile {
    let procedures = sg
        .procedures
        .iter()
        .map(|p| ProcedureFile {
            name: p.name.clone(),
            start: sg.vertex_name(p.start).to_string(),
            exit: sg.vertex_name(p.exit).to_string(),
            vertices: p.vertices.iter().map(|&v| sg.vertex_name(v).to_string()).collect(),
            edges: p
                .intra_edges
                .iter()
                .map(|&(u, v)| EdgeFile {
                    from: sg.vertex_name(u).to_string(),
                    to: sg.vertex_name(v).to_string(),
                })
                .collect(),
            domain: None,
        })
        .collect();
    let calls = sg
        .calls
        .iter()
        .map(|c| CallFile {
            call: sg.vertex_name(c.call).to_string(),
            return_site: sg.vertex_name(c.return_site).to_string(),
            callee: sg.procedures[c.callee as usize].name.clone(),
        })
        .collect();
    let mut flow_edges: Vec<(VertexId, VertexId)> = rels.keys().copied().collect();
    flow_edges.sort();
    let flow = flow_edges
        .into_iter()
        .map(|(u, v)| FlowFile {
            from: sg.vertex_name(u).to_string(),
            to: sg.vertex_name(v).to_string(),
            rel: rels[&(u, v)]
                .pairs()
                .into_iter()
                .map(|(a, b)| (dom.name_of(a).to_string(), dom.name_of(b).to_string()))
                .collect(),
        })
        .collect();
    InstanceFile { domain: dom.facts().to_vec(), procedures, calls, flow }
}

// ---------------------------------------------------------------------------
// Bandwidth report

#[derive(Clone, Debug)]
pub struct BandwidthViolation {
    pub from: VertexId,
    pub to: VertexId,
    pub fact: FactId,
    pub degree: u32,
}

/// Checks that on every interprocedural edge every fact of the relation's
/// bipartite graph has degree at most `b`. Violations void the complexity
/// guarantee but not correctness, so this only reports.
pub fn validate_bandwidth(sg: &Supergraph, rels: &RelationTable, b: u32) -> Vec<BandwidthViolation> {
    let mut out = Vec::new();
    for (u, v, kind) in sg.edges() {
        if !kind.is_interprocedural() {
            continue;
        }
        let rel = &rels[&(u, v)];
        let dstar = rel.dstar();
        let mut out_deg = vec![0u32; dstar as usize];
        let mut in_deg = vec![0u32; dstar as usize];
        for (a, t) in rel.pairs() {
            out_deg[a as usize] += 1;
            in_deg[t as usize] += 1;
        }
        for d in 0..dstar {
            let deg = out_deg[d as usize].max(in_deg[d as usize]);
            if deg > b {
                out.push(BandwidthViolation { from: u, to: v, fact: d, degree: deg });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Valid-path oracles

/// Whether the path's call/return projection is balanced: every return
/// matches the most recent open call and no call is left open. Used as a
/// test oracle only. A (u,v) step that is ambiguous between an
/// intraprocedural edge and a derived interprocedural edge (possible under
/// direct recursion) is resolved by trying every reading.
pub fn is_same_context_valid(sg: &Supergraph, path: &[VertexId]) -> Result<bool, InstanceError> {
    valid_path(sg, path, true)
}

/// Whether the path is interprocedurally valid: returns must match the
/// most recent open call, but calls may remain open at the end.
pub fn is_interprocedurally_valid(sg: &Supergraph, path: &[VertexId]) -> Result<bool, InstanceError> {
    valid_path(sg, path, false)
}

fn valid_path(sg: &Supergraph, path: &[VertexId], require_empty: bool) -> Result<bool, InstanceError> {
    let mut kinds: HashMap<(VertexId, VertexId), Vec<EdgeKind>> = HashMap::new();
    for (u, v, k) in sg.edges() {
        kinds.entry((u, v)).or_default().push(k);
    }
    for w in path.windows(2) {
        if !kinds.contains_key(&(w[0], w[1])) {
            return Err(InstanceError::NonPath(w[0], w[1]));
        }
    }
    // Depth-first over readings of ambiguous steps; the stack holds call
    // vertices of open calls.
    fn step(
        sg: &Supergraph,
        kinds: &HashMap<(VertexId, VertexId), Vec<EdgeKind>>,
        path: &[VertexId],
        i: usize,
        stack: &mut Vec<VertexId>,
        require_empty: bool,
    ) -> bool {
        if i + 1 >= path.len() {
            return !require_empty || stack.is_empty();
        }
        let (u, v) = (path[i], path[i + 1]);
        for &k in &kinds[&(u, v)] {
            match k {
                EdgeKind::Intra | EdgeKind::CallToReturn => {
                    if step(sg, kinds, path, i + 1, stack, require_empty) {
                        return true;
                    }
                }
                EdgeKind::CallToStart => {
                    stack.push(u);
                    let ok = step(sg, kinds, path, i + 1, stack, require_empty);
                    stack.pop();
                    if ok {
                        return true;
                    }
                }
                EdgeKind::ExitToReturn => {
                    let site = sg.call_site_returning_to(v).expect("return site has a call site");
                    if stack.last() == Some(&site.call) {
                        let saved = stack.pop().unwrap();
                        let ok = step(sg, kinds, path, i + 1, stack, require_empty);
                        stack.push(saved);
                        if ok {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
    let mut stack = Vec::new();
    Ok(step(sg, &kinds, path, 0, &mut stack, require_empty))
}
