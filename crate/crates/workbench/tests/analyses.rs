//! Checks on the analysis encoders: the canonical two-procedure program
//! reproduces the known nullness exploded graph edge for edge, and on
//! straight-line programs every encoder agrees with a direct statement
//! interpreter.

use std::collections::BTreeSet;

use ifds_core::flow::build_exploded;
use ifds_core::instance::parse_instance;
use ifds_core::query::build_index;
use ifds_core::summary::dump_summaries;

use ifds_workbench::analyses::{gen_analysis, AnalysisKind};
use ifds_workbench::mini::{MiniProc, MiniProgram, Stmt};

/// Handwritten reference encoding of the same program, with the vertex
/// and fact names used in its original presentation.
const NULLNESS: &str = r#"{
  "domain": ["nx", "ny"],
  "procedures": [
    {
      "name": "f",
      "start": "v1", "exit": "v4",
      "vertices": ["v1", "v2", "v3", "v4"],
      "edges": [
        {"from": "v1", "to": "v2"},
        {"from": "v2", "to": "v3"},
        {"from": "v3", "to": "v4"}
      ]
    },
    {
      "name": "main",
      "start": "v5", "exit": "v9",
      "vertices": ["v5", "v6", "c7", "r7", "v8", "v9"],
      "edges": [
        {"from": "v5", "to": "v6"},
        {"from": "v6", "to": "c7"},
        {"from": "c7", "to": "r7"},
        {"from": "r7", "to": "v8"},
        {"from": "v8", "to": "v9"}
      ]
    }
  ],
  "calls": [
    {"call": "c7", "returnSite": "r7", "callee": "f"}
  ],
  "flow": [
    {"from": "v1", "to": "v2", "rel": [["0","0"], ["nx","nx"], ["ny","ny"]]},
    {"from": "v2", "to": "v3", "rel": [["0","0"], ["nx","nx"]]},
    {"from": "v3", "to": "v4", "rel": [["0","0"], ["nx","nx"]]},
    {"from": "v5", "to": "v6", "rel": [["0","0"], ["nx","nx"], ["ny","ny"]]},
    {"from": "v6", "to": "c7", "rel": [["0","0"], ["0","nx"], ["0","ny"]]},
    {"from": "c7", "to": "r7", "rel": [["0","0"], ["ny","ny"]]},
    {"from": "r7", "to": "v8", "rel": [["0","0"], ["nx","nx"], ["ny","ny"]]},
    {"from": "v8", "to": "v9", "rel": [["0","0"], ["nx","nx"], ["ny","ny"]]},
    {"from": "c7", "to": "v1", "rel": [["0","0"], ["nx","nx"], ["ny","ny"]]},
    {"from": "v4", "to": "r7", "rel": [["0","0"], ["nx","nx"]]}
  ]
}"#;

/// Exploded edges as name tuples, independent of id assignment.
fn exploded_edge_names(bytes: &[u8]) -> BTreeSet<(String, u32, String, u32)> {
    let (sg, dom, rels) = parse_instance(bytes).unwrap();
    let eg = build_exploded(&sg, &dom, &rels);
    let dstar = eg.dstar();
    let mut out = BTreeSet::new();
    for x in 0..eg.vertex_count() as u32 {
        for &(y, _) in eg.successors(x) {
            out.insert((
                sg.vertex_name(x / dstar).to_string(),
                x % dstar,
                sg.vertex_name(y / dstar).to_string(),
                y % dstar,
            ));
        }
    }
    out
}

#[test]
fn canonical_program_reproduces_nullness_exploded_graph() {
    let generated = gen_analysis(&ifds_workbench::analyses::fig_program(), AnalysisKind::PossUninit);
    let got = exploded_edge_names(&generated);
    // Rename the reference onto the generated naming scheme: facts nx→x0,
    // ny→x1; vertices v1..v4 → f_n0..n3, v5 v6 c7 r7 v8 v9 → main_n0..n5.
    let vmap = |v: &str| -> String {
        match v {
            "v1" => "f_n0", "v2" => "f_n1", "v3" => "f_n2", "v4" => "f_n3",
            "v5" => "main_n0", "v6" => "main_n1", "c7" => "main_n2",
            "r7" => "main_n3", "v8" => "main_n4", "v9" => "main_n5",
            _ => unreachable!(),
        }
        .to_string()
    };
    let want: BTreeSet<_> = exploded_edge_names(NULLNESS.as_bytes())
        .into_iter()
        .map(|(u, d1, v, d2)| (vmap(&u), d1, vmap(&v), d2))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn canonical_program_summaries() {
    let generated = gen_analysis(&ifds_workbench::analyses::fig_program(), AnalysisKind::PossUninit);
    let (sg, dom, rels) = parse_instance(&generated).unwrap();
    let eg = build_exploded(&sg, &dom, &rels);
    let (summaries, _) = ifds_core::summary::compute_summaries(&sg, &eg);
    assert_eq!(
        dump_summaries(&sg, &dom, &summaries),
        "summary main_n2 0 main_n3 0\nsummary main_n2 x0 main_n3 x0"
    );
}

// ---------------------------------------------------------------------------
// Straight-line interpreter oracle

/// Facts (variable indices) holding after each vertex of a straight-line
/// single-procedure program, starting from the empty set.
fn interpret(kind: AnalysisKind, stmts: &[Stmt]) -> Vec<BTreeSet<usize>> {
    let mut states: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
    let mut s: BTreeSet<usize> = BTreeSet::new();
    let seq: Vec<&Stmt> = if kind == AnalysisKind::Live {
        stmts.iter().rev().collect()
    } else {
        stmts.iter().collect()
    };
    for st in seq {
        match (st, kind) {
            (Stmt::Decl(xs), AnalysisKind::PossUninit | AnalysisKind::SimpUninit) => {
                s.extend(xs.iter().copied());
            }
            (Stmt::Decl(xs), AnalysisKind::ReachDefs) => {
                for x in xs {
                    s.remove(x);
                }
            }
            (Stmt::Decl(xs), AnalysisKind::Live) => {
                for x in xs {
                    s.remove(x);
                }
            }
            (Stmt::Assign(x, uses), AnalysisKind::PossUninit) => {
                if uses.iter().any(|u| s.contains(u)) {
                    s.insert(*x);
                } else {
                    s.remove(x);
                }
            }
            (Stmt::Assign(x, _), AnalysisKind::SimpUninit) => {
                s.remove(x);
            }
            (Stmt::Assign(x, _), AnalysisKind::ReachDefs) => {
                s.insert(*x);
            }
            (Stmt::Assign(x, uses), AnalysisKind::Live) => {
                s.remove(x);
                s.extend(uses.iter().copied());
            }
            (Stmt::Use(xs), AnalysisKind::Live) => {
                s.extend(xs.iter().copied());
            }
            (Stmt::Use(_), _) => {}
            (_, AnalysisKind::Reach) => {}
            (st, _) => panic!("not straight-line: {st:?}"),
        }
        states.push(s.clone());
    }
    // Per-vertex alignment: transfers sit on a statement vertex's outgoing
    // edge and the chain's first edge (out of start, or out of the
    // reversed start = exit) is an identity no-op. Forward: vertex 0 and
    // vertex 1 both hold ∅. Backward: the old start vertex copies the
    // final state.
    if kind == AnalysisKind::Live {
        states.push(s.clone());
    } else {
        states.insert(0, BTreeSet::new());
    }
    states
}

#[test]
fn straight_line_programs_match_interpreter() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let kinds = [
        AnalysisKind::PossUninit,
        AnalysisKind::SimpUninit,
        AnalysisKind::ReachDefs,
        AnalysisKind::Live,
    ];
    for trial in 0..40 {
        let nvars = 3usize;
        let len = rng.gen_range(1..12);
        let body: Vec<Stmt> = (0..len)
            .map(|_| match rng.gen_range(0..3) {
                0 => Stmt::Decl(vec![rng.gen_range(0..nvars)]),
                1 => {
                    let uses =
                        (0..rng.gen_range(0..3usize)).map(|_| rng.gen_range(0..nvars)).collect();
                    Stmt::Assign(rng.gen_range(0..nvars), uses)
                }
                _ => Stmt::Use((0..rng.gen_range(1..3usize)).map(|_| rng.gen_range(0..nvars)).collect()),
            })
            .collect();
        let prog = MiniProgram {
            procs: vec![MiniProc { name: "p".into(), params: vec![], nvars, body: body.clone() }],
        };
        for kind in kinds {
            let bytes = gen_analysis(&prog, kind);
            let (sg, dom, rels) = parse_instance(&bytes).unwrap();
            let (ix, _, _, _) = build_index(sg, dom, rels, 16);
            let p = &ix.sg.procedures[0];
            let start = p.start;
            let ans = ix.source_query(start, 0);
            let states = interpret(kind, &body);
            // Vertex k of the lowered chain is vertex index k; for the
            // reversed (liveness) instance the chain reads backwards.
            for (k, state) in states.iter().enumerate() {
                let v = if kind == AnalysisKind::Live { (len + 1) - k } else { k };
                let li = ix.sg.local_index(p.vertices[v]) as usize;
                for x in 0..nvars {
                    assert_eq!(
                        ans.get(li, x as u32 + 1),
                        state.contains(&x),
                        "trial {trial} kind {kind:?} vertex {v} var {x}\nbody: {body:?}"
                    );
                }
            }
        }
    }
}
