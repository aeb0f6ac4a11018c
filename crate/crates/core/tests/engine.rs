//! End-to-end checks on a handcrafted two-procedure null-pointer
//! instance whose exploded graph and summary edges are known exactly.

mod common;

use ifds_core::baselines::{nopp_pair, nopp_source, CppTable, OdCache};
use ifds_core::flow::build_exploded;
use ifds_core::query::build_index;
use ifds_core::summary::dump_summaries;

/// Two procedures: `f(int*& x, int* y)` overwriting its local `y`, and
/// `main` declaring two maybe-null pointers and calling `f`. Facts `nx`
/// ("x may be null") and `ny`.
pub const NULLNESS: &str = r#"{
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

#[test]
fn nullness_summaries_are_exact() {
    let (sg, dom, rels) = common::parse(NULLNESS.as_bytes());
    let eg = build_exploded(&sg, &dom, &rels);
    let (summaries, _) = ifds_core::summary::compute_summaries(&sg, &eg);
    let dump = dump_summaries(&sg, &dom, &summaries);
    assert_eq!(dump, "summary c7 0 r7 0\nsummary c7 nx r7 nx");
}

#[test]
fn nullness_pair_queries() {
    let (sg, dom, rels) = common::parse(NULLNESS.as_bytes());
    let (ix, stats, _, _) = build_index(sg, dom, rels, 16);
    assert!(stats.width_cap_exceeded.is_empty());

    let v = |name: &str| ix.sg.vertex_by_name(name).unwrap();
    let d = |name: &str| ix.dom.index_of(name).unwrap();
    let (zero, nx, ny) = (d("0"), d("nx"), d("ny"));

    // Both pointers may be null at the use site v8.
    assert!(ix.pair_query(v("v5"), zero, v("v8"), nx));
    assert!(ix.pair_query(v("v5"), zero, v("v8"), ny));
    // nx survives the call through the callee, ny through the local copy.
    assert!(ix.pair_query(v("c7"), nx, v("r7"), nx));
    assert!(ix.pair_query(v("c7"), ny, v("r7"), ny));
    assert!(!ix.pair_query(v("c7"), ny, v("r7"), nx));
    // The callee kills its local ny at v2.
    assert!(ix.pair_query(v("v1"), ny, v("v2"), ny));
    assert!(!ix.pair_query(v("v1"), ny, v("v3"), ny));
    assert!(ix.pair_query(v("v1"), nx, v("v4"), nx));
    // Same-context answers never cross procedures.
    assert!(!ix.pair_query(v("v5"), zero, v("v4"), nx));
    assert!(!ix.pair_query(v("c7"), nx, v("v1"), nx));
    // Reflexive.
    assert!(ix.pair_query(v("v6"), ny, v("v6"), ny));
}

#[test]
fn nullness_source_query_matches_hand_computation() {
    let (sg, dom, rels) = common::parse(NULLNESS.as_bytes());
    let (ix, _, _, _) = build_index(sg, dom, rels, 16);
    let v = |name: &str| ix.sg.vertex_by_name(name).unwrap();
    let zero = ix.dom.index_of("0").unwrap();

    let ans = ix.source_query(v("v5"), zero);
    // main's vertex order: v5 v6 c7 r7 v8 v9; facts: 0 nx ny.
    let expect = [
        ("v5", [true, false, false]),
        ("v6", [true, false, false]),
        ("c7", [true, true, true]),
        ("r7", [true, true, true]),
        ("v8", [true, true, true]),
        ("v9", [true, true, true]),
    ];
    for (li, (name, row)) in expect.iter().enumerate() {
        for (d, &want) in row.iter().enumerate() {
            assert_eq!(ans.get(li, d as u32), want, "({name}, fact {d})");
        }
        let _ = name;
    }
}

#[test]
fn nullness_all_strategies_agree_everywhere() {
    let (sg, dom, rels) = common::parse(NULLNESS.as_bytes());
    let eg = build_exploded(&sg, &dom, &rels);
    let oracle = common::naive_same_context(&sg, &eg);
    let (ix, _, _, gh) = build_index(sg, dom, rels, 16);
    let cpp = CppTable::build(&gh, &ix.sg, std::time::Duration::from_secs(10)).unwrap();
    let mut od = OdCache::new(&gh);

    let dstar = ix.dstar();
    let n = ix.sg.n();
    for u in 0..n {
        for d1 in 0..dstar {
            for v in 0..n {
                for d2 in 0..dstar {
                    let want = ix.sg.proc_of(u) == ix.sg.proc_of(v)
                        && oracle[ifds_core::flow::xid(u, d1, dstar) as usize]
                            .get(ifds_core::flow::xid(v, d2, dstar) as usize);
                    assert_eq!(ix.pair_query(u, d1, v, d2), want, "tw ({u},{d1})→({v},{d2})");
                    assert_eq!(nopp_pair(&gh, &ix.sg, u, d1, v, d2), want, "nopp");
                    assert_eq!(cpp.pair(&ix.sg, u, d1, v, d2), want, "cpp");
                    assert_eq!(od.pair(&ix.sg, u, d1, v, d2), want, "od");
                }
            }
            assert_eq!(ix.source_query(u, d1), nopp_source(&gh, &ix, u, d1));
            assert_eq!(ix.source_query(u, d1), cpp.source(&ix, u, d1));
            assert_eq!(ix.source_query(u, d1), od.source(&ix, u, d1));
        }
    }
    // Memoization actually reuses traversals across the pair sweep.
    assert!(od.bfs_runs <= (n * dstar) as usize);
}
