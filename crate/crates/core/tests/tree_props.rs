//! Structural checks on tree decompositions: a known small graph with
//! treewidth 2, validity and balance bounds on random graphs, separator
//! (cut) verification, and LCA answers against a naive walk.

mod common;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ifds_core::tree::{balance_binarize, decompose, verify_cut_property, TreeLayout};

/// 7-vertex graph known to have treewidth 2.
fn known_graph() -> (Vec<u32>, Vec<(u32, u32)>) {
    let vertices = (1..=7).collect();
    let edges =
        vec![(5, 1), (1, 2), (4, 5), (4, 3), (3, 4), (2, 3), (2, 7), (7, 6), (6, 2)];
    (vertices, edges)
}

#[test]
fn known_graph_gets_width_two() {
    let (vs, es) = known_graph();
    let td = decompose(&vs, &es);
    td.validate(&vs, &es).unwrap();
    assert_eq!(td.width, 2);
}

#[test]
fn balancing_preserves_validity_and_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1usize, 2, 3, 8, 40, 150] {
        for trial in 0..4 {
            let vs: Vec<u32> = (0..n as u32).collect();
            let mut es: Vec<(u32, u32)> = (0..n.saturating_sub(1))
                .map(|i| (i as u32, i as u32 + 1))
                .collect();
            for _ in 0..n {
                let a = rng.gen_range(0..n as u32);
                let b = rng.gen_range(0..n as u32);
                if a != b && rng.gen_bool(0.5) {
                    es.push((a, b));
                }
            }
            let raw = decompose(&vs, &es);
            raw.validate(&vs, &es).unwrap_or_else(|e| panic!("raw n={n} trial={trial}: {e}"));
            let bal = balance_binarize(&raw);
            bal.validate(&vs, &es).unwrap_or_else(|e| panic!("bal n={n} trial={trial}: {e}"));
            assert!(bal.is_binary(), "n={n} trial={trial}: balanced tree not binary");
            assert!(bal.width <= 4 * raw.width + 3, "n={n}: width {} vs raw {}", bal.width, raw.width);
            let cap = 4.0 * (bal.bag_count().max(2) as f64).log2();
            assert!(
                (bal.height() as f64) <= cap + 1.0,
                "n={n}: height {} bags {}",
                bal.height(),
                bal.bag_count()
            );
            let checked = verify_cut_property(&bal, &vs, &es, 200).unwrap();
            assert!(checked > 0 || n <= 2);
        }
    }
}

#[test]
fn lca_matches_naive_walk() {
    let (vs, es) = known_graph();
    let layout = TreeLayout::build(balance_binarize(&decompose(&vs, &es)));
    let td = &layout.td;
    let naive = |mut a: u32, mut b: u32| {
        while td.bags[a as usize].depth > td.bags[b as usize].depth {
            a = td.bags[a as usize].parent.unwrap();
        }
        while td.bags[b as usize].depth > td.bags[a as usize].depth {
            b = td.bags[b as usize].parent.unwrap();
        }
        while a != b {
            a = td.bags[a as usize].parent.unwrap();
            b = td.bags[b as usize].parent.unwrap();
        }
        a
    };
    let nb = td.bag_count() as u32;
    for a in 0..nb {
        for b in 0..nb {
            assert_eq!(layout.lca.lca(a, b), naive(a, b), "lca({a},{b})");
        }
    }
}

#[test]
fn layout_offsets_are_consistent() {
    let cfg = common::GenCfg::small();
    for seed in 300..310u64 {
        let bytes = common::gen_instance(seed, &cfg);
        let (sg, _, _) = common::parse(&bytes);
        for p in &sg.procedures {
            let layout = TreeLayout::build(balance_binarize(&decompose(&p.vertices, &p.intra_edges)));
            let td = &layout.td;
            // Every vertex has a root bag that actually contains it, and
            // its pre-order position lies in that bag's subtree range.
            for &v in &p.vertices {
                let rb = layout.root_bag[&v] as usize;
                assert!(td.bags[rb].vertices.contains(&v));
                let pp = layout.pre_pos[&v];
                let (s, l) = (layout.subtree_start[rb], layout.subtree_len[rb]);
                assert!(pp >= s && pp < s + l, "v={v}");
                assert_eq!(layout.pre_list[pp], v);
            }
            // Segment offsets tile [0, delta(b)) walking own bag upward.
            for (b, bag) in td.bags.iter().enumerate() {
                let mut expect = 0usize;
                let mut anc = b;
                let mut jds: Vec<usize> = Vec::new();
                loop {
                    jds.push(anc);
                    match td.bags[anc].parent {
                        Some(p) => anc = p as usize,
                        None => break,
                    }
                }
                for &a in &jds {
                    let jd = td.bags[a].depth as usize;
                    assert_eq!(layout.seg_off[b][jd], expect, "bag {b} anc {a}");
                    expect += td.bags[a].vertices.len();
                }
                assert_eq!(expect, layout.delta[b]);
                let _ = bag;
            }
        }
    }
}
