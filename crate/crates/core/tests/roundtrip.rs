//! Index files must reload into an engine that answers exactly like the
//! one that was saved.

mod common;

use std::path::PathBuf;

use ifds_core::index_io::{load_index, save_index};
use ifds_core::query::build_index;

fn temp_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ifds-test-{tag}-{}.idx", std::process::id()))
}

#[test]
fn saved_index_reloads_identically() {
    let cfg = common::GenCfg::small();
    for seed in 500..506u64 {
        let bytes = common::gen_instance(seed, &cfg);
        let (sg, dom, rels) = common::parse(&bytes);
        let (ix, _, _, _) = build_index(sg, dom, rels, 16);

        let path = temp_path(&format!("rt{seed}"));
        save_index(&ix, &path).unwrap();
        let loaded = load_index(&path).unwrap();
        std::fs::remove_file(&path).unwrap();

        assert_eq!(loaded.anc.fwd, ix.anc.fwd);
        assert_eq!(loaded.anc.bwd, ix.anc.bwd);
        assert_eq!(loaded.desc.fwd, ix.desc.fwd);

        let dstar = ix.dstar();
        for u in 0..ix.sg.n() {
            for d1 in 0..dstar {
                assert_eq!(
                    loaded.source_query(u, d1),
                    ix.source_query(u, d1),
                    "seed {seed}: source ({u},{d1})"
                );
                for v in 0..ix.sg.n() {
                    for d2 in 0..dstar {
                        assert_eq!(
                            loaded.pair_query(u, d1, v, d2),
                            ix.pair_query(u, d1, v, d2),
                            "seed {seed}: pair"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn load_rejects_garbage() {
    let path = temp_path("garbage");
    std::fs::write(&path, b"definitely not an index").unwrap();
    let err = match load_index(&path) {
        Err(e) => e,
        Ok(_) => panic!("garbage file loaded"),
    };
    std::fs::remove_file(&path).unwrap();
    assert!(matches!(err, ifds_core::index_io::IndexIoError::BadMagic));
}
