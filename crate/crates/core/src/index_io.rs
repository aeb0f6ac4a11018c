//! Binary serialization of a built `QueryIndex`. See docs/index-format.md
//! for the byte layout. The file embeds the instance (as its JSON form)
//! plus the per-procedure bag trees and the reachability bit strings;
//! cheap derived structures (LCA tables, segment offsets, pre-order
//! positions) are rebuilt on load.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::bits::BitString;
use crate::instance::{parse_instance, serialize_instance, InstanceError};
use crate::query::QueryIndex;
use crate::reach::{AncestorSets, DescendantSets};
use crate::tree::{Bag, TreeDecomposition, TreeLayout};

const MAGIC: &[u8; 8] = b"IFDSIX01";

#[derive(Debug, Error)]
pub enum IndexIoError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("malformed index: {0}")]
    Malformed(String),
    #[error("embedded instance invalid: {0}")]
    Instance(#[from] InstanceError),
}

fn put_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn put_bits(w: &mut impl Write, b: &BitString) -> io::Result<()> {
    put_u64(w, b.len() as u64)?;
    put_u64(w, b.words().len() as u64)?;
    for &word in b.words() {
        put_u64(w, word)?;
    }
    Ok(())
}

fn get_bits(r: &mut impl Read) -> Result<BitString, IndexIoError> {
    let len = get_u64(r)? as usize;
    let nwords = get_u64(r)? as usize;
    if nwords != len.div_ceil(64) {
        return Err(IndexIoError::Malformed(format!("bit string {len} bits / {nwords} words")));
    }
    let mut words = Vec::with_capacity(nwords);
    for _ in 0..nwords {
        words.push(get_u64(r)?);
    }
    Ok(BitString::from_words(len, words))
}

pub fn save_index(ix: &QueryIndex, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;

    let inst = serde_json::to_vec(&serialize_instance(&ix.sg, &ix.dom, &ix.rels))
        .expect("instance serializes");
    put_u64(&mut w, inst.len() as u64)?;
    w.write_all(&inst)?;

    put_u64(&mut w, ix.layouts.len() as u64)?;
    for layout in &ix.layouts {
        let td = &layout.td;
        put_u64(&mut w, td.bags.len() as u64)?;
        for b in &td.bags {
            put_u64(&mut w, b.parent.map_or(0, |p| p as u64 + 1))?;
            put_u64(&mut w, b.vertices.len() as u64)?;
            for &v in &b.vertices {
                put_u64(&mut w, v as u64)?;
            }
        }
    }

    let nx = ix.anc.fwd.len();
    put_u64(&mut w, nx as u64)?;
    put_u64(&mut w, ix.dom.dstar() as u64)?;
    for set in [&ix.anc.fwd, &ix.anc.bwd, &ix.desc.fwd] {
        for b in set.iter() {
            put_bits(&mut w, b)?;
        }
    }
    w.flush()
}

fn rebuild_td(bags_raw: Vec<(Option<u32>, Vec<u32>)>) -> Result<TreeDecomposition, IndexIoError> {
    let n = bags_raw.len();
    let mut bags: Vec<Bag> = bags_raw
        .iter()
        .map(|(parent, vertices)| Bag {
            vertices: vertices.clone(),
            parent: *parent,
            children: Vec::new(),
            depth: 0,
        })
        .collect();
    let mut root = None;
    for i in 0..n {
        match bags[i].parent {
            None => {
                if root.replace(i as u32).is_some() {
                    return Err(IndexIoError::Malformed("two root bags".into()));
                }
            }
            Some(p) if (p as usize) < n => bags[p as usize].children.push(i as u32),
            Some(p) => return Err(IndexIoError::Malformed(format!("bag parent {p} out of range"))),
        }
    }
    let root = root.ok_or_else(|| IndexIoError::Malformed("no root bag".into()))?;
    // Depths top-down; also detects parent cycles (unvisited bags).
    let mut order = vec![root];
    let mut seen = 1usize;
    let mut qi = 0;
    while qi < order.len() {
        let b = order[qi] as usize;
        qi += 1;
        for &c in &bags[b].children.clone() {
            bags[c as usize].depth = bags[b].depth + 1;
            order.push(c);
            seen += 1;
        }
    }
    if seen != n {
        return Err(IndexIoError::Malformed("bag tree is not connected".into()));
    }
    let width = bags.iter().map(|b| b.vertices.len()).max().unwrap_or(1) - 1;
    Ok(TreeDecomposition { bags, root, width })
}

pub fn load_index(path: &Path) -> Result<QueryIndex, IndexIoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(IndexIoError::BadMagic);
    }

    let inst_len = get_u64(&mut r)? as usize;
    let mut inst = vec![0u8; inst_len];
    r.read_exact(&mut inst)?;
    let (sg, dom, rels) = parse_instance(&inst)?;

    let nprocs = get_u64(&mut r)? as usize;
    if nprocs != sg.procedures.len() {
        return Err(IndexIoError::Malformed("procedure count mismatch".into()));
    }
    let mut layouts = Vec::with_capacity(nprocs);
    for _ in 0..nprocs {
        let nbags = get_u64(&mut r)? as usize;
        let mut bags_raw = Vec::with_capacity(nbags);
        for _ in 0..nbags {
            let parent = match get_u64(&mut r)? {
                0 => None,
                p => Some((p - 1) as u32),
            };
            let nverts = get_u64(&mut r)? as usize;
            let mut verts = Vec::with_capacity(nverts);
            for _ in 0..nverts {
                verts.push(get_u64(&mut r)? as u32);
            }
            bags_raw.push((parent, verts));
        }
        layouts.push(TreeLayout::build(rebuild_td(bags_raw)?));
    }

    let nx = get_u64(&mut r)? as usize;
    let dstar = get_u64(&mut r)? as u32;
    if dstar != dom.dstar() || nx != sg.n() as usize * dstar as usize {
        return Err(IndexIoError::Malformed("exploded size mismatch".into()));
    }
    let mut anc = AncestorSets::empty(nx, dstar);
    let mut desc = DescendantSets::empty(nx, dstar);
    for x in 0..nx {
        anc.fwd[x] = get_bits(&mut r)?;
    }
    for x in 0..nx {
        anc.bwd[x] = get_bits(&mut r)?;
    }
    for x in 0..nx {
        desc.fwd[x] = get_bits(&mut r)?;
    }
    Ok(QueryIndex { sg, dom, rels, layouts, anc, desc })
}
