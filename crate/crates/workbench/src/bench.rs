//! Benchmark harness: builds each requested strategy over one instance,
//! runs a shared batch of random pair and single-source queries, checks
//! that every strategy produces the same answer checksum, and appends CSV
//! rows (plus a gnuplot script next to the CSV).

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ifds_core::baselines::{nopp_pair, nopp_source, CppTable, OdCache};
use ifds_core::flow::build_exploded;
use ifds_core::instance::{parse_instance, FactId, VertexId};
use ifds_core::query::{build_index, QueryIndex, SourceAnswer};
use ifds_core::summary::{compute_summaries, GHat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Tw,
    Nopp,
    Cpp,
    Od,
}

impl Algo {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "tw" => Algo::Tw,
            "nopp" => Algo::Nopp,
            "cpp" => Algo::Cpp,
            "od" => Algo::Od,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Algo::Tw => "tw",
            Algo::Nopp => "nopp",
            Algo::Cpp => "cpp",
            Algo::Od => "od",
        }
    }
}

pub struct BenchOpts {
    pub pairs: usize,
    pub sources: usize,
    pub algos: Vec<Algo>,
    pub threads: usize,
    pub budget: Duration,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub instance: String,
    pub n: u32,
    pub exploded_size: usize,
    pub dsize: u32,
    pub width: usize,
    pub algo: &'static str,
    pub threads: usize,
    pub status: &'static str,
    pub prep_ms: f64,
    pub pair_mean_us: f64,
    pub pair_median_us: f64,
    pub source_mean_us: f64,
    pub source_median_us: f64,
    pub pair_count: usize,
    pub source_count: usize,
    pub checksum: u64,
}

pub const CSV_HEADER: &str = "instance,n,exploded_size,dsize,width,algo,threads,status,prep_ms,\
pair_mean_us,pair_median_us,source_mean_us,source_median_us,pair_count,source_count,checksum";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{},{},{:016x}",
            self.instance,
            self.n,
            self.exploded_size,
            self.dsize,
            self.width,
            self.algo,
            self.threads,
            self.status,
            self.prep_ms,
            self.pair_mean_us,
            self.pair_median_us,
            self.source_mean_us,
            self.source_median_us,
            self.pair_count,
            self.source_count,
            self.checksum
        )
    }
}

pub struct QuerySet {
    pub pairs: Vec<(VertexId, FactId, VertexId, FactId)>,
    pub sources: Vec<(VertexId, FactId)>,
}

/// Pair targets are drawn uniformly within the source's procedure.
pub fn sample_queries(ix: &QueryIndex, pairs: usize, sources: usize, seed: u64) -> QuerySet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dstar = ix.dstar();
    let mut qp = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let u = rng.gen_range(0..ix.sg.n());
        let p = &ix.sg.procedures[ix.sg.proc_of(u) as usize];
        let v = p.vertices[rng.gen_range(0..p.vertices.len())];
        qp.push((u, rng.gen_range(0..dstar), v, rng.gen_range(0..dstar)));
    }
    let qs = (0..sources)
        .map(|_| (rng.gen_range(0..ix.sg.n()), rng.gen_range(0..dstar)))
        .collect();
    QuerySet { pairs: qp, sources: qs }
}

fn mean_median(mut xs: Vec<f64>) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (mean, xs[xs.len() / 2])
}

struct Tally {
    pair_us: Vec<f64>,
    source_us: Vec<f64>,
    hasher: DefaultHasher,
    started: Instant,
    budget: Duration,
}

impl Tally {
    fn new(budget: Duration) -> Self {
        Tally {
            pair_us: Vec::new(),
            source_us: Vec::new(),
            hasher: DefaultHasher::new(),
            started: Instant::now(),
            budget,
        }
    }

    fn over_budget(&self) -> bool {
        self.started.elapsed() > self.budget
    }

    fn pair(&mut self, f: impl FnOnce() -> bool) {
        let t = Instant::now();
        let ans = f();
        self.pair_us.push(t.elapsed().as_secs_f64() * 1e6);
        ans.hash(&mut self.hasher);
    }

    fn source(&mut self, f: impl FnOnce() -> SourceAnswer) {
        let t = Instant::now();
        let ans = f();
        self.source_us.push(t.elapsed().as_secs_f64() * 1e6);
        ans.proc.hash(&mut self.hasher);
        ans.bits.words().hash(&mut self.hasher);
    }
}

/// Benchmarks one algorithm. `status` is "ok", "timeout" (build over
/// budget) or "partial" (query phase truncated by the budget).
fn run_algo(
    ix: &QueryIndex,
    gh: &GHat,
    prep_tw_ms: f64,
    raw_width: usize,
    algo: Algo,
    qs: &QuerySet,
    opts: &BenchOpts,
) -> (BenchRow, bool) {
    let mut row = BenchRow {
        instance: String::new(),
        n: ix.sg.n(),
        exploded_size: ix.sg.n() as usize * ix.dstar() as usize + gh.edge_count(),
        dsize: ix.dom.size(),
        width: raw_width,
        algo: algo.name(),
        threads: opts.threads,
        status: "ok",
        prep_ms: 0.0,
        pair_mean_us: 0.0,
        pair_median_us: 0.0,
        source_mean_us: 0.0,
        source_median_us: 0.0,
        pair_count: 0,
        source_count: 0,
        checksum: 0,
    };

    let mut tally = Tally::new(opts.budget);
    match algo {
        Algo::Tw => {
            row.prep_ms = prep_tw_ms;
            for &(u, d1, v, d2) in &qs.pairs {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                if opts.threads > 1 {
                    tally.pair(|| ix.pair_query_parallel(u, d1, v, d2, opts.threads));
                } else {
                    tally.pair(|| ix.pair_query(u, d1, v, d2));
                }
            }
            for &(u, d1) in &qs.sources {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                tally.source(|| ix.source_query_parallel(u, d1, opts.threads));
            }
        }
        Algo::Nopp => {
            // No preprocessing at all: summarization reruns per query.
            let eg = build_exploded(&ix.sg, &ix.dom, &ix.rels);
            for &(u, d1, v, d2) in &qs.pairs {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                tally.pair(|| {
                    let (_, gh2) = compute_summaries(&ix.sg, &eg);
                    nopp_pair(&gh2, &ix.sg, u, d1, v, d2)
                });
            }
            for &(u, d1) in &qs.sources {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                tally.source(|| {
                    let (_, gh2) = compute_summaries(&ix.sg, &eg);
                    nopp_source(&gh2, ix, u, d1)
                });
            }
        }
        Algo::Cpp => {
            let t = Instant::now();
            match CppTable::build(gh, &ix.sg, opts.budget) {
                Err(over) => {
                    row.status = "timeout";
                    row.prep_ms = over.elapsed.as_secs_f64() * 1e3;
                    return (row, false);
                }
                Ok(table) => {
                    row.prep_ms = prep_tw_ms + t.elapsed().as_secs_f64() * 1e3;
                    for &(u, d1, v, d2) in &qs.pairs {
                        tally.pair(|| table.pair(&ix.sg, u, d1, v, d2));
                    }
                    for &(u, d1) in &qs.sources {
                        tally.source(|| table.source(ix, u, d1));
                    }
                }
            }
        }
        Algo::Od => {
            let mut od = OdCache::new(gh);
            for &(u, d1, v, d2) in &qs.pairs {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                tally.pair(|| od.pair(&ix.sg, u, d1, v, d2));
            }
            for &(u, d1) in &qs.sources {
                if tally.over_budget() {
                    row.status = "partial";
                    break;
                }
                tally.source(|| od.source(ix, u, d1));
            }
        }
    }

    row.pair_count = tally.pair_us.len();
    row.source_count = tally.source_us.len();
    (row.pair_mean_us, row.pair_median_us) = mean_median(tally.pair_us);
    (row.source_mean_us, row.source_median_us) = mean_median(tally.source_us);
    row.checksum = tally.hasher.finish();
    let complete = row.status == "ok";
    (row, complete)
}

pub fn bench_instance(tag: &str, bytes: &[u8], opts: &BenchOpts) -> Result<Vec<BenchRow>> {
    let (sg, dom, rels) = parse_instance(bytes).context("parsing instance")?;
    let t = Instant::now();
    let (ix, stats, _summaries, gh) = build_index(sg, dom, rels, 64);
    let prep_tw_ms = t.elapsed().as_secs_f64() * 1e3;
    let raw_width = stats.raw_widths.iter().copied().max().unwrap_or(0);

    let qs = sample_queries(&ix, opts.pairs, opts.sources, opts.seed);
    let mut rows = Vec::new();
    let mut complete_sums: Vec<(Algo, u64)> = Vec::new();
    for &algo in &opts.algos {
        let (mut row, complete) = run_algo(&ix, &gh, prep_tw_ms, raw_width, algo, &qs, opts);
        row.instance = tag.to_string();
        if complete {
            complete_sums.push((algo, row.checksum));
        }
        rows.push(row);
    }
    // Answers must agree before any timing is trusted.
    if let Some(&(first, sum)) = complete_sums.first() {
        for &(algo, s) in &complete_sums[1..] {
            if s != sum {
                bail!("answer checksum mismatch: {} vs {}", first.name(), algo.name());
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{CSV_HEADER}")?;
    }
    for r in rows {
        writeln!(f, "{}", r.csv())?;
    }
    let gp = path.with_extension("gp");
    if !gp.exists() {
        std::fs::write(
            &gp,
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set logscale y\n\
             set xlabel 'instance size n'\n\
             set ylabel 'time'\n\
             plot 'bench.csv' using 2:9 with points title 'prep ms', \\\n\
                  '' using 2:10 with points title 'pair mean us'\n",
        )?;
    }
    Ok(())
}
