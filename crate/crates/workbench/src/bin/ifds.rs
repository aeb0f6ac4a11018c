use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use ifds_core::baselines::{nopp_pair, nopp_source, CppTable, OdCache};
use ifds_core::flow::build_exploded;
use ifds_core::index_io::{load_index, save_index};
use ifds_core::instance::{parse_instance, FactId, VertexId};
use ifds_core::query::{build_index, QueryIndex, SourceAnswer};
use ifds_core::summary::compute_summaries;

use ifds_workbench::analyses::{gen_analysis, AnalysisKind};
use ifds_workbench::bench::{bench_instance, write_csv, Algo, BenchOpts};
use ifds_workbench::randgen::{gen_program, gen_random, RandomSpec};

#[derive(Parser)]
#[command(name = "ifds", about = "Same-context interprocedural reachability toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a query index from an instance file.
    Preprocess {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Warn when a procedure's decomposition exceeds this width.
        #[arg(long, default_value_t = 64)]
        width_cap: usize,
    },
    /// Answer a query file against a stored index.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Worker threads per query (tw only).
        #[arg(long, default_value_t = 1)]
        par: usize,
        #[arg(long, default_value = "tw")]
        baseline: String,
    },
    /// Generate an instance file.
    Gen {
        /// random | reach | poss-uninit | simp-uninit | live | reach-defs
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Target vertex count.
        #[arg(long)]
        n: usize,
        /// |D| for kind=random; variables per procedure otherwise.
        #[arg(long, default_value_t = 4)]
        domain: usize,
        #[arg(long, default_value_t = 40)]
        proc_size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Benchmark strategies over one instance and append CSV rows.
    Bench {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 10000)]
        pairs: usize,
        #[arg(long, default_value_t = 100)]
        sources: usize,
        /// Comma-separated subset of tw,nopp,cpp,od.
        #[arg(long, default_value = "tw,cpp,od,nopp")]
        algos: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Build/query budget per strategy, e.g. "300s" or "500ms".
        #[arg(long, default_value = "300s")]
        budget: String,
        #[arg(long, default_value = "bench.csv")]
        csv: PathBuf,
    },
}

fn env_seed(cli_seed: u64) -> u64 {
    std::env::var("IFDS_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(cli_seed)
}

fn parse_budget(s: &str) -> Result<Duration> {
    let s = s.trim();
    if let Some(ms) = s.strip_suffix("ms") {
        return Ok(Duration::from_millis(ms.parse()?));
    }
    if let Some(sec) = s.strip_suffix('s') {
        return Ok(Duration::from_secs_f64(sec.parse()?));
    }
    Ok(Duration::from_secs(s.parse()?))
}

fn resolve_vertex(ix: &QueryIndex, name: &str) -> Result<VertexId> {
    ix.sg.vertex_by_name(name).ok_or_else(|| anyhow!("unknown vertex {name:?}"))
}

fn resolve_fact(ix: &QueryIndex, name: &str) -> Result<FactId> {
    ix.dom.index_of(name).ok_or_else(|| anyhow!("unknown fact {name:?}"))
}

fn print_source(ix: &QueryIndex, ans: &SourceAnswer) {
    let p = &ix.sg.procedures[ans.proc as usize];
    let mut legend = String::from("vertexOrder");
    for &v in &p.vertices {
        legend.push(' ');
        legend.push_str(ix.sg.vertex_name(v));
    }
    legend.push_str(" factOrder 0");
    for f in ix.dom.facts() {
        legend.push(' ');
        legend.push_str(f);
    }
    println!("{legend}");
    println!("{}", ans.to_hex());
}

fn run_queries(index: &PathBuf, queries: &PathBuf, par: usize, baseline: &str) -> Result<()> {
    let ix = load_index(index).context("loading index")?;
    let text = std::fs::read_to_string(queries).context("reading query file")?;

    // Baselines work off the summarized graph embedded in the instance.
    let need_gh = baseline != "tw";
    let gh = if need_gh {
        let eg = build_exploded(&ix.sg, &ix.dom, &ix.rels);
        Some(compute_summaries(&ix.sg, &eg).1)
    } else {
        None
    };
    let cpp = if baseline == "cpp" {
        Some(
            CppTable::build(gh.as_ref().unwrap(), &ix.sg, Duration::from_secs(3600))
                .map_err(|o| anyhow!("closure table build over budget after {:?}", o.elapsed))?,
        )
    } else {
        None
    };
    let mut od = gh.as_ref().map(OdCache::new);

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["pair", u, d1, v, d2] => {
                let (u, d1) = (resolve_vertex(&ix, u)?, resolve_fact(&ix, d1)?);
                let (v, d2) = (resolve_vertex(&ix, v)?, resolve_fact(&ix, d2)?);
                let ans = match baseline {
                    "tw" => {
                        if par > 1 {
                            ix.pair_query_parallel(u, d1, v, d2, par)
                        } else {
                            ix.pair_query(u, d1, v, d2)
                        }
                    }
                    "nopp" => nopp_pair(gh.as_ref().unwrap(), &ix.sg, u, d1, v, d2),
                    "cpp" => cpp.as_ref().unwrap().pair(&ix.sg, u, d1, v, d2),
                    "od" => od.as_mut().unwrap().pair(&ix.sg, u, d1, v, d2),
                    other => bail!("unknown baseline {other:?}"),
                };
                println!("{}", if ans { 1 } else { 0 });
            }
            ["source", u, d1] => {
                let (u, d1) = (resolve_vertex(&ix, u)?, resolve_fact(&ix, d1)?);
                let ans = match baseline {
                    "tw" => ix.source_query_parallel(u, d1, par),
                    "nopp" => nopp_source(gh.as_ref().unwrap(), &ix, u, d1),
                    "cpp" => cpp.as_ref().unwrap().source(&ix, u, d1),
                    "od" => od.as_mut().unwrap().source(&ix, u, d1),
                    other => bail!("unknown baseline {other:?}"),
                };
                print_source(&ix, &ans);
            }
            _ => bail!("query line {}: expected `pair u d1 v d2` or `source u d1`", lineno + 1),
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Preprocess { instance, out, width_cap } => {
            let bytes = std::fs::read(&instance).context("reading instance")?;
            let (sg, dom, rels) = parse_instance(&bytes).context("parsing instance")?;
            let t = std::time::Instant::now();
            let (ix, stats, summaries, _gh) = build_index(sg, dom, rels, width_cap);
            save_index(&ix, &out).context("writing index")?;
            eprintln!(
                "indexed {} vertices, {} procedures, {} summary edges in {:.1} ms",
                ix.sg.n(),
                ix.sg.procedures.len(),
                summaries.summaries.len(),
                t.elapsed().as_secs_f64() * 1e3
            );
            for p in &stats.width_cap_exceeded {
                eprintln!(
                    "warning: procedure {} decomposition width {} exceeds cap {}",
                    ix.sg.procedures[*p as usize].name,
                    stats.raw_widths[*p as usize],
                    width_cap
                );
            }
            Ok(())
        }
        Cmd::Query { index, queries, par, baseline } => run_queries(&index, &queries, par, &baseline),
        Cmd::Gen { kind, seed, n, domain, proc_size, out } => {
            let seed = env_seed(seed);
            let bytes = match kind.as_str() {
                "random" => {
                    let mut spec = RandomSpec::new(seed, n, domain);
                    spec.proc_size = proc_size;
                    gen_random(&spec)
                }
                other => {
                    let k = AnalysisKind::parse(other)
                        .ok_or_else(|| anyhow!("unknown kind {other:?}"))?;
                    gen_analysis(&gen_program(seed, n, domain, proc_size, 0.08), k)
                }
            };
            std::fs::write(&out, bytes).context("writing instance")?;
            Ok(())
        }
        Cmd::Bench { instance, pairs, sources, algos, threads, budget, csv } => {
            let bytes = std::fs::read(&instance).context("reading instance")?;
            let algos = algos
                .split(',')
                .map(|a| Algo::parse(a.trim()).ok_or_else(|| anyhow!("unknown algo {a:?}")))
                .collect::<Result<Vec<_>>>()?;
            let opts = BenchOpts {
                pairs,
                sources,
                algos,
                threads,
                budget: parse_budget(&budget)?,
                seed: env_seed(42),
            };
            let tag = instance.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
            let rows = bench_instance(tag, &bytes, &opts)?;
            for r in &rows {
                println!("{}", r.csv());
            }
            write_csv(&csv, &rows)?;
            Ok(())
        }
    }
}
