//! Benchmark grids over synthetic corpora or point files.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::Args;
use netclust::corpus::{self, CorpusKind};
use netclust::oracle::{exact_one_center, exact_one_median, exact_p_center, exact_p_median};
use netclust::{load_points, AlgoParams, InputFormat, NetIndex, PointId, PointSet};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::record::OutputFormat;
use crate::{run_query, Failure, Objective};

/// Work budget (distance evaluations) under which the exact oracle runs.
const ORACLE_BUDGET: f64 = 5e7;

#[derive(Args)]
pub struct BenchArgs {
    /// Corpora: `line`, `grid2d`, `gaussian-mixture`, `coords:PATH` or
    /// `matrix:PATH`.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "line,grid2d,gaussian-mixture"
    )]
    corpus: Vec<CorpusSpec>,
    /// Corpus sizes m (ignored for point files).
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    sizes: Vec<usize>,
    /// Query sizes n.
    #[arg(long, value_delimiter = ',', default_value = "16,64")]
    n_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.1")]
    eps_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "median,center")]
    objectives: Vec<Objective>,
    /// Random queries per cell.
    #[arg(long, default_value_t = 3)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// List radius constant of the built indices.
    #[arg(long, default_value_t = 8)]
    c: u32,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
    output: OutputFormat,
}

#[derive(Clone, Debug)]
enum CorpusSpec {
    Synthetic(CorpusKind),
    File(InputFormat, PathBuf),
}

impl FromStr for CorpusSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("coords:") {
            Ok(CorpusSpec::File(InputFormat::Coords, path.into()))
        } else if let Some(path) = s.strip_prefix("matrix:") {
            Ok(CorpusSpec::File(InputFormat::Matrix, path.into()))
        } else {
            s.parse().map(CorpusSpec::Synthetic)
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    corpus: String,
    m: usize,
    n: usize,
    p: usize,
    eps: f64,
    objective: &'static str,
    algorithm: &'static str,
    value: Option<f64>,
    oracle: Option<f64>,
    ratio: Option<f64>,
    build_seconds: f64,
    query_seconds: Option<f64>,
    candidates: Option<usize>,
    status: String,
}

const HEADER: &str = "corpus\tm\tn\tp\teps\tobjective\talgorithm\tvalue\toracle\tratio\tbuild_seconds\tquery_seconds\tcandidates\tstatus";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

impl Row {
    fn tsv(&self) -> String {
        [
            self.corpus.clone(),
            self.m.to_string(),
            self.n.to_string(),
            self.p.to_string(),
            self.eps.to_string(),
            self.objective.to_string(),
            self.algorithm.to_string(),
            opt(self.value),
            opt(self.oracle),
            opt(self.ratio.map(|r| format!("{r:.6}"))),
            format!("{:.6}", self.build_seconds),
            opt(self.query_seconds.map(|t| format!("{t:.6}"))),
            opt(self.candidates),
            self.status.clone(),
        ]
        .join("\t")
    }
}

/// Whether the exhaustive oracle fits the work budget.
fn oracle_feasible(m: usize, n: usize, p: usize) -> bool {
    let mut subsets = 1.0f64;
    for k in 0..p {
        subsets *= (m - k.min(m)) as f64 / (k + 1) as f64;
    }
    subsets * (n * p) as f64 <= ORACLE_BUDGET
}

fn oracle(ps: &PointSet, q: &[PointId], objective: Objective, p: usize) -> Option<f64> {
    if !oracle_feasible(ps.len(), q.len(), p) {
        return None;
    }
    match (objective, p) {
        (Objective::Median, 1) => Some(exact_one_median(ps, q).1),
        (Objective::Center, 1) => Some(exact_one_center(ps, q).1),
        (Objective::Median, _) => exact_p_median(ps, q, p).ok().map(|r| r.1),
        (Objective::Center, _) => exact_p_center(ps, q, p).ok().map(|r| r.1),
    }
}

fn algorithms(objective: Objective, p: usize) -> &'static [(&'static str, bool)] {
    match (objective, p) {
        (Objective::Median, 1) => &[("one-median-fast", false), ("one-median-simple", true)],
        (Objective::Median, _) => &[("p-median", false)],
        (Objective::Center, _) => &[("p-center", false)],
    }
}

fn corpora(args: &BenchArgs) -> Result<Vec<(String, PointSet)>, Failure> {
    let mut out = Vec::new();
    for spec in &args.corpus {
        match spec {
            CorpusSpec::Synthetic(kind) => {
                for &m in &args.sizes {
                    out.push((kind.to_string(), corpus::generate(*kind, m, args.seed)?));
                }
            }
            CorpusSpec::File(format, path) => {
                let f = File::open(path)
                    .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
                out.push((
                    path.display().to_string(),
                    load_points(BufReader::new(f), *format)?,
                ));
            }
        }
    }
    Ok(out)
}

fn rows(args: &BenchArgs) -> Result<Vec<Row>, Failure> {
    for &eps in &args.eps_grid {
        AlgoParams::new(eps)?;
    }
    if args.p_grid.contains(&0) {
        return Err(Failure::Usage("p must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = Vec::new();
    for (name, ps) in corpora(args)? {
        let m = ps.len();
        let start = Instant::now();
        let index = NetIndex::build(ps, args.c)?;
        let build_seconds = start.elapsed().as_secs_f64();
        for &n in args.n_grid.iter().filter(|&&n| n >= 1 && n <= m) {
            for _ in 0..args.queries {
                let mut q: Vec<PointId> = sample(&mut rng, m, n)
                    .into_iter()
                    .map(|i| PointId(i as u32))
                    .collect();
                q.sort_unstable();
                for &objective in &args.objectives {
                    for &p in &args.p_grid {
                        let best = oracle(index.points(), &q, objective, p);
                        for &eps in &args.eps_grid {
                            let params = AlgoParams::new(eps)?;
                            for &(algorithm, simple) in algorithms(objective, p) {
                                let t = Instant::now();
                                let res = run_query(&index, &q, objective, p, eps, &params, simple);
                                let query_seconds = t.elapsed().as_secs_f64();
                                let mut row = Row {
                                    corpus: name.clone(),
                                    m,
                                    n,
                                    p,
                                    eps,
                                    objective: objective.name(),
                                    algorithm,
                                    value: None,
                                    oracle: best,
                                    ratio: None,
                                    build_seconds,
                                    query_seconds: None,
                                    candidates: None,
                                    status: "ok".into(),
                                };
                                match res {
                                    Ok(r) => {
                                        row.value = Some(r.objective);
                                        row.query_seconds = Some(query_seconds);
                                        row.candidates = Some(r.trace.candidates);
                                        row.ratio =
                                            best.map(
                                                |o| if o == 0.0 { 1.0 } else { r.objective / o },
                                            );
                                    }
                                    Err(e) => row.status = format!("error: {e}"),
                                }
                                out.push(row);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn write_rows<W: Write>(w: &mut W, rows: &[Row], format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Tsv => {
            writeln!(w, "{HEADER}")?;
            for r in rows {
                writeln!(w, "{}", r.tsv())?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let rows = rows(args)?;
    let res = match &args.out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            write_rows(&mut BufWriter::new(f), &rows, args.output)
        }
        None => write_rows(&mut io::stdout().lock(), &rows, args.output),
    };
    match res {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(Failure::Data(format!("writing output: {e}")))
        }
        _ => Ok(()),
    }
}
