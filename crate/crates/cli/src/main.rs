//! `netclust` command-line tool: build and persist an index, answer queries
//! and run benchmark grids.

mod bench;
mod record;

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use netclust::clustering::{one_median_fast, one_median_simple, p_center, p_median};
use netclust::{
    load_points, persist, AlgoParams, ClusteringResult, Error, InputFormat, NetIndex, PointId,
};

use record::{OutputFormat, QueryRecord};

#[derive(Parser)]
#[command(
    name = "netclust",
    version,
    about = "Net-hierarchy index with approximate median and center queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a point file and write it to disk.
    Build {
        /// Point file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Index file to write.
        #[arg(long)]
        out: PathBuf,
        /// List radius constant stored with the index.
        #[arg(long, default_value_t = 8)]
        c: u32,
        #[arg(long, value_enum, default_value_t = Format::Coords)]
        format: Format,
    },
    /// Answer one clustering query against a stored index.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Query file, one point id per line.
        #[arg(long)]
        q: PathBuf,
        #[arg(long, value_enum, default_value_t = Objective::Median)]
        objective: Objective,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Scan lists with the analysis constant (rebuilds lists with c = 60
        /// if the stored index is shorter).
        #[arg(long)]
        strict_constants: bool,
        /// 1-median variant.
        #[arg(long, value_enum, default_value_t = MedianAlgo::Fast)]
        median_algo: MedianAlgo,
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        output: OutputFormat,
    },
    /// Run a grid of queries on synthetic corpora and report quality and timings.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Coords,
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Objective {
    Median,
    Center,
}

impl Objective {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Objective::Median => "median",
            Objective::Center => "center",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MedianAlgo {
    Fast,
    Simple,
}

/// Failure with its exit status.
pub(crate) enum Failure {
    Usage(String),
    Data(String),
    Guard(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Guard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Guard(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::TooManyCombinations { .. } => Failure::Guard(msg),
            Error::InvalidEps(_)
            | Error::InvalidParams(_)
            | Error::EmptyQuery
            | Error::ListRadiusTooLarge { .. } => Failure::Usage(msg),
            _ => Failure::Data(msg),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn cmd_build(input: &Path, out: &Path, c: u32, format: Format) -> Result<(), Failure> {
    let file = File::open(input).map_err(|e| io_failure(input, e))?;
    let format = match format {
        Format::Coords => InputFormat::Coords,
        Format::Matrix => InputFormat::Matrix,
    };
    let points = load_points(BufReader::new(file), format)?;
    let start = Instant::now();
    let index = NetIndex::build(points, c)?;
    let took = start.elapsed();
    persist::save_file(&index, out)?;
    let aspect = if index.len() >= 2 {
        index.points().compute_stats()?.aspect_ratio
    } else {
        1.0
    };
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let _ = writeln!(w, "m\t{}", index.len());
    let _ = writeln!(w, "i_top\t{}", index.i_top());
    let _ = writeln!(w, "aspect_ratio\t{aspect}");
    let _ = writeln!(w, "nontrivial_lists\t{}", index.lists().nontrivial_count());
    let _ = writeln!(w, "build_seconds\t{:.6}", took.as_secs_f64());
    Ok(())
}

/// Point ids from a query file; blank lines and `#` comments are skipped.
fn read_query(path: &Path) -> Result<Vec<PointId>, Failure> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    let mut q = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_failure(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let id: u32 = t.parse().map_err(|_| {
            Failure::Data(format!(
                "{}:{}: invalid point id {t:?}",
                path.display(),
                k + 1
            ))
        })?;
        q.push(PointId(id));
    }
    if q.is_empty() {
        return Err(Failure::Usage(format!(
            "{}: query file holds no point ids",
            path.display()
        )));
    }
    Ok(q)
}

/// Runs one query with the CLI's algorithm choices.
pub(crate) fn run_query(
    index: &NetIndex,
    q: &[PointId],
    objective: Objective,
    p: usize,
    eps: f64,
    params: &AlgoParams,
    simple: bool,
) -> netclust::Result<ClusteringResult> {
    match (objective, p) {
        (Objective::Median, 1) if simple => one_median_simple(index, q, eps),
        (Objective::Median, 1) => one_median_fast(index, q, params),
        (Objective::Median, _) => p_median(index, q, p, params),
        (Objective::Center, _) => p_center(index, q, p, eps),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    index_path: &Path,
    q_path: &Path,
    objective: Objective,
    p: usize,
    eps: f64,
    strict: bool,
    algo: MedianAlgo,
    output: OutputFormat,
) -> Result<(), Failure> {
    if p == 0 {
        return Err(Failure::Usage("p must be at least 1".into()));
    }
    let params = if strict {
        AlgoParams::strict(eps)?
    } else {
        AlgoParams::new(eps)?
    };
    let q = read_query(q_path)?;
    let mut index = persist::load_file(index_path)?;
    if strict && index.lists().c() < params.list_c {
        index = NetIndex::build(index.points().clone(), params.list_c)?;
    }
    let start = Instant::now();
    let result = run_query(
        &index,
        &q,
        objective,
        p,
        eps,
        &params,
        matches!(algo, MedianAlgo::Simple),
    )?;
    let took = start.elapsed();
    let rec = QueryRecord::new(objective, p, eps, q.len(), &result, took.as_secs_f64());
    let stdout = io::stdout();
    rec.write(&mut stdout.lock(), output)
        .map_err(|e| Failure::Data(format!("writing output: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build {
            input,
            out,
            c,
            format,
        } => cmd_build(&input, &out, c, format),
        Command::Query {
            index,
            q,
            objective,
            p,
            eps,
            strict_constants,
            median_algo,
            output,
        } => cmd_query(
            &index,
            &q,
            objective,
            p,
            eps,
            strict_constants,
            median_algo,
            output,
        ),
        Command::Bench(args) => bench::cmd_bench(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
