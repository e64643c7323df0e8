//! Query result records in TSV or JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use netclust::ClusteringResult;
use serde::Serialize;

use crate::Objective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Serialize)]
pub struct QueryRecord {
    pub objective: &'static str,
    pub p: usize,
    pub eps: f64,
    pub n: usize,
    pub objective_original_units: f64,
    pub objective_normalized: f64,
    pub centers: Vec<u32>,
    pub final_level: Option<i32>,
    pub exhausted: bool,
    pub candidates: usize,
    pub representatives: usize,
    pub seed_size: usize,
    pub coreset_size: usize,
    pub reps_history: Vec<usize>,
    pub query_seconds: f64,
}

const HEADER: [&str; 15] = [
    "objective",
    "p",
    "eps",
    "n",
    "objective_original_units",
    "objective_normalized",
    "centers",
    "final_level",
    "exhausted",
    "candidates",
    "representatives",
    "seed_size",
    "coreset_size",
    "reps_history",
    "query_seconds",
];

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl QueryRecord {
    pub fn new(
        objective: Objective,
        p: usize,
        eps: f64,
        n: usize,
        r: &ClusteringResult,
        seconds: f64,
    ) -> Self {
        QueryRecord {
            objective: objective.name(),
            p,
            eps,
            n,
            objective_original_units: r.objective_original,
            objective_normalized: r.objective,
            centers: r.centers.iter().map(|c| c.0).collect(),
            final_level: r.trace.final_level,
            exhausted: r.trace.exhausted,
            candidates: r.trace.candidates,
            representatives: r.trace.representatives,
            seed_size: r.trace.seed_size,
            coreset_size: r.trace.coreset_size,
            reps_history: r.trace.reps_history.clone(),
            query_seconds: seconds,
        }
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.objective.to_string(),
            self.p.to_string(),
            self.eps.to_string(),
            self.n.to_string(),
            self.objective_original_units.to_string(),
            self.objective_normalized.to_string(),
            join(&self.centers),
            self.final_level.map_or(String::new(), |l| l.to_string()),
            self.exhausted.to_string(),
            self.candidates.to_string(),
            self.representatives.to_string(),
            self.seed_size.to_string(),
            self.coreset_size.to_string(),
            join(&self.reps_history),
            format!("{:.6}", self.query_seconds),
        ]
    }

    pub fn write<W: Write>(&self, w: &mut W, format: OutputFormat) -> io::Result<()> {
        match format {
            OutputFormat::Tsv => {
                writeln!(w, "{}", HEADER.join("\t"))?;
                writeln!(w, "{}", self.row().join("\t"))
            }
            OutputFormat::Json => {
                serde_json::to_writer(&mut *w, self)?;
                writeln!(w)
            }
        }
    }
}
