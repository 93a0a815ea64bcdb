//! Monte Carlo protocols.
//!
//! A run is a list of jobs `(cell, trial)`; each job is a pure function of the
//! config and its trial index, and jobs are evaluated in parallel but
//! collected in job order, so `trials.csv` does not depend on the thread
//! count.

mod config;
mod et;
mod radius;
mod record;
mod toeplitz_ac;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, ProtocolName, SCHEMA_VERSION};
pub use record::{join_list, parse_list, RootRow, Status, TrialRecord, CSV_COLUMNS};

use crate::error::Result;
use crate::Complex64;

/// One job: a cell of the parameter grid and a trial within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Job {
    pub cell: usize,
    pub trial: u64,
}

/// What a job produces.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub record: TrialRecord,
    /// Roots kept for plotting (first trial of each cell only).
    pub roots: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: String,
    pub records: usize,
    pub degenerate: usize,
    pub excluded: usize,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub protocol: ProtocolName,
    pub distribution: String,
    pub seed: u64,
    pub trials: usize,
    pub records: usize,
    pub degenerate: usize,
    pub excluded: usize,
    pub invariant_violations: usize,
    pub wall_time_seconds: f64,
    pub note: String,
    pub cells: Vec<CellSummary>,
    pub verdicts: Vec<Verdict>,
}

impl RunSummary {
    pub fn cell(&self, name: &str) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.cell == name)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub roots: Vec<RootRow>,
    pub summary: RunSummary,
}

/// Run the protocol named in the config.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let plan = Plan::new(config);
    let outcomes: Vec<Outcome> = plan
        .jobs
        .par_iter()
        .map(|job| plan.execute(config, *job))
        .collect();
    let mut records = Vec::with_capacity(outcomes.len());
    let mut roots = Vec::new();
    for o in outcomes {
        if let Some(zs) = &o.roots {
            roots.extend(zs.iter().map(|z| RootRow {
                cell: o.record.cell.clone(),
                trial_index: o.record.trial_index,
                re: z.re,
                im: z.im,
            }));
        }
        records.push(o.record);
    }
    let (cells, verdicts, note) = plan.summarize(config, &records);
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        protocol: config.name,
        distribution: config.distribution.name(),
        seed: config.seed,
        trials: config.trials,
        records: records.len(),
        degenerate: records.iter().filter(|r| r.degenerate).count(),
        excluded: records.iter().filter(|r| r.status != Status::Ok).count(),
        invariant_violations: records
            .iter()
            .filter(|r| r.inequalities_ok == Some(false))
            .count(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        note,
        cells,
        verdicts,
    };
    Ok(RunOutput {
        records,
        roots,
        summary,
    })
}

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ROOTS_FILE: &str = "roots.csv";

/// Write `trials.csv`, `roots.csv` and `summary.json` into `dir`.
pub fn write_run(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_records(&out.records, &dir.join(TRIALS_FILE))?;
    let mut w = csv::Writer::from_path(dir.join(ROOTS_FILE))?;
    if out.roots.is_empty() {
        w.write_record(["cell", "trial_index", "re", "im"])?;
    }
    for r in &out.roots {
        w.serialize(r)?;
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&out.summary)?;
    fs::write(dir.join(SUMMARY_FILE), json + "\n")?;
    Ok(())
}

pub fn write_records(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn read_roots(path: &Path) -> Result<Vec<RootRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// The job list and per-protocol dispatch.
pub(crate) struct Plan {
    pub cells: Vec<Cell>,
    pub jobs: Vec<Job>,
}

/// A point of the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cell {
    pub label: String,
    pub m: usize,
    pub n: usize,
    pub degree: usize,
}

impl Plan {
    fn new(config: &ExperimentConfig) -> Self {
        let cells = match config.name {
            ProtocolName::EtClustering | ProtocolName::DiscreteExample => et::cells(config),
            ProtocolName::InequalitySuite => et::suite_cells(config),
            ProtocolName::ToeplitzAnticoncentration => toeplitz_ac::anti_cells(config),
            ProtocolName::DetGrowth => toeplitz_ac::growth_cells(config),
            ProtocolName::ZeroRadius => radius::zero_cells(config),
            ProtocolName::PoleClustering => radius::pole_cells(config),
        };
        let mut jobs = Vec::with_capacity(cells.len() * config.trials);
        for cell in 0..cells.len() {
            for t in 0..config.trials {
                let trial = if config.name.shares_seeds_across_cells() {
                    t as u64
                } else {
                    (cell * config.trials + t) as u64
                };
                jobs.push(Job { cell, trial });
            }
        }
        Self { cells, jobs }
    }

    fn execute(&self, config: &ExperimentConfig, job: Job) -> Outcome {
        let cell = &self.cells[job.cell];
        let keep_roots = job.trial == self.first_trial(config, job.cell);
        let mut out = match config.name {
            ProtocolName::EtClustering | ProtocolName::DiscreteExample => {
                et::et_trial(config, cell, job.trial)
            }
            ProtocolName::InequalitySuite => et::suite_trial(config, cell, job.trial),
            ProtocolName::ToeplitzAnticoncentration => {
                toeplitz_ac::anti_trial(config, cell, job.trial)
            }
            ProtocolName::DetGrowth => toeplitz_ac::growth_trial(config, cell, job.trial),
            ProtocolName::ZeroRadius => radius::zero_trial(config, cell, job.trial),
            ProtocolName::PoleClustering => radius::pole_trial(config, cell, job.trial),
        };
        if !keep_roots {
            out.roots = None;
        }
        out
    }

    fn first_trial(&self, config: &ExperimentConfig, cell: usize) -> u64 {
        if config.name.shares_seeds_across_cells() {
            0
        } else {
            (cell * config.trials) as u64
        }
    }

    fn summarize(
        &self,
        config: &ExperimentConfig,
        records: &[TrialRecord],
    ) -> (Vec<CellSummary>, Vec<Verdict>, String) {
        let by_cell: Vec<Vec<&TrialRecord>> = self
            .cells
            .iter()
            .map(|c| records.iter().filter(|r| r.cell == c.label).collect())
            .collect();
        let (mut cells, mut verdicts, note) = match config.name {
            ProtocolName::EtClustering => et::summarize_et(config, &self.cells, &by_cell),
            ProtocolName::DiscreteExample => et::summarize_discrete(config, &self.cells, &by_cell),
            ProtocolName::InequalitySuite => et::summarize_suite(config, &self.cells, &by_cell),
            ProtocolName::ToeplitzAnticoncentration => {
                toeplitz_ac::summarize_anti(config, &self.cells, &by_cell)
            }
            ProtocolName::DetGrowth => toeplitz_ac::summarize_growth(config, &self.cells, &by_cell),
            ProtocolName::ZeroRadius => radius::summarize_zero(config, &self.cells, &by_cell),
            ProtocolName::PoleClustering => radius::summarize_pole(config, &self.cells, &by_cell),
        };
        for (summary, recs) in cells.iter_mut().zip(&by_cell) {
            summary.records = recs.len();
            summary.degenerate = recs.iter().filter(|r| r.degenerate).count();
            summary.excluded = recs.iter().filter(|r| r.status != Status::Ok).count();
        }
        if config.name.checks_inequalities() {
            let checked = records
                .iter()
                .filter(|r| r.inequalities_ok.is_some())
                .count();
            let bad = records
                .iter()
                .filter(|r| r.inequalities_ok == Some(false))
                .count();
            verdicts.insert(
                0,
                Verdict::new(
                    "deterministic_inequalities",
                    bad == 0,
                    format!("{bad} violations over {checked} checked trials"),
                ),
            );
        }
        (cells, verdicts, note)
    }
}

pub(crate) fn empty_cell(label: &str) -> CellSummary {
    CellSummary {
        cell: label.to_string(),
        records: 0,
        degenerate: 0,
        excluded: 0,
        metrics: BTreeMap::new(),
    }
}

/// Values of `f` over the usable records of a cell.
pub(crate) fn column(recs: &[&TrialRecord], f: impl Fn(&TrialRecord) -> Option<f64>) -> Vec<f64> {
    recs.iter()
        .filter(|r| r.status == Status::Ok)
        .filter_map(|r| f(r))
        .collect()
}

pub(crate) fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests;
