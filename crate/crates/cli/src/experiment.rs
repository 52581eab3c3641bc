//! Resumable batch runs: `run.json`, `outcomes.jsonl`, `summary.json` in one directory.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use magicast::optimize::{run_sample, BatchSummary, BroadcastOutcome, Objective, OptimizerConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{CliError, SCHEMA};

/// Samples run in parallel between two flushes of the outcomes file.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunHeader {
    schema: u32,
    objective: Objective,
    config: OptimizerConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct OutcomeLine {
    schema: u32,
    index: u64,
    outcome: BroadcastOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryFile {
    pub schema: u32,
    pub objective: Objective,
    pub n_samples: usize,
    pub n_converged: usize,
    pub convergence_rate: f64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub mean_overlap: f64,
    pub min_overlap: f64,
    pub mean_magic_power: f64,
    pub resumed_from: usize,
    pub config: OptimizerConfig,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failure(format!("{}: {e}", path.display()))
}

/// Runs samples `0..n` into `dir`, skipping those already on disk.
pub fn run(dir: &Path, objective: Objective, n: usize, cfg: &OptimizerConfig) -> Result<SummaryFile, CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if n == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    check_header(&dir.join("run.json"), RunHeader { schema: SCHEMA, objective, config: *cfg })?;

    let path = dir.join("outcomes.jsonl");
    let mut outcomes = load_prefix(&path)?;
    let resumed_from = outcomes.len();
    let file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| io_err(&path, e))?;
    let mut writer = BufWriter::new(file);

    let mut next = outcomes.len();
    while next < n {
        let end = (next + CHUNK).min(n);
        let batch = (next..end)
            .into_par_iter()
            .map(|i| run_sample(objective, cfg, i as u64))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Failure(e.to_string()))?;
        for (k, outcome) in batch.into_iter().enumerate() {
            let line = OutcomeLine { schema: SCHEMA, index: (next + k) as u64, outcome };
            serde_json::to_writer(&mut writer, &line).map_err(|e| io_err(&path, e))?;
            writer.write_all(b"\n").map_err(|e| io_err(&path, e))?;
            outcomes.push(line.outcome);
        }
        writer.flush().map_err(|e| io_err(&path, e))?;
        next = end;
    }
    outcomes.truncate(n);

    let s = BatchSummary::from_outcomes(objective, outcomes).map_err(|e| CliError::Failure(e.to_string()))?;
    let summary = SummaryFile {
        schema: SCHEMA,
        objective,
        n_samples: s.n_samples,
        n_converged: s.n_converged,
        convergence_rate: s.convergence_rate(),
        mean_fidelity: s.mean_fidelity,
        min_fidelity: s.min_fidelity,
        mean_overlap: s.mean_overlap,
        min_overlap: s.min_overlap,
        mean_magic_power: s.mean_magic_power,
        resumed_from,
        config: *cfg,
    };
    let summary_path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| io_err(&summary_path, e))?;
    fs::write(&summary_path, text + "\n").map_err(|e| io_err(&summary_path, e))?;
    Ok(summary)
}

/// Writes the header, or insists that an existing one matches.
fn check_header(path: &PathBuf, header: RunHeader) -> Result<(), CliError> {
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let old: RunHeader = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
        if old != header {
            return Err(CliError::Usage(format!(
                "{} was written with a different objective or config; use a fresh --out directory",
                path.display()
            )));
        }
        return Ok(());
    }
    let text = serde_json::to_string_pretty(&header).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Reads consecutive outcomes `0, 1, ...` and cuts the file after the last
/// good line, dropping anything torn by an interrupted run.
fn load_prefix(path: &Path) -> Result<Vec<BroadcastOutcome>, CliError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    let mut outcomes = Vec::new();
    let mut good_bytes = 0u64;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| io_err(path, e))?;
        if read == 0 || !line.ends_with('\n') {
            break;
        }
        match serde_json::from_str::<OutcomeLine>(&line) {
            Ok(l) if l.index == outcomes.len() as u64 => outcomes.push(l.outcome),
            _ => break,
        }
        good_bytes += read as u64;
    }
    let file = OpenOptions::new().write(true).open(path).map_err(|e| io_err(path, e))?;
    file.set_len(good_bytes).map_err(|e| io_err(path, e))?;
    Ok(outcomes)
}
