//! Replay files: everything needed to re-check a trial offline or rerun it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycle::{verify_hamilton, CycleCertificate};
use crate::graph::{Graph, GraphError};
use crate::ham::{build_hamiltonian, BuildError, BuildParams};
use crate::harness::{TrialRecord, TrialSet};
use crate::matching::{build_matching, verify_matching};
use crate::process::Selection;
use crate::report::{Certificate, RunReport, Variant};

pub const REPLAY_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayFile {
    pub version: u32,
    pub variant: Variant,
    pub params: BuildParams,
    pub report: RunReport,
    pub selected_log: Vec<Selection>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported replay version {0}")]
    Version(u32),
    #[error("selection log: {0}")]
    Log(String),
    #[error("selection log does not form a simple graph: {0}")]
    Graph(#[from] GraphError),
    #[error("certificate does not verify against the logged graph")]
    Certificate,
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// What an offline check established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verified {
    /// A success whose certificate holds in the logged graph.
    Certificate,
    /// A failed trial; only the log was checked.
    LogOnly,
}

impl ReplayFile {
    pub fn from_record(variant: Variant, params: BuildParams, rec: &TrialRecord) -> Self {
        ReplayFile {
            version: REPLAY_VERSION,
            variant,
            params,
            report: rec.report.clone(),
            selected_log: rec.selected_log.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("replay serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), ReplayError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ReplayError> {
        let r: ReplayFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        if r.version != REPLAY_VERSION {
            return Err(ReplayError::Version(r.version));
        }
        Ok(r)
    }

    /// Rebuilds the builder graph from the log. Rounds must strictly increase,
    /// stay within the last round of the run, and the count must match the report.
    pub fn rebuild_graph(&self) -> Result<Graph, ReplayError> {
        let mut last = 0;
        for s in &self.selected_log {
            if s.round <= last {
                return Err(ReplayError::Log(format!(
                    "round {} after round {last}",
                    s.round
                )));
            }
            last = s.round;
        }
        if last > self.report.totals.rounds {
            return Err(ReplayError::Log(format!(
                "selection in round {last} beyond the {} rounds run",
                self.report.totals.rounds
            )));
        }
        if self.selected_log.len() != self.report.totals.edges_selected {
            return Err(ReplayError::Log(format!(
                "{} logged selections, report says {}",
                self.selected_log.len(),
                self.report.totals.edges_selected
            )));
        }
        Ok(Graph::from_edges(
            self.params.n,
            self.selected_log.iter().map(|s| s.edge),
        )?)
    }

    /// Re-checks the certificate against the graph rebuilt from the log.
    pub fn verify(&self) -> Result<Verified, ReplayError> {
        let g = self.rebuild_graph()?;
        let ok = match &self.report.certificate {
            None => return Ok(Verified::LogOnly),
            Some(Certificate::Cycle { order }) => {
                verify_hamilton(&g, &CycleCertificate::new(order.clone()))
            }
            Some(Certificate::Matching { pairs, unmatched }) => {
                verify_matching(&g, pairs, *unmatched)
            }
        };
        if ok {
            Ok(Verified::Certificate)
        } else {
            Err(ReplayError::Certificate)
        }
    }

    /// Runs the trial again and reports whether it reproduces exactly.
    pub fn rerun_matches(&self) -> Result<bool, ReplayError> {
        let (report, log) = match self.variant {
            Variant::Hamilton => {
                let r = build_hamiltonian(&self.params)?;
                (r.report, r.selected_log)
            }
            Variant::Matching => {
                let r = build_matching(&self.params)?;
                (r.report, r.selected_log)
            }
        };
        Ok(report == self.report && log == self.selected_log)
    }
}

/// Writes `trial_<index>.json` for every trial into `dir`.
pub fn write_replays(set: &TrialSet, dir: &Path) -> Result<Vec<PathBuf>, ReplayError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(set.records.len());
    for rec in &set.records {
        let file =
            ReplayFile::from_record(set.config.variant, set.config.build_params(rec.index), rec);
        let path = dir.join(format!("trial_{:04}.json", rec.index));
        file.save(&path)?;
        paths.push(path);
    }
    Ok(paths)
}
