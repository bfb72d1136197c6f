//! Per-trial run reports and their JSON form.

use serde::{Deserialize, Serialize};

use crate::budgets::Budgets;
use crate::cycle::SearchMethod;
use crate::graph::Edge;
use crate::ham::FailureCause;
use crate::process::{SamplingMode, Selection};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Hamilton,
    Matching,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Hamilton => "hamilton",
            Variant::Matching => "matching",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hamilton" | "ham" => Ok(Variant::Hamilton),
            "matching" | "pm" => Ok(Variant::Matching),
            other => Err(format!(
                "unknown variant {other:?} (expected hamilton|matching)"
            )),
        }
    }
}

/// Everything that determines a trial's outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub multiplier: f64,
    pub seed_density: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_cap: Option<f64>,
    pub cycle_max_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: usize,
    pub rounds_used: u64,
    pub edges_selected: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure_cause: Option<FailureCause>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub rounds: u64,
    pub edges_selected: usize,
    /// Round of the last selection; the final graph exists from then on.
    pub last_selection_round: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub seed_edges: usize,
    pub black: usize,
    pub blue: usize,
    pub blue_fraction: f64,
    pub uncovered: usize,
    pub paths_after_phase2: Option<usize>,
    pub end_after_phase2: Option<usize>,
    pub end_after_phase3: Option<usize>,
    pub phase4_links: Option<usize>,
    pub rerouted: Option<usize>,
    pub assembled_paths: Option<usize>,
    pub cycle_vertices: Option<usize>,
    pub cycle_method: Option<SearchMethod>,
    pub cycle_steps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Success,
    PhaseFailure { phase: usize, cause: FailureCause },
    CycleNotFound { steps: u64 },
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Cycle {
        order: Vec<usize>,
    },
    Matching {
        pairs: Vec<Edge>,
        unmatched: Option<usize>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    /// Hamilton: at most `11n' + n` edges. Matching: at most `(0.5 + 11/ln ln n) n`.
    pub edges_within_bound: bool,
    pub rounds_within_t5: bool,
    pub t5_below_round_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLines {
    /// `(1 + ln n/2K) n`: rounds below which no strategy builds a Hamiltonian graph.
    pub lower_bound_rounds: f64,
    pub round_bound: f64,
    pub edge_bound: f64,
    pub selection_bound: usize,
    pub blue_fraction_reference: f64,
}

impl ReferenceLines {
    pub fn from_budgets(b: &Budgets) -> Self {
        ReferenceLines {
            lower_bound_rounds: (1.0 + (b.n as f64).ln() / (2.0 * b.k as f64)) * b.n as f64,
            round_bound: b.round_bound(),
            edge_bound: b.edge_bound(),
            selection_bound: b.selection_bound(),
            blue_fraction_reference: b.blue_fraction_reference(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub params: RunParams,
    pub budgets: Budgets,
    pub per_phase: Vec<PhaseReport>,
    pub totals: Totals,
    pub diagnostics: Diagnostics,
    pub outcome: Outcome,
    pub certificate: Option<Certificate>,
    pub budget_check: BudgetCheck,
    pub reference: ReferenceLines,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failure_label(&self) -> Option<&'static str> {
        match &self.outcome {
            Outcome::Success => None,
            Outcome::PhaseFailure { cause, .. } => Some(cause.label()),
            Outcome::CycleNotFound { .. } => Some("cycle_not_found"),
        }
    }
}

/// Splits the selection log into per-phase rounds and edge counts.
pub(crate) fn phase_reports(
    b: &Budgets,
    log: &[Selection],
    last_round: u64,
    failure: Option<&FailureCause>,
) -> Vec<PhaseReport> {
    let last_phase = b.phase_of_round(last_round.max(1)).unwrap_or(5);
    (1..=last_phase)
        .map(|phase| {
            let start = b.window_start(phase);
            let end = b.window_end(phase).min(last_round);
            PhaseReport {
                phase,
                rounds_used: end.saturating_sub(start),
                edges_selected: log
                    .iter()
                    .filter(|s| s.round > start && s.round <= end)
                    .count(),
                failure_cause: failure.filter(|c| c.phase() == phase).cloned(),
            }
        })
        .collect()
}
