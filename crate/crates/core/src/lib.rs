//! Online builders for sparse Hamiltonian graphs and perfect matchings in the
//! K-choice controlled random graph process.
//!
//! Each round the process presents `K` random pairs and the builder keeps at
//! most one. [`ham::build_hamiltonian`] runs a five-phase strategy that grows
//! a seed graph with a strong 4-core, covers the rest with paths ending next to
//! the core, reroutes stranded path ends, and closes everything into one
//! Hamilton cycle. [`matching::build_matching`] does the same for a matching of
//! size `⌊n/2⌋`. [`harness`] runs many seeded trials, in parallel when the
//! `parallel` feature is on.

pub mod budgets;
pub mod cycle;
pub mod graph;
pub mod ham;
pub mod harness;
pub mod matching;
pub mod process;
pub mod replay;
pub mod report;
pub mod rng;
pub mod strong_core;

pub use budgets::{compute_budgets, Budgets, Schedule};
pub use cycle::{
    complete_cycle, exact_hamilton, verify_hamilton, CycleBudget, CycleCertificate, ForcedMatching,
};
pub use graph::{edge, Edge, Graph};
pub use ham::{build_hamiltonian, run_hamiltonian, BuildError, BuildParams, FailureCause};
pub use harness::{run_trials, run_trials_with, Executor, TrialConfig};
pub use matching::{build_matching, run_matching};
pub use process::{ProcessState, SamplingMode};
pub use report::{Outcome, RunReport, Variant};
pub use strong_core::{strong_core, strong_core_bruteforce, CorePartition};
