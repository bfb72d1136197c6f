//! The K-choice controlled random graph process.
//!
//! Each round presents `K` distinct vertex pairs, uniform over `K`-subsets of
//! the eligible pairs; the strategy may add at most one of them to the
//! builder graph. Two eligibility rules are supported: pairs missing from the
//! builder, or pairs never presented before.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph};
use crate::rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Pairs are drawn from those not yet in the builder graph.
    #[default]
    Missing,
    /// Pairs are drawn from those never presented in any earlier round.
    Unpresented,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Missing => f.write_str("missing"),
            SamplingMode::Unpresented => f.write_str("unpresented"),
        }
    }
}

impl FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "missing" => Ok(SamplingMode::Missing),
            "unpresented" => Ok(SamplingMode::Unpresented),
            other => Err(format!(
                "unknown sampling mode {other:?} (expected missing|unpresented)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcessError {
    #[error("need n >= 2 and K >= 1 (got n = {n}, K = {k})")]
    InvalidParams { n: usize, k: usize },
    #[error("only {eligible} eligible pairs remain, cannot present {k}")]
    Exhausted { eligible: u64, k: usize },
    #[error("round {round}: pair {edge:?} was not presented")]
    NotPresented { round: u64, edge: Edge },
    #[error("pair {0:?} is already in the builder graph")]
    AlreadySelected(Edge),
    #[error("selection for round {got} but the clock is at {current}")]
    StaleRound { got: u64, current: u64 },
    #[error("a pair was already selected in round {0}")]
    SecondChoice(u64),
    #[error("scripted presentation ran out at round {0}")]
    ScriptExhausted(u64),
    #[error("scripted round {round} is invalid: {reason}")]
    InvalidScriptRound { round: u64, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedRound {
    pub round: u64,
    pub pairs: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub round: u64,
    pub edge: Edge,
}

/// Pairs presented so far. A dense triangular bitmap when it fits, else a hash set.
#[derive(Clone, Debug)]
enum PresentedSet {
    Bits { words: Vec<u64>, count: u64 },
    Hashed(HashSet<Edge>),
}

const BITMAP_MAX_PAIRS: u64 = 1 << 31;

#[inline]
fn pair_index((u, v): Edge) -> u64 {
    let (u, v) = (u as u64, v as u64);
    v * (v - 1) / 2 + u
}

impl PresentedSet {
    fn new(total_pairs: u64) -> Self {
        if total_pairs <= BITMAP_MAX_PAIRS {
            PresentedSet::Bits {
                words: vec![0; total_pairs.div_ceil(64) as usize],
                count: 0,
            }
        } else {
            PresentedSet::Hashed(HashSet::new())
        }
    }

    fn contains(&self, e: Edge) -> bool {
        match self {
            PresentedSet::Bits { words, .. } => {
                let i = pair_index(e);
                words[(i / 64) as usize] & (1 << (i % 64)) != 0
            }
            PresentedSet::Hashed(set) => set.contains(&e),
        }
    }

    fn insert(&mut self, e: Edge) {
        match self {
            PresentedSet::Bits { words, count } => {
                let i = pair_index(e);
                let w = &mut words[(i / 64) as usize];
                if *w & (1 << (i % 64)) == 0 {
                    *w |= 1 << (i % 64);
                    *count += 1;
                }
            }
            PresentedSet::Hashed(set) => {
                set.insert(e);
            }
        }
    }

    fn len(&self) -> u64 {
        match self {
            PresentedSet::Bits { count, .. } => *count,
            PresentedSet::Hashed(set) => set.len() as u64,
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Random(Box<ChaCha8Rng>),
    Scripted(VecDeque<Vec<Edge>>),
}

#[derive(Clone, Debug)]
pub struct ProcessState {
    n: usize,
    choices: usize,
    mode: SamplingMode,
    round: u64,
    builder: Graph,
    presented: Option<PresentedSet>,
    source: Source,
    selected_log: Vec<Selection>,
    current: Vec<Edge>,
    chose_this_round: bool,
}

impl ProcessState {
    /// A randomly driven process; `seed` selects the process stream of [`rng`].
    pub fn new(
        n: usize,
        choices: usize,
        mode: SamplingMode,
        seed: u64,
    ) -> Result<Self, ProcessError> {
        Self::with_source(
            n,
            choices,
            mode,
            Source::Random(Box::new(rng::process_stream(seed))),
        )
    }

    /// A process whose rounds are read from `rounds` in order. Each scripted
    /// round must list exactly `choices` distinct eligible pairs.
    pub fn scripted<I>(
        n: usize,
        choices: usize,
        mode: SamplingMode,
        rounds: I,
    ) -> Result<Self, ProcessError>
    where
        I: IntoIterator<Item = Vec<Edge>>,
    {
        let script = rounds.into_iter().collect();
        Self::with_source(n, choices, mode, Source::Scripted(script))
    }

    fn with_source(
        n: usize,
        choices: usize,
        mode: SamplingMode,
        source: Source,
    ) -> Result<Self, ProcessError> {
        if n < 2 || choices == 0 {
            return Err(ProcessError::InvalidParams { n, k: choices });
        }
        let presented = match mode {
            SamplingMode::Missing => None,
            SamplingMode::Unpresented => Some(PresentedSet::new(total_pairs(n))),
        };
        Ok(ProcessState {
            n,
            choices,
            mode,
            round: 0,
            builder: Graph::new(n),
            presented,
            source,
            selected_log: Vec::new(),
            current: Vec::new(),
            chose_this_round: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn choices(&self) -> usize {
        self.choices
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    /// Index of the most recently presented round (0 before the first one).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn builder(&self) -> &Graph {
        &self.builder
    }

    pub fn selected_log(&self) -> &[Selection] {
        &self.selected_log
    }

    pub fn into_parts(self) -> (Graph, Vec<Selection>) {
        (self.builder, self.selected_log)
    }

    /// Number of pairs that may be presented in the next round.
    pub fn eligible_count(&self) -> u64 {
        let total = total_pairs(self.n);
        match &self.presented {
            None => total - self.builder.edge_count() as u64,
            Some(p) => total - p.len(),
        }
    }

    fn is_eligible(&self, e: Edge) -> bool {
        match &self.presented {
            None => !self.builder.has_edge(e.0, e.1),
            Some(p) => !p.contains(e),
        }
    }

    /// Presents the next round and advances the clock.
    pub fn present_round(&mut self) -> Result<PresentedRound, ProcessError> {
        let eligible = self.eligible_count();
        if eligible < self.choices as u64 {
            return Err(ProcessError::Exhausted {
                eligible,
                k: self.choices,
            });
        }
        let next_round = self.round + 1;
        let pairs = match &mut self.source {
            Source::Random(_) => self.sample_pairs(),
            Source::Scripted(script) => {
                let pairs = script
                    .pop_front()
                    .ok_or(ProcessError::ScriptExhausted(next_round))?;
                let pairs: Vec<Edge> = pairs.into_iter().map(|(u, v)| edge(u, v)).collect();
                self.validate_scripted(next_round, &pairs)?;
                pairs
            }
        };
        if let Some(p) = &mut self.presented {
            for &e in &pairs {
                p.insert(e);
            }
        }
        self.round = next_round;
        self.current.clone_from(&pairs);
        self.chose_this_round = false;
        Ok(PresentedRound {
            round: next_round,
            pairs,
        })
    }

    // Rejection sampling: uniform pairs, redrawn when ineligible or already
    // drawn this round. Conditioning on distinctness keeps the round uniform
    // over K-subsets of the eligible set.
    fn sample_pairs(&mut self) -> Vec<Edge> {
        let n = self.n;
        let mut out: Vec<Edge> = Vec::with_capacity(self.choices);
        while out.len() < self.choices {
            let e = {
                let Source::Random(rng) = &mut self.source else {
                    unreachable!("sample_pairs on a scripted source")
                };
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                edge(u, v)
            };
            if self.is_eligible(e) && !out.contains(&e) {
                out.push(e);
            }
        }
        out
    }

    fn validate_scripted(&self, round: u64, pairs: &[Edge]) -> Result<(), ProcessError> {
        let bad = |reason: String| Err(ProcessError::InvalidScriptRound { round, reason });
        if pairs.len() != self.choices {
            return bad(format!("{} pairs, expected {}", pairs.len(), self.choices));
        }
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u == v || v >= self.n {
                return bad(format!(
                    "pair ({u}, {v}) is not a pair of distinct vertices below {}",
                    self.n
                ));
            }
            if pairs[..i].contains(&(u, v)) {
                return bad(format!("pair ({u}, {v}) repeated"));
            }
            if !self.is_eligible((u, v)) {
                return bad(format!(
                    "pair ({u}, {v}) is not eligible in {} mode",
                    self.mode
                ));
            }
        }
        Ok(())
    }

    /// Applies the strategy's decision for `round`.
    pub fn select(
        &mut self,
        round: &PresentedRound,
        choice: Option<Edge>,
    ) -> Result<(), ProcessError> {
        if round.round != self.round {
            return Err(ProcessError::StaleRound {
                got: round.round,
                current: self.round,
            });
        }
        let Some((u, v)) = choice else {
            return Ok(());
        };
        let e = edge(u, v);
        if self.chose_this_round {
            return Err(ProcessError::SecondChoice(self.round));
        }
        if !self.current.contains(&e) {
            return Err(ProcessError::NotPresented {
                round: self.round,
                edge: e,
            });
        }
        if self.builder.has_edge(e.0, e.1) {
            return Err(ProcessError::AlreadySelected(e));
        }
        self.builder
            .add_edge(e.0, e.1)
            .expect("presented pairs are valid vertex pairs");
        self.selected_log.push(Selection {
            round: self.round,
            edge: e,
        });
        self.chose_this_round = true;
        Ok(())
    }

    /// Presents one round and lets `strategy` pick at most one pair.
    pub fn step<F>(&mut self, strategy: F) -> Result<Option<Edge>, ProcessError>
    where
        F: FnOnce(&ProcessState, &PresentedRound) -> Option<Edge>,
    {
        let round = self.present_round()?;
        let choice = strategy(self, &round);
        self.select(&round, choice)?;
        Ok(choice.map(|(u, v)| edge(u, v)))
    }

    /// Runs rounds until the clock reaches `last_round` (inclusive).
    pub fn run_until<F>(&mut self, last_round: u64, mut strategy: F) -> Result<(), ProcessError>
    where
        F: FnMut(&ProcessState, &PresentedRound) -> Option<Edge>,
    {
        while self.round < last_round {
            self.step(&mut strategy)?;
        }
        Ok(())
    }
}

pub fn total_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}
