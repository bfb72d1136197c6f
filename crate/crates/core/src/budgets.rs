//! Round windows and thresholds for the five-phase builders.
//!
//! With `L = ln n / 2K`, `ll = ln ln n` and multiplier `m`:
//!
//! ```text
//! t_eps = m * 50 * (b + L) * n / ll        b = 1 (Hamilton), 1/2 (matching)
//! t1 = t_eps
//! t2 = t1 + t_eps + b * n
//! t3 = t2 + t_eps
//! t4 = t3 + t_eps + n * L
//! t5 = t4 + t_eps
//! ```
//!
//! The sum telescopes to exactly `(1 + 250m/ll)(b + L) n`, so the window ends
//! are the real values rounded down; that keeps `t5` strictly below the
//! round bound. All logarithms are natural.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Phase-1 seed graph density: the seed graph gets `density * n'` edges.
pub const DEFAULT_SEED_DENSITY: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BudgetError {
    #[error("n = {0} is too small: need ln ln n > 1 (n >= 16)")]
    TooSmall(usize),
    #[error("K must be at least 1")]
    NoChoices,
    #[error("multiplier must be positive and finite, got {0}")]
    BadMultiplier(f64),
    #[error("seed density must be at least 1")]
    BadDensity,
    #[error("seed fraction must lie in (0, 1], got {0}")]
    BadSeedFraction(f64),
    #[error("End cap must be non-negative and finite, got {0}")]
    BadEndCap(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Hamilton,
    Matching,
}

impl Schedule {
    /// The constant term `b` of the `(b + ln n / 2K)` factor.
    pub fn base(self) -> f64 {
        match self {
            Schedule::Hamilton => 1.0,
            Schedule::Matching => 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub n: usize,
    pub k: usize,
    pub multiplier: f64,
    pub schedule: Schedule,
    /// `ceil(n / ln ln n)`: the seed graph lives on vertices `0..n_prime`.
    pub n_prime: usize,
    pub t_eps: f64,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    pub t4: u64,
    pub t5: u64,
    pub seed_density: usize,
    pub target_phase1_edges: usize,
    /// Phase 1 fails if the seed graph has at most this many blue vertices.
    pub blue_threshold: f64,
    /// Phase 2 fails if it leaves more paths than this.
    pub path_cap: f64,
    /// Phase 3 fails if more endpoint copies than this remain unmatched.
    pub end_cap: f64,
    pub fanout_cap: f64,
    /// `ceil(fanout_cap)`: claims each endpoint copy collects and needs in Phase 4.
    pub fanout_required: usize,
    /// Phase-2 paths at least this long stop growing.
    pub long_path_threshold: f64,
}

impl Budgets {
    pub fn hamilton(n: usize, k: usize, multiplier: f64) -> Result<Self, BudgetError> {
        Self::build(n, k, multiplier, Schedule::Hamilton)
    }

    pub fn matching(n: usize, k: usize, multiplier: f64) -> Result<Self, BudgetError> {
        Self::build(n, k, multiplier, Schedule::Matching)
    }

    pub fn for_schedule(
        schedule: Schedule,
        n: usize,
        k: usize,
        multiplier: f64,
    ) -> Result<Self, BudgetError> {
        Self::build(n, k, multiplier, schedule)
    }

    fn build(n: usize, k: usize, multiplier: f64, schedule: Schedule) -> Result<Self, BudgetError> {
        if k == 0 {
            return Err(BudgetError::NoChoices);
        }
        if !(multiplier.is_finite() && multiplier > 0.0) {
            return Err(BudgetError::BadMultiplier(multiplier));
        }
        let nf = n as f64;
        let ln_n = nf.ln();
        let ll = ln_n.ln();
        if n < 3 || ll.is_nan() || ll <= 1.0 {
            return Err(BudgetError::TooSmall(n));
        }
        let l = ln_n / (2.0 * k as f64);
        let b = schedule.base();
        let t_eps = multiplier * 50.0 * (b + l) * nf / ll;
        let r1 = t_eps;
        let r2 = r1 + t_eps + b * nf;
        let r3 = r2 + t_eps;
        let r4 = r3 + t_eps + nf * l;
        let r5 = r4 + t_eps;
        let n_prime = (nf / ll).ceil() as usize;
        let fanout_cap = ln_n.powf(0.8);
        Ok(Budgets {
            n,
            k,
            multiplier,
            schedule,
            n_prime,
            t_eps,
            t1: r1.floor() as u64,
            t2: r2.floor() as u64,
            t3: r3.floor() as u64,
            t4: r4.floor() as u64,
            t5: r5.floor() as u64,
            seed_density: DEFAULT_SEED_DENSITY,
            target_phase1_edges: DEFAULT_SEED_DENSITY * n_prime,
            blue_threshold: 1e-6 * n_prime as f64,
            path_cap: nf / (ll * ll),
            end_cap: nf / ln_n.powi(5),
            fanout_cap,
            fanout_required: fanout_cap.ceil() as usize,
            long_path_threshold: 0.5 * ln_n,
        })
    }

    /// Overrides the seed-graph density (edges per seed vertex).
    pub fn with_seed_density(mut self, density: usize) -> Result<Self, BudgetError> {
        if density == 0 {
            return Err(BudgetError::BadDensity);
        }
        self.seed_density = density;
        self.target_phase1_edges = density * self.n_prime;
        Ok(self)
    }

    /// Overrides the seed-graph size with `n' = ceil(fraction * n)`.
    pub fn with_seed_fraction(mut self, fraction: f64) -> Result<Self, BudgetError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(BudgetError::BadSeedFraction(fraction));
        }
        self.n_prime = ((fraction * self.n as f64).ceil() as usize).clamp(1, self.n);
        self.target_phase1_edges = self.seed_density * self.n_prime;
        self.blue_threshold = 1e-6 * self.n_prime as f64;
        Ok(self)
    }

    /// Overrides the Phase-3 failure threshold.
    pub fn with_end_cap(mut self, cap: f64) -> Result<Self, BudgetError> {
        if !(cap.is_finite() && cap >= 0.0) {
            return Err(BudgetError::BadEndCap(cap));
        }
        self.end_cap = cap;
        Ok(self)
    }

    pub fn lnln_n(&self) -> f64 {
        (self.n as f64).ln().ln()
    }

    fn half_log_ratio(&self) -> f64 {
        (self.n as f64).ln() / (2.0 * self.k as f64)
    }

    /// `(1 + 250m/ln ln n)(b + ln n/2K) n`.
    pub fn round_bound(&self) -> f64 {
        (1.0 + 250.0 * self.multiplier / self.lnln_n())
            * (self.schedule.base() + self.half_log_ratio())
            * self.n as f64
    }

    /// `(b + 11/ln ln n) n`.
    pub fn edge_bound(&self) -> f64 {
        (self.schedule.base() + 11.0 / self.lnln_n()) * self.n as f64
    }

    /// `11 n' + n`, the integral edge count the Hamilton builder never exceeds.
    pub fn selection_bound(&self) -> usize {
        11 * self.n_prime + self.n
    }

    /// `(b + ln n/2K) n`: for `b = 1` the known lower bound on the number of
    /// rounds any strategy needs for a Hamiltonian graph.
    pub fn lower_bound_reference(&self) -> f64 {
        (self.schedule.base() + self.half_log_ratio()) * self.n as f64
    }

    /// `0.1 (2d)^3 e^{-2d}` with `d` the seed density: the asymptotic blue
    /// fraction of a random seed graph, reported for comparison only.
    pub fn blue_fraction_reference(&self) -> f64 {
        let two_d = 2.0 * self.seed_density as f64;
        0.1 * two_d.powi(3) * (-two_d).exp()
    }

    /// Phase index (1..=5) owning round `t`, or `None` past `t5`.
    pub fn phase_of_round(&self, t: u64) -> Option<usize> {
        [self.t1, self.t2, self.t3, self.t4, self.t5]
            .iter()
            .position(|&end| t <= end)
            .map(|i| i + 1)
    }

    pub fn window_end(&self, phase: usize) -> u64 {
        match phase {
            1 => self.t1,
            2 => self.t2,
            3 => self.t3,
            4 => self.t4,
            5 => self.t5,
            _ => panic!("no phase {phase}"),
        }
    }

    pub fn window_start(&self, phase: usize) -> u64 {
        if phase == 1 {
            0
        } else {
            self.window_end(phase - 1)
        }
    }
}

/// Hamilton-schedule budgets for `n` vertices, `k` choices and multiplier `m`.
pub fn compute_budgets(n: usize, k: usize, m: f64) -> Result<Budgets, BudgetError> {
    Budgets::hamilton(n, k, m)
}
