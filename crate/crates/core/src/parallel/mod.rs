//! Multiple elimination with distance-2 independent pivot sets.
//!
//! Every step picks a set of pivots no two of which are adjacent or share a
//! neighbor, so their cliques, connection updates and degree updates touch
//! disjoint variables and can run on separate workers without locks.

mod driver;
mod lists;
mod select;

pub use driver::{parallel_amd, parallel_amd_observed};
pub use lists::{AffinityMap, ConcurrentDegreeLists, WorkerLists};
pub use select::{candidate_label, luby_round, pack_label, LabelBoard, NO_LABEL};

use crate::quotient::QuotientGraph;
use crate::result::OrderingError;

pub const DEFAULT_MULT: f64 = 1.1;
pub const DEFAULT_LIM_TOTAL: usize = 8192;
pub const DEFAULT_AUGMENTATION: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelConfig {
    pub workers: usize,
    /// Candidates may have degree up to `⌊mult · amd⌋`.
    pub mult: f64,
    /// Candidate budget shared by all workers.
    pub lim_total: usize,
    pub augmentation: f64,
    pub seed: u64,
    pub aggressive_absorption: bool,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        ParallelConfig {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            mult: DEFAULT_MULT,
            lim_total: DEFAULT_LIM_TOTAL,
            augmentation: DEFAULT_AUGMENTATION,
            seed: 0,
            aggressive_absorption: true,
        }
    }
}

impl ParallelConfig {
    pub fn with_workers(workers: usize) -> Self {
        ParallelConfig {
            workers,
            ..ParallelConfig::default()
        }
    }

    /// Per-worker candidate cap.
    pub fn lim(&self) -> usize {
        (self.lim_total / self.workers.max(1)).max(1)
    }

    pub fn validate(&self, n: usize) -> Result<(), OrderingError> {
        let bad = |m: &str| Err(OrderingError::InvalidConfig(m.to_string()));
        if self.workers == 0 || self.workers > 1 << 16 {
            return bad("workers must be between 1 and 65536");
        }
        if !(self.mult.is_finite() && self.mult >= 1.0) {
            return bad("mult must be a finite value of at least 1");
        }
        if self.lim_total == 0 {
            return bad("lim_total must be at least 1");
        }
        if !(self.augmentation.is_finite() && self.augmentation >= 0.0) {
            return bad("augmentation must be finite and nonnegative");
        }
        if n as u64 >= 1 << 32 {
            return bad("labels pack vertex indices into 32 bits");
        }
        Ok(())
    }
}

/// One selection round, the workers run one after another. `lists` must
/// hold every live variable.
pub fn dist2_independent_set(
    g: &QuotientGraph,
    lists: &mut ConcurrentDegreeLists,
    cfg: &ParallelConfig,
    step: u64,
) -> Vec<usize> {
    let workers = lists.workers();
    let lim = cfg.lim();
    let amd = (0..workers).map(|t| lists.lamd(t)).min().unwrap_or(g.n());
    let top = ((cfg.mult * amd as f64).floor() as usize).max(amd);
    let (aff, wls) = lists.split_mut();
    let mut cands = Vec::new();
    for wl in wls.iter_mut() {
        let mut mine = Vec::new();
        wl.gather(aff, amd, top, lim, &mut mine);
        cands.extend(mine);
    }
    let mut d = luby_round(g, &cands, |v| candidate_label(cfg.seed, step, v));
    d.sort_unstable();
    d
}
