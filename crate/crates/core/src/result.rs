//! What an ordering run returns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix_io::Permutation;
use crate::quotient::QuotientError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderingError {
    /// Parallel runs never compact the pool; rerun with more augmentation.
    #[error("connection pool exhausted at augmentation {augmentation}: requested {requested}, {available} available")]
    PoolExhausted {
        requested: usize,
        available: usize,
        augmentation: f64,
    },
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    /// Pivots selected in the step (supervariable representatives).
    pub pivots: usize,
    /// Original vertices eliminated in the step.
    pub eliminated: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub preprocess: f64,
    pub selection: f64,
    pub core: f64,
}

impl PhaseTimes {
    pub fn total(&self) -> f64 {
        self.preprocess + self.selection + self.core
    }
}

/// Per-pivot sizes summed over the run: `|L_p|`, `Σ_{v ∈ L_p} |E_v|` and
/// `|⋃_{v ∈ L_p} E_v|`, with the new element itself left out of the last two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntraCounts {
    pub pivots: usize,
    pub lp: usize,
    pub work: usize,
    pub unique: usize,
}

impl IntraCounts {
    pub fn add(&mut self, o: &IntraCounts) {
        self.pivots += o.pivots;
        self.lp += o.lp;
        self.work += o.work;
        self.unique += o.unique;
    }

    fn mean(&self, x: usize) -> f64 {
        if self.pivots == 0 {
            0.0
        } else {
            x as f64 / self.pivots as f64
        }
    }

    pub fn mean_lp(&self) -> f64 {
        self.mean(self.lp)
    }

    pub fn mean_work(&self) -> f64 {
        self.mean(self.work)
    }

    pub fn mean_unique(&self) -> f64 {
        self.mean(self.unique)
    }
}

#[derive(Debug, Clone)]
pub struct OrderingResult {
    pub permutation: Permutation,
    pub steps: Vec<StepStats>,
    pub phase_times: PhaseTimes,
    pub peak_pool_usage: usize,
    pub pool_capacity: usize,
    pub garbage_collections: usize,
    pub fill_edges: Option<u64>,
    pub intra: IntraCounts,
    /// Pivot set of every step, in the order the steps ran.
    pub trace: Vec<Vec<usize>>,
}

impl OrderingResult {
    pub fn n(&self) -> usize {
        self.permutation.len()
    }
}
