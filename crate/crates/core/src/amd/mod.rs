//! Approximate degrees and the sequential AMD driver.

mod degree;
mod lists;
mod sequential;
mod workspace;

pub use degree::{
    compute_set_difference_sizes, effective_degree, finish_pivot, scan_pivot, update_approximate_degrees, DegreeUpdate,
    FinishedPivot, PendingPivot,
};
pub use lists::SequentialDegreeLists;
pub use sequential::{sequential_amd, sequential_amd_observed};
pub use workspace::DegreeWorkspace;

use crate::quotient::QuotientGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmdOptions {
    /// Absorb any element whose clique is covered by the new one, not only
    /// those adjacent to the pivot.
    pub aggressive_absorption: bool,
    /// Spare pool space as a multiple of the initial pattern size.
    pub augmentation: f64,
}

impl Default for AmdOptions {
    fn default() -> Self {
        AmdOptions {
            aggressive_absorption: true,
            augmentation: 1.5,
        }
    }
}

/// State after one step of an ordering run.
pub struct StepView<'a> {
    pub graph: &'a QuotientGraph,
    /// Pivots of the step, ascending.
    pub pivots: &'a [usize],
    /// Original vertices eliminated by the step, in output order.
    pub eliminated: &'a [usize],
    /// Vertices eliminated so far, this step included.
    pub k: usize,
}

/// Hook called after every elimination step. Used by instrumented runs.
pub trait StepObserver {
    fn on_step(&mut self, view: &StepView<'_>);
}

impl StepObserver for () {
    fn on_step(&mut self, _: &StepView<'_>) {}
}

#[cfg(test)]
mod tests;
