//! Replays a captured run on the explicit elimination graph.

use thiserror::Error;

use crate::fill::symbolic_fill;
use crate::matrix_io::{Permutation, SparsePattern};
use crate::oracle::EliminationGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceVerdict {
    pub steps: usize,
    pub fill: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceFailure {
    #[error("permutation has {got} entries, pattern has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error("{steps} pivot sets but {counts} elimination counts")]
    StepCountMismatch { steps: usize, counts: usize },
    #[error("steps eliminate {covered} vertices, pattern has {n}")]
    Coverage { covered: usize, n: usize },
    #[error("step {step}: pivot {vertex} is not eliminated in this step")]
    PivotOutsideStep { step: usize, vertex: usize },
    #[error("step {step}: pivots {first} and {second} are adjacent")]
    Adjacent { step: usize, first: usize, second: usize },
    #[error("step {step}: pivots {first} and {second} share neighbor {via}")]
    SharedNeighbor {
        step: usize,
        first: usize,
        second: usize,
        via: usize,
    },
    #[error("replayed fill {replayed} disagrees with the symbolic count {symbolic}")]
    FillMismatch { replayed: u64, symbolic: u64 },
    #[error("run reported fill {reported}, replay gives {replayed}")]
    ReportedFill { reported: u64, replayed: u64 },
}

/// Checks that every step's pivots are distance-2 independent at the time
/// the step starts, that each pivot is eliminated in its own step, and that
/// fill counts agree.
///
/// `trace[s]` holds the pivots of step `s` and `eliminated[s]` how many
/// vertices of `perm` that step emitted, in order.
pub fn verify_trace(
    p: &SparsePattern,
    trace: &[Vec<usize>],
    eliminated: &[usize],
    perm: &Permutation,
    reported_fill: Option<u64>,
) -> Result<TraceVerdict, TraceFailure> {
    let n = p.n();
    if perm.len() != n {
        return Err(TraceFailure::SizeMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    if trace.len() != eliminated.len() {
        return Err(TraceFailure::StepCountMismatch {
            steps: trace.len(),
            counts: eliminated.len(),
        });
    }
    let covered: usize = eliminated.iter().sum();
    if covered != n {
        return Err(TraceFailure::Coverage { covered, n });
    }

    let mut g = EliminationGraph::new(p);
    let mut step_of = vec![usize::MAX; n];
    let mut pos = 0;
    let mut fill = 0u64;
    for (step, (pivots, &count)) in trace.iter().zip(eliminated).enumerate() {
        let chunk = &perm.order()[pos..pos + count];
        for &v in chunk {
            step_of[v] = step;
        }
        if let Some(&vertex) = pivots.iter().find(|&&v| v >= n || step_of[v] != step) {
            return Err(TraceFailure::PivotOutsideStep { step, vertex });
        }
        let conflict = g
            .distance2_conflict(pivots)
            .expect("pivots of the current step are live");
        if let Some(c) = conflict {
            return Err(match c.via {
                Some(via) => TraceFailure::SharedNeighbor {
                    step,
                    first: c.first,
                    second: c.second,
                    via,
                },
                None => TraceFailure::Adjacent {
                    step,
                    first: c.first,
                    second: c.second,
                },
            });
        }
        for &v in chunk {
            fill += g.eliminate_vertex(v).expect("each vertex eliminated once") as u64;
        }
        pos += count;
    }

    let symbolic = symbolic_fill(p, perm);
    if symbolic != fill {
        return Err(TraceFailure::FillMismatch {
            replayed: fill,
            symbolic,
        });
    }
    if let Some(reported) = reported_fill {
        if reported != fill {
            return Err(TraceFailure::ReportedFill {
                reported,
                replayed: fill,
            });
        }
    }
    Ok(TraceVerdict {
        steps: trace.len(),
        fill,
    })
}
