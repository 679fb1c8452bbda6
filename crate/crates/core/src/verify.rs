//! Instrumented runs: replay every step on an explicit elimination graph and
//! compare.

use crate::amd::{effective_degree, StepObserver, StepView};
use crate::matrix_io::SparsePattern;
use crate::oracle::EliminationGraph;
use crate::quotient::QuotientGraph;

/// Which properties [`OracleMirror`] checks after each step.
#[derive(Debug, Clone, Copy)]
pub struct MirrorChecks {
    /// Pivot sets are distance-2 independent.
    pub distance2: bool,
    /// `exact ≤ d_v ≤ n − k − 1` for every live vertex.
    pub degree_bounds: bool,
    /// Reconstructed neighborhoods equal the explicit ones.
    pub neighborhoods: bool,
}

impl Default for MirrorChecks {
    fn default() -> Self {
        MirrorChecks {
            distance2: true,
            degree_bounds: true,
            neighborhoods: true,
        }
    }
}

/// Step observer that mirrors the run on an [`EliminationGraph`] and records
/// every disagreement.
pub struct OracleMirror {
    graph: EliminationGraph,
    checks: MirrorChecks,
    steps: usize,
    violations: Vec<String>,
}

impl OracleMirror {
    pub fn new(p: &SparsePattern, checks: MirrorChecks) -> Self {
        OracleMirror {
            graph: EliminationGraph::new(p),
            checks,
            steps: 0,
            violations: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn check_live_vertices(&mut self, g: &QuotientGraph, k: usize) {
        let n = g.n();
        let step = self.steps;
        for v in g.live_variables() {
            let members = g.members(v);
            if self.checks.degree_bounds {
                let exact = self.graph.degree(v);
                let d = effective_degree(g, v, k) + members.len() - 1;
                let cap = n - k - 1;
                if exact > d || d > cap {
                    self.violations.push(format!(
                        "step {step}: vertex {v} has exact degree {exact}, bound {d}, cap {cap}"
                    ));
                }
            }
            if self.checks.neighborhoods {
                let mut expanded: Vec<usize> = members[1..].to_vec();
                match g.reconstruct_neighborhood(v) {
                    Ok(nb) => {
                        for r in nb {
                            expanded.extend(g.members(r));
                        }
                    }
                    Err(e) => self.violations.push(format!("step {step}: {e}")),
                }
                expanded.sort_unstable();
                if expanded != self.graph.neighbors(v) {
                    self.violations.push(format!(
                        "step {step}: vertex {v} reconstructs {expanded:?}, expected {:?}",
                        self.graph.neighbors(v)
                    ));
                }
            }
        }
    }
}

impl StepObserver for OracleMirror {
    fn on_step(&mut self, view: &StepView<'_>) {
        if self.checks.distance2 {
            match self.graph.distance2_conflict(view.pivots) {
                Ok(None) => {}
                Ok(Some(c)) => self.violations.push(format!(
                    "step {}: pivots {} and {} conflict via {:?}",
                    self.steps, c.first, c.second, c.via
                )),
                Err(e) => self.violations.push(format!("step {}: {e}", self.steps)),
            }
        }
        for &x in view.eliminated {
            if let Err(e) = self.graph.eliminate_vertex(x) {
                self.violations.push(format!("step {}: {e}", self.steps));
            }
        }
        if self.checks.degree_bounds || self.checks.neighborhoods {
            self.check_live_vertices(view.graph, view.k);
        }
        self.steps += 1;
    }
}
