//! Explicit elimination graphs.
//!
//! This is the brute-force reference used to check the quotient graph, the
//! approximate degrees and the pivot sets produced by the parallel driver. It
//! keeps every neighborhood as a sorted vector and forms cliques explicitly,
//! so it is only meant for small inputs.

use thiserror::Error;

use crate::matrix_io::{Permutation, SparsePattern};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("vertex {0} is not live")]
    NotLive(usize),
    #[error("permutation has {got} entries, pattern has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct EliminationGraph {
    adj: Vec<Vec<usize>>,
    live: Vec<bool>,
    live_count: usize,
    step: usize,
}

impl EliminationGraph {
    pub fn new(p: &SparsePattern) -> Self {
        EliminationGraph {
            adj: p.to_adjacency(),
            live: vec![true; p.n()],
            live_count: p.n(),
            step: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.live[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Removes `p` and turns its neighborhood into a clique. Returns the
    /// number of new undirected edges.
    pub fn eliminate_vertex(&mut self, p: usize) -> Result<usize, OracleError> {
        if p >= self.n() || !self.live[p] {
            return Err(OracleError::NotLive(p));
        }
        let np = std::mem::take(&mut self.adj[p]);
        let mut added = 0;
        let mut merged = Vec::new();
        for &v in &np {
            let old = &self.adj[v];
            merged.clear();
            merged.reserve(old.len() + np.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < np.len() {
                let next = match (old.get(i), np.get(j)) {
                    (Some(&a), Some(&b)) if a == b => {
                        i += 1;
                        j += 1;
                        a
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        i += 1;
                        a
                    }
                    (Some(_), Some(&b)) => {
                        j += 1;
                        added += 1;
                        b
                    }
                    (Some(&a), None) => {
                        i += 1;
                        a
                    }
                    (None, Some(&b)) => {
                        j += 1;
                        added += 1;
                        b
                    }
                    (None, None) => unreachable!(),
                };
                if next != v && next != p {
                    merged.push(next);
                }
            }
            // `v` itself is counted as added when it is missing from its own
            // list, which is always the case
            added -= 1;
            std::mem::swap(&mut self.adj[v], &mut merged);
        }
        self.live[p] = false;
        self.live_count -= 1;
        self.step += 1;
        debug_assert_eq!(added % 2, 0);
        Ok(added / 2)
    }

    /// True iff no two members are adjacent or share a neighbor.
    pub fn is_distance2_independent(&self, set: &[usize]) -> Result<bool, OracleError> {
        Ok(self.distance2_conflict(set)?.is_none())
    }

    /// First conflicting pair, with the shared neighbor when the two are not
    /// adjacent themselves.
    pub fn distance2_conflict(&self, set: &[usize]) -> Result<Option<Distance2Conflict>, OracleError> {
        let mut owner = vec![usize::MAX; self.n()];
        for &v in set {
            if v >= self.n() || !self.live[v] {
                return Err(OracleError::NotLive(v));
            }
        }
        for &v in set {
            for &u in std::iter::once(&v).chain(self.adj[v].iter()) {
                let o = owner[u];
                if o != usize::MAX && o != v {
                    let via = if u == v || u == o { None } else { Some(u) };
                    return Ok(Some(Distance2Conflict {
                        first: o,
                        second: v,
                        via,
                    }));
                }
                owner[u] = v;
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance2Conflict {
    pub first: usize,
    pub second: usize,
    /// Shared neighbor, `None` when the two are adjacent.
    pub via: Option<usize>,
}

/// Exact minimum degree with lowest-index tie breaking. Returns the order and
/// the total fill.
pub fn minimum_degree_order(p: &SparsePattern) -> (Permutation, usize) {
    let mut g = EliminationGraph::new(p);
    let n = p.n();
    let mut order = Vec::with_capacity(n);
    let mut fill = 0;
    for _ in 0..n {
        let pivot = (0..n)
            .filter(|&v| g.is_live(v))
            .min_by_key(|&v| (g.degree(v), v))
            .expect("live vertex remains");
        fill += g.eliminate_vertex(pivot).expect("pivot is live");
        order.push(pivot);
    }
    (
        Permutation::from_order(order).expect("each vertex eliminated once"),
        fill,
    )
}

/// Number of fill edges (undirected pairs) created by eliminating in `perm` order.
pub fn fill_in_count(p: &SparsePattern, perm: &Permutation) -> Result<usize, OracleError> {
    if perm.len() != p.n() {
        return Err(OracleError::SizeMismatch {
            expected: p.n(),
            got: perm.len(),
        });
    }
    let mut g = EliminationGraph::new(p);
    let mut fill = 0;
    for &v in perm.order() {
        fill += g.eliminate_vertex(v)?;
    }
    Ok(fill)
}
