use thiserror::Error;

use super::market::{RawTriplets, Symmetry};
use super::permutation::Permutation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("matrix is {n_rows}x{n_cols}, ordering needs a square matrix")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("vertex {v} out of range for {n} vertices")]
    OutOfRange { v: usize, n: usize },
    #[error("pattern is not symmetric: {u} -> {v} has no mirror")]
    NotSymmetric { u: usize, v: usize },
    #[error("permutation has {got} entries, pattern has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
}

/// Symmetric, loop-free adjacency structure in compressed rows.
///
/// Neighbor lists are strictly increasing. Vertices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePattern {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl SparsePattern {
    /// Builds the pattern of the undirected graph with the given edges.
    /// Self-loops are dropped and duplicates collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, PatternError> {
        let mut directed = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(PatternError::OutOfRange { v: x, n });
                }
            }
            if u != v {
                directed.push((u, v));
                directed.push((v, u));
            }
        }
        Ok(Self::from_directed(n, directed))
    }

    fn from_directed(n: usize, mut directed: Vec<(usize, usize)>) -> Self {
        directed.sort_unstable();
        directed.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &directed {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = directed.into_iter().map(|(_, v)| v).collect();
        SparsePattern { offsets, neighbors }
    }

    /// Builds a pattern from per-vertex neighbor lists, checking every invariant.
    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Result<Self, PatternError> {
        let n = adj.len();
        let mut directed = Vec::new();
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if v >= n {
                    return Err(PatternError::OutOfRange { v, n });
                }
                if v != u {
                    directed.push((u, v));
                }
            }
        }
        let p = Self::from_directed(n, directed);
        p.check_symmetric()?;
        Ok(p)
    }

    fn check_symmetric(&self) -> Result<(), PatternError> {
        for u in 0..self.n() {
            for &v in self.neighbors(u) {
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(PatternError::NotSymmetric { u, v });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored directed edges, `Σ |adj(v)|`.
    pub fn nnz_offdiag(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn to_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|v| self.neighbors(v).to_vec()).collect()
    }

    pub fn sorted_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n()).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }
}

/// Pattern of `|A| + |Aᵀ|` with the diagonal removed.
pub fn symmetrize_pattern(raw: &RawTriplets) -> Result<SparsePattern, PatternError> {
    if raw.n_rows != raw.n_cols {
        return Err(PatternError::NotSquare {
            n_rows: raw.n_rows,
            n_cols: raw.n_cols,
        });
    }
    let n = raw.n_rows;
    let mut directed = Vec::with_capacity(raw.entries.len() * 2);
    for &(r, c) in &raw.entries {
        if r == 0 || c == 0 || r > n || c > n {
            return Err(PatternError::OutOfRange { v: r.max(c), n });
        }
        if r != c {
            directed.push((r - 1, c - 1));
            directed.push((c - 1, r - 1));
        }
    }
    Ok(SparsePattern::from_directed(n, directed))
}

/// Builds the pattern without forming `|A| + |Aᵀ|`, for inputs already known
/// to be symmetric. One-triangle storage (non-general banners) is expanded as
/// the format requires; a general file must list both triangles.
pub fn pattern_from_symmetric(raw: &RawTriplets) -> Result<SparsePattern, PatternError> {
    if raw.n_rows != raw.n_cols {
        return Err(PatternError::NotSquare {
            n_rows: raw.n_rows,
            n_cols: raw.n_cols,
        });
    }
    if raw.symmetry != Symmetry::General {
        return symmetrize_pattern(raw);
    }
    let n = raw.n_rows;
    let mut directed = Vec::with_capacity(raw.entries.len());
    for &(r, c) in &raw.entries {
        if r == 0 || c == 0 || r > n || c > n {
            return Err(PatternError::OutOfRange { v: r.max(c), n });
        }
        if r != c {
            directed.push((r - 1, c - 1));
        }
    }
    let p = SparsePattern::from_directed(n, directed);
    p.check_symmetric()?;
    Ok(p)
}

/// Relabels vertex `v` as `perm.inverse(v)`.
pub fn apply_permutation(p: &SparsePattern, perm: &Permutation) -> Result<SparsePattern, PatternError> {
    if perm.len() != p.n() {
        return Err(PatternError::SizeMismatch {
            expected: p.n(),
            got: perm.len(),
        });
    }
    let n = p.n();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut neighbors = Vec::with_capacity(p.nnz_offdiag());
    offsets.push(0);
    for new in 0..n {
        let old = perm.order()[new];
        let start = neighbors.len();
        neighbors.extend(p.neighbors(old).iter().map(|&u| perm.inverse()[u]));
        neighbors[start..].sort_unstable();
        offsets.push(neighbors.len());
    }
    Ok(SparsePattern { offsets, neighbors })
}
