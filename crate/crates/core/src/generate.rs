//! Synthetic patterns: grid Laplacians, random graphs, paths and trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix_io::SparsePattern;

/// 5-point Laplacian pattern on a `k × k` grid, row-major numbering.
pub fn grid2d(k: usize) -> SparsePattern {
    let mut edges = Vec::with_capacity(2 * k * k);
    for r in 0..k {
        for c in 0..k {
            let v = r * k + c;
            if c + 1 < k {
                edges.push((v, v + 1));
            }
            if r + 1 < k {
                edges.push((v, v + k));
            }
        }
    }
    SparsePattern::from_edges(k * k, &edges).expect("grid indices in range")
}

/// 7-point Laplacian pattern on a `k × k × k` grid.
pub fn grid3d(k: usize) -> SparsePattern {
    let mut edges = Vec::with_capacity(3 * k * k * k);
    let id = |x: usize, y: usize, z: usize| (z * k + y) * k + x;
    for z in 0..k {
        for y in 0..k {
            for x in 0..k {
                let v = id(x, y, z);
                if x + 1 < k {
                    edges.push((v, id(x + 1, y, z)));
                }
                if y + 1 < k {
                    edges.push((v, id(x, y + 1, z)));
                }
                if z + 1 < k {
                    edges.push((v, id(x, y, z + 1)));
                }
            }
        }
    }
    SparsePattern::from_edges(k * k * k, &edges).expect("grid indices in range")
}

/// Erdős–Rényi graph: every pair is an edge with probability `prob`.
pub fn erdos_renyi(n: usize, prob: f64, seed: u64) -> SparsePattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < prob {
                edges.push((u, v));
            }
        }
    }
    SparsePattern::from_edges(n, &edges).expect("indices in range")
}

pub fn path(n: usize) -> SparsePattern {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    SparsePattern::from_edges(n, &edges).expect("indices in range")
}

/// Uniform random recursive tree: vertex `v` attaches to a random earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> SparsePattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    SparsePattern::from_edges(n, &edges).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let g = grid2d(4);
        assert_eq!(g.n(), 16);
        assert_eq!(g.nnz_offdiag(), 2 * 2 * 4 * 3);
        let g = grid3d(3);
        assert_eq!(g.n(), 27);
        assert_eq!(g.nnz_offdiag(), 2 * 3 * 9 * 2);
        assert_eq!(path(5).nnz_offdiag(), 8);
        assert_eq!(random_tree(30, 1).nnz_offdiag(), 58);
        assert_eq!(erdos_renyi(50, 0.2, 3), erdos_renyi(50, 0.2, 3));
    }
}
