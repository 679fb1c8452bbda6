//! Fill counts from the elimination tree, in `O(nnz(L))` time.

use crate::idx::NONE;
use crate::matrix_io::{Permutation, SparsePattern};

/// Off-diagonal entries per row of the Cholesky factor of the permuted
/// pattern, indexed by elimination position.
pub fn factor_row_counts(p: &SparsePattern, perm: &Permutation) -> Vec<usize> {
    let n = p.n();
    assert_eq!(perm.len(), n, "permutation size");
    let pos = perm.inverse();
    let parent = elimination_tree(p, perm);
    let mut mark = vec![NONE; n];
    let mut counts = vec![0; n];
    for i in 0..n {
        mark[i] = i;
        for &u in p.neighbors(perm.order()[i]) {
            // every node on the path up to the row subtree of i is an entry L(i, j)
            let mut j = pos[u];
            while j < i && mark[j] != i {
                mark[j] = i;
                counts[i] += 1;
                j = parent[j];
            }
        }
    }
    counts
}

/// Parent of each elimination position, `NONE` for roots.
pub fn elimination_tree(p: &SparsePattern, perm: &Permutation) -> Vec<usize> {
    let n = p.n();
    let pos = perm.inverse();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for i in 0..n {
        for &u in p.neighbors(perm.order()[i]) {
            let mut j = pos[u];
            while j < i {
                let next = ancestor[j];
                ancestor[j] = i;
                if next == NONE {
                    parent[j] = i;
                    break;
                }
                j = next;
            }
        }
    }
    parent
}

/// Number of undirected fill edges created by eliminating in `perm` order.
pub fn symbolic_fill(p: &SparsePattern, perm: &Permutation) -> u64 {
    let total: u64 = factor_row_counts(p, perm).iter().map(|&c| c as u64).sum();
    total - (p.nnz_offdiag() / 2) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{erdos_renyi, grid2d};
    use crate::matrix_io::random_permutation;
    use crate::oracle::fill_in_count;
    use proptest::prelude::*;

    #[test]
    fn grid_natural_order() {
        let g = grid2d(3);
        let id = Permutation::identity(9);
        assert_eq!(symbolic_fill(&g, &id), fill_in_count(&g, &id).unwrap() as u64);
    }

    proptest! {
        #[test]
        fn agrees_with_explicit_elimination(n in 2usize..60, prob in 0.02f64..0.4, s1 in any::<u64>(), s2 in any::<u64>()) {
            let p = erdos_renyi(n, prob, s1);
            let perm = random_permutation(n, s2);
            prop_assert_eq!(symbolic_fill(&p, &perm), fill_in_count(&p, &perm).unwrap() as u64);
        }
    }
}
