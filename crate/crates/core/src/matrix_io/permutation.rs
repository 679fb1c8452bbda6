use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a permutation of 0..{n}: {reason}")]
pub struct InvalidPermutation {
    pub n: usize,
    pub reason: String,
}

/// Elimination order: `order[k]` is the vertex eliminated at position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn from_order(order: Vec<usize>) -> Result<Self, InvalidPermutation> {
        let n = order.len();
        let mut inverse = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(InvalidPermutation {
                    n,
                    reason: format!("entry {v} out of range"),
                });
            }
            if inverse[v] != usize::MAX {
                return Err(InvalidPermutation {
                    n,
                    reason: format!("entry {v} repeated"),
                });
            }
            inverse[v] = k;
        }
        Ok(Permutation { order, inverse })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `inverse()[v]` is the position of vertex `v`.
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    /// `self` followed by `other`: the result maps position `k` to
    /// `self.order[other.order[k]]`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let order: Vec<usize> = other.order.iter().map(|&i| self.order[i]).collect();
        Permutation::from_order(order).expect("composition of permutations is a permutation")
    }
}

/// Seeded uniform shuffle (Fisher–Yates).
pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    Permutation::from_order(order).expect("shuffle of 0..n is a permutation")
}
