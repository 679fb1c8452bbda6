//! Input side: Matrix Market parsing, the symmetric pattern, and permutations.

mod market;
mod pattern;
mod permutation;

pub use market::{
    parse_matrix_market, read_matrix_market, write_matrix_market, MatrixMarketError, RawTriplets, Symmetry,
};
pub use pattern::{apply_permutation, pattern_from_symmetric, symmetrize_pattern, PatternError, SparsePattern};
pub use permutation::{random_permutation, InvalidPermutation, Permutation};
