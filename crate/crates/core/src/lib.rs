//! Approximate minimum degree orderings, sequential and parallel.

mod idx;

pub mod amd;
pub mod bench;
pub mod fill;
pub mod generate;
pub mod matrix_io;
pub mod oracle;
pub mod parallel;
pub mod quotient;
pub mod result;
pub mod verify;

pub use idx::MAX_INDEX;
pub use result::{OrderingError, OrderingResult};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::matrix_io::SparsePattern;

    /// The 3x3 grid used in the worked examples, 0-based row-major.
    pub fn grid3() -> SparsePattern {
        crate::generate::grid2d(3)
    }

    pub fn path(n: usize) -> SparsePattern {
        crate::generate::path(n)
    }
}
