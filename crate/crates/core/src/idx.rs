//! Index words shared between workers.
//!
//! Every per-node array and the adjacency pool are stored as relaxed atomics so
//! the quotient graph can be shared by reference across workers. Visibility
//! across phases comes from the barriers of the driver, not from these loads.

use std::sync::atomic::Ordering::Relaxed;

#[cfg(not(feature = "idx32"))]
mod width {
    pub type Raw = u64;
    pub type Atomic = std::sync::atomic::AtomicU64;
}

#[cfg(feature = "idx32")]
mod width {
    pub type Raw = u32;
    pub type Atomic = std::sync::atomic::AtomicU32;
}

/// Sentinel for "no index".
pub const NONE: usize = usize::MAX;

/// Largest index value the configured word width can store (the all-ones word
/// is reserved for [`NONE`]).
pub const MAX_INDEX: usize = if (width::Raw::MAX as u128) < (usize::MAX as u128) {
    width::Raw::MAX as usize - 1
} else {
    usize::MAX - 1
};

#[inline]
fn encode(v: usize) -> width::Raw {
    if v == NONE {
        width::Raw::MAX
    } else {
        debug_assert!(v <= MAX_INDEX);
        v as width::Raw
    }
}

#[inline]
fn decode(raw: width::Raw) -> usize {
    if raw == width::Raw::MAX {
        NONE
    } else {
        raw as usize
    }
}

/// Fixed-length array of index words.
pub(crate) struct IdxVec(Vec<width::Atomic>);

impl IdxVec {
    pub fn filled(len: usize, value: usize) -> Self {
        let raw = encode(value);
        IdxVec((0..len).map(|_| width::Atomic::new(raw)).collect())
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        IdxVec(it.into_iter().map(|v| width::Atomic::new(encode(v))).collect())
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        decode(self.0[i].load(Relaxed))
    }

    #[inline]
    pub fn set(&self, i: usize, v: usize) {
        self.0[i].store(encode(v), Relaxed)
    }

    #[inline]
    pub fn add(&self, i: usize, delta: usize) {
        self.set(i, self.get(i) + delta)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn grow(&mut self, extra: usize) {
        self.0.extend((0..extra).map(|_| width::Atomic::new(0)));
    }
}
