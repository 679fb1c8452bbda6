//! One round of the distance-2 Luby analog.
//!
//! Each candidate pushes its label into `l_min` of every vertex of its closed
//! neighborhood with an indivisible minimum; afterwards a candidate wins iff it
//! holds the minimum everywhere it pushed. Two winners within distance 2
//! would both have to own the vertex between them, so winners are distance-2
//! independent.

use std::sync::atomic::{AtomicU64, Ordering::Relaxed};

use crate::quotient::QuotientGraph;

pub const NO_LABEL: u64 = u64::MAX;

/// Label of candidate `v` at `step`: a 32-bit draw in the high half, the
/// vertex index in the low half, so ties fall to the lower index.
pub fn candidate_label(seed: u64, step: u64, v: usize) -> u64 {
    pack_label(draw(seed, step, v as u64), v)
}

pub fn pack_label(draw: u32, v: usize) -> u64 {
    debug_assert!(v < 1 << 32);
    ((draw as u64) << 32) | v as u64
}

fn draw(seed: u64, step: u64, v: u64) -> u32 {
    let mut z = seed
        .wrapping_add(step.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(v.wrapping_mul(0xd1b5_4a32_d192_ed03));
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) as u32
}

/// Per-vertex running minimum of pushed labels.
pub struct LabelBoard {
    l_min: Vec<AtomicU64>,
}

impl LabelBoard {
    pub fn new(n: usize) -> Self {
        LabelBoard {
            l_min: (0..n).map(|_| AtomicU64::new(NO_LABEL)).collect(),
        }
    }

    pub fn get(&self, u: usize) -> u64 {
        self.l_min[u].load(Relaxed)
    }

    pub fn reset(&self, u: usize) {
        self.l_min[u].store(NO_LABEL, Relaxed)
    }

    /// Pushes `label` over the closed neighborhood of `v`; records the
    /// vertices written in `touched`.
    pub fn push(&self, g: &QuotientGraph, v: usize, label: u64, touched: &mut Vec<usize>) {
        self.l_min[v].fetch_min(label, Relaxed);
        touched.push(v);
        g.for_each_neighbor(v, |u| {
            self.l_min[u].fetch_min(label, Relaxed);
            touched.push(u);
        });
    }

    /// True iff `label` is the minimum over the closed neighborhood of `v`.
    pub fn holds(&self, g: &QuotientGraph, v: usize, label: u64) -> bool {
        if self.get(v) != label {
            return false;
        }
        let mut ok = true;
        g.for_each_neighbor(v, |u| ok &= self.get(u) == label);
        ok
    }
}

/// Single-threaded round over `candidates` with the given labels. Returns
/// winners in candidate order.
pub fn luby_round(g: &QuotientGraph, candidates: &[usize], label: impl Fn(usize) -> u64) -> Vec<usize> {
    let board = LabelBoard::new(g.n());
    let mut touched = Vec::new();
    for &v in candidates {
        board.push(g, v, label(v), &mut touched);
    }
    candidates
        .iter()
        .copied()
        .filter(|&v| board.holds(g, v, label(v)))
        .collect()
}
