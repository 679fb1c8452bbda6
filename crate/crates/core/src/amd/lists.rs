use std::collections::BTreeSet;

use crate::idx::NONE;

/// One bucket per approximate degree with a cursor on the smallest
/// nonempty one. Buckets are ordered, so the lowest index wins ties.
#[derive(Debug, Clone)]
pub struct SequentialDegreeLists {
    buckets: Vec<BTreeSet<usize>>,
    degree_of: Vec<usize>,
    min: usize,
    len: usize,
}

impl SequentialDegreeLists {
    /// Lists for `n` variables with degrees in `0..=n`.
    pub fn new(n: usize) -> Self {
        SequentialDegreeLists {
            buckets: vec![BTreeSet::new(); n + 1],
            degree_of: vec![NONE; n],
            min: n + 1,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn degree_of(&self, v: usize) -> Option<usize> {
        let d = self.degree_of[v];
        (d != NONE).then_some(d)
    }

    /// Places `v` in bucket `deg`, moving it if already present.
    pub fn insert(&mut self, v: usize, deg: usize) {
        let deg = deg.min(self.buckets.len() - 1);
        self.remove(v);
        self.buckets[deg].insert(v);
        self.degree_of[v] = deg;
        self.min = self.min.min(deg);
        self.len += 1;
    }

    pub fn remove(&mut self, v: usize) {
        let d = self.degree_of[v];
        if d != NONE {
            self.buckets[d].remove(&v);
            self.degree_of[v] = NONE;
            self.len -= 1;
        }
    }

    /// Smallest stored degree.
    pub fn min_degree(&mut self) -> Option<usize> {
        while self.min < self.buckets.len() && self.buckets[self.min].is_empty() {
            self.min += 1;
        }
        (self.min < self.buckets.len()).then_some(self.min)
    }

    /// Removes and returns the lowest-index variable of minimum degree.
    pub fn pop_min(&mut self) -> Option<(usize, usize)> {
        let d = self.min_degree()?;
        let v = self.buckets[d].pop_first().expect("bucket nonempty");
        self.degree_of[v] = NONE;
        self.len -= 1;
        Some((v, d))
    }

    /// Variables currently in bucket `deg`, ascending.
    pub fn bucket(&self, deg: usize) -> impl Iterator<Item = usize> + '_ {
        self.buckets[deg].iter().copied()
    }
}
