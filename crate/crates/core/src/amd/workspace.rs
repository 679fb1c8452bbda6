/// The `w(e)` counters of the set-difference scan.
///
/// A counter is set only when its stamp equals the current clock, so
/// [`advance`](Self::advance) resets every counter in constant time.
#[derive(Debug, Clone)]
pub struct DegreeWorkspace {
    w: Vec<usize>,
    stamp: Vec<u64>,
    clock: u64,
}

impl DegreeWorkspace {
    pub fn new(n: usize) -> Self {
        DegreeWorkspace {
            w: vec![0; n],
            stamp: vec![0; n],
            clock: 1,
        }
    }

    pub fn advance(&mut self) {
        self.clock += 1;
    }

    #[inline]
    pub fn get(&self, e: usize) -> Option<usize> {
        (self.stamp[e] == self.clock).then(|| self.w[e])
    }

    /// Initializes `w(e)` to `init` on first touch this round, then subtracts `dec`.
    #[inline]
    pub(crate) fn touch(&mut self, e: usize, init: usize, dec: usize) -> bool {
        let first = self.stamp[e] != self.clock;
        if first {
            self.stamp[e] = self.clock;
            self.w[e] = init;
        }
        self.w[e] -= dec;
        first
    }

    /// Workspace with arbitrary leftover contents from "earlier rounds".
    #[cfg(test)]
    pub(crate) fn poisoned(n: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let clock = 1_000;
        DegreeWorkspace {
            w: (0..n).map(|_| rng.gen_range(0..1_000)).collect(),
            stamp: (0..n).map(|_| rng.gen_range(0..clock)).collect(),
            clock,
        }
    }
}
