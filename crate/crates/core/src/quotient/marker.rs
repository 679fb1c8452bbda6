/// Timestamped membership set over node indices. Clearing is `O(1)`.
#[derive(Debug, Clone)]
pub struct Marker {
    stamp: Vec<u64>,
    clock: u64,
}

impl Marker {
    pub fn new(n: usize) -> Self {
        Marker {
            stamp: vec![0; n],
            clock: 1,
        }
    }

    #[inline]
    pub fn advance(&mut self) {
        self.clock += 1;
    }

    #[inline]
    pub fn mark(&mut self, i: usize) {
        self.stamp[i] = self.clock;
    }

    #[inline]
    pub fn is_marked(&self, i: usize) -> bool {
        self.stamp[i] == self.clock
    }
}
