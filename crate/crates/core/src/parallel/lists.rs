//! Degree lists shared by workers: every worker keeps its own doubly linked
//! buckets, and a single shared word per variable says whose entry is current.
//! Removal only clears that word; stale entries are unlinked lazily by the
//! owning worker when it next reads the bucket.

use crate::idx::{IdxVec, NONE};

/// Owning worker of each variable, or none.
pub struct AffinityMap {
    slots: IdxVec,
}

impl AffinityMap {
    pub fn new(n: usize) -> Self {
        AffinityMap {
            slots: IdxVec::filled(n, NONE),
        }
    }

    pub fn owner(&self, v: usize) -> Option<usize> {
        let t = self.slots.get(v);
        (t != NONE).then_some(t)
    }

    /// Invalidates every entry of `v`. No list is touched.
    pub fn remove(&self, v: usize) {
        self.slots.set(v, NONE);
    }

    fn set(&self, v: usize, t: usize) {
        self.slots.set(v, t);
    }
}

/// One worker's buckets. Degrees run over `0..n`; `n` means "none".
pub struct WorkerLists {
    tid: usize,
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    loc: Vec<usize>,
    lamd: usize,
    entries: usize,
}

impl WorkerLists {
    pub fn new(tid: usize, n: usize) -> Self {
        WorkerLists {
            tid,
            head: vec![NONE; n.max(1)],
            next: vec![NONE; n],
            prev: vec![NONE; n],
            loc: vec![NONE; n],
            lamd: n,
            entries: 0,
        }
    }

    pub fn tid(&self) -> usize {
        self.tid
    }

    fn n(&self) -> usize {
        self.loc.len()
    }

    /// Entries currently linked, stale ones included.
    pub fn entries(&self) -> usize {
        self.entries
    }

    /// Local bucket of `v`, stale or not.
    pub fn loc(&self, v: usize) -> Option<usize> {
        let d = self.loc[v];
        (d != NONE).then_some(d)
    }

    fn unlink(&mut self, v: usize) {
        let d = self.loc[v];
        let (p, nx) = (self.prev[v], self.next[v]);
        if p == NONE {
            self.head[d] = nx;
        } else {
            self.next[p] = nx;
        }
        if nx != NONE {
            self.prev[nx] = p;
        }
        self.loc[v] = NONE;
        self.entries -= 1;
    }

    /// Moves `v` into bucket `deg` of this worker and takes ownership of it.
    pub fn insert(&mut self, aff: &AffinityMap, v: usize, deg: usize) {
        let deg = deg.min(self.n().saturating_sub(1));
        if self.loc[v] != NONE {
            self.unlink(v);
        }
        let h = self.head[deg];
        self.next[v] = h;
        self.prev[v] = NONE;
        if h != NONE {
            self.prev[h] = v;
        }
        self.head[deg] = v;
        self.loc[v] = deg;
        self.entries += 1;
        aff.set(v, self.tid);
        self.lamd = self.lamd.min(deg);
    }

    /// Live entries of bucket `deg`. Unlinks the stale ones on the way.
    pub fn get(&mut self, aff: &AffinityMap, deg: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(aff, deg, usize::MAX, &mut out);
        out
    }

    /// Appends up to `limit` live entries of bucket `deg` to `out`, reclaiming
    /// stale entries it passes.
    fn visit(&mut self, aff: &AffinityMap, deg: usize, limit: usize, out: &mut Vec<usize>) -> usize {
        if deg >= self.head.len() {
            return 0;
        }
        let mut taken = 0;
        let mut cur = self.head[deg];
        while cur != NONE && taken < limit {
            let nx = self.next[cur];
            if aff.owner(cur) == Some(self.tid) {
                out.push(cur);
                taken += 1;
            } else {
                self.unlink(cur);
            }
            cur = nx;
        }
        taken
    }

    /// Lowest degree with a live local entry, or `n` if there is none.
    pub fn lamd(&mut self, aff: &AffinityMap) -> usize {
        let mut probe = Vec::new();
        while self.lamd < self.n() {
            probe.clear();
            if self.visit(aff, self.lamd, 1, &mut probe) > 0 {
                break;
            }
            self.lamd += 1;
        }
        self.lamd
    }

    /// Live entries with degree in `lo..=hi`, lowest buckets first, at most
    /// `limit` of them.
    pub fn gather(&mut self, aff: &AffinityMap, lo: usize, hi: usize, limit: usize, out: &mut Vec<usize>) {
        out.clear();
        let hi = hi.min(self.n().saturating_sub(1));
        let mut d = lo.max(self.lamd);
        while d <= hi && out.len() < limit {
            let room = limit - out.len();
            self.visit(aff, d, room, out);
            d += 1;
        }
    }
}

/// All workers' buckets plus the shared affinity map.
pub struct ConcurrentDegreeLists {
    affinity: AffinityMap,
    workers: Vec<WorkerLists>,
}

impl ConcurrentDegreeLists {
    pub fn new(n: usize, workers: usize) -> Self {
        ConcurrentDegreeLists {
            affinity: AffinityMap::new(n),
            workers: (0..workers.max(1)).map(|t| WorkerLists::new(t, n)).collect(),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers.len()
    }

    pub fn affinity(&self) -> &AffinityMap {
        &self.affinity
    }

    pub fn worker(&self, t: usize) -> &WorkerLists {
        &self.workers[t]
    }

    pub fn insert(&mut self, t: usize, v: usize, deg: usize) {
        self.workers[t].insert(&self.affinity, v, deg)
    }

    pub fn remove(&self, v: usize) {
        self.affinity.remove(v)
    }

    pub fn get(&mut self, t: usize, deg: usize) -> Vec<usize> {
        self.workers[t].get(&self.affinity, deg)
    }

    pub fn lamd(&mut self, t: usize) -> usize {
        self.workers[t].lamd(&self.affinity)
    }

    /// Borrows the shared map and every worker's lists separately, so that
    /// each worker thread can own its lists.
    pub fn split_mut(&mut self) -> (&AffinityMap, &mut [WorkerLists]) {
        (&self.affinity, &mut self.workers)
    }
}
