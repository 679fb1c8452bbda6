//! Quotient graph in a single pooled index store.
//!
//! Each live node owns one contiguous run of the pool. A variable stores `A_v`
//! followed by `E_v`; an element stores `L_e`. New element lists are written
//! into space claimed from the top of the pool with [`QuotientGraph::reserve_pool`],
//! which is a single compare-and-swap on the top pointer, so workers eliminating
//! distance-2 independent pivots never contend on anything else.
//!
//! Ownership rule for concurrent use: while a step is in flight a worker may
//! only write the nodes of its own pivots, the variables in those pivots'
//! neighborhoods, elements adjacent to its pivots, and its own reservation.

mod marker;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU8, AtomicUsize, Ordering::Relaxed};

use thiserror::Error;

use crate::idx::{IdxVec, MAX_INDEX, NONE};
use crate::matrix_io::SparsePattern;

pub use marker::Marker;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("pool exhausted: requested {requested} slots, {available} available")]
    PoolExhausted { requested: usize, available: usize },
    #[error("reservation of {available} slots cannot hold {needed}")]
    ReservationTooSmall { needed: usize, available: usize },
    #[error("{needed} exceeds the maximum index of the configured width")]
    IndexOverflow { needed: u128 },
    #[error("node {0} is not a live variable")]
    NotAVariable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeState {
    /// Uneliminated supervariable representative.
    Variable = 0,
    /// Eliminated pivot whose clique is still stored.
    Element = 1,
    /// Element whose clique was subsumed by a later element.
    Absorbed = 2,
    /// Non-principal variable folded into an indistinguishable representative.
    Merged = 3,
    /// Variable eliminated together with a pivot it became indistinguishable from.
    Dead = 4,
}

impl NodeState {
    fn from_u8(v: u8) -> Self {
        match v {
            0 => NodeState::Variable,
            1 => NodeState::Element,
            2 => NodeState::Absorbed,
            3 => NodeState::Merged,
            _ => NodeState::Dead,
        }
    }

    fn label(self) -> &'static str {
        match self {
            NodeState::Variable => "variable",
            NodeState::Element => "element",
            NodeState::Absorbed => "absorbed",
            NodeState::Merged => "merged",
            NodeState::Dead => "dead",
        }
    }
}

/// A claimed, not yet consumed range of pool slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolReservation {
    offset: usize,
    length: usize,
}

impl PoolReservation {
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn length(&self) -> usize {
        self.length
    }

    fn take(&mut self, len: usize) -> Option<usize> {
        if len > self.length {
            return None;
        }
        let at = self.offset;
        self.offset += len;
        self.length -= len;
        Some(at)
    }
}

/// Dead runs a single owner may reuse, kept by length for best fit.
#[derive(Debug, Default, Clone)]
pub struct FreeRuns {
    by_len: BTreeMap<usize, Vec<usize>>,
    slots: usize,
}

impl FreeRuns {
    pub fn new() -> Self {
        FreeRuns::default()
    }

    /// Total slots held.
    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn release(&mut self, r: PoolReservation) {
        if r.length > 0 {
            self.by_len.entry(r.length).or_default().push(r.offset);
            self.slots += r.length;
        }
    }

    /// Exactly `needed` slots cut from the smallest run that fits. The rest
    /// of that run stays available.
    pub fn take(&mut self, needed: usize) -> Option<PoolReservation> {
        if needed == 0 {
            return Some(PoolReservation { offset: 0, length: 0 });
        }
        let (&len, offsets) = self.by_len.range_mut(needed..).next()?;
        let offset = offsets.pop().expect("nonempty bucket");
        if offsets.is_empty() {
            self.by_len.remove(&len);
        }
        self.slots -= len;
        self.release(PoolReservation {
            offset: offset + needed,
            length: len - needed,
        });
        Some(PoolReservation { offset, length: needed })
    }

    pub fn clear(&mut self) {
        self.by_len.clear();
        self.slots = 0;
    }
}

pub struct QuotientGraph {
    n: usize,
    state: Vec<AtomicU8>,
    head: IdxVec,
    len: IdxVec,
    elen: IdxVec,
    weight: IdxVec,
    /// Approximate external degree for variables, weighted clique size for elements.
    degree: IdxVec,
    parent: IdxVec,
    next_member: IdxVec,
    last_member: IdxVec,
    pool: IdxVec,
    pool_top: AtomicUsize,
    peak_top: AtomicUsize,
    initial_top: usize,
    collections: usize,
}

fn checked_index(x: u128) -> Result<usize, QuotientError> {
    if x > MAX_INDEX as u128 {
        Err(QuotientError::IndexOverflow { needed: x })
    } else {
        Ok(x as usize)
    }
}

impl QuotientGraph {
    /// Initial quotient graph: every vertex a variable with `A_v = adj(v)`.
    ///
    /// The pool holds `⌈(1 + augmentation) · nnz⌉ + n` slots.
    pub fn from_pattern(p: &SparsePattern, augmentation: f64) -> Result<Self, QuotientError> {
        let n = p.n();
        let nnz = p.nnz_offdiag();
        let aug = if augmentation.is_finite() && augmentation > 0.0 {
            augmentation
        } else {
            0.0
        };
        let scaled = ((1.0 + aug) * nnz as f64).ceil();
        if !scaled.is_finite() || scaled >= MAX_INDEX as f64 {
            return Err(QuotientError::IndexOverflow { needed: u128::MAX });
        }
        let capacity = checked_index(scaled as u128 + n as u128)?;
        checked_index(n as u128)?;

        let pool = IdxVec::filled(capacity, 0);
        let mut at = 0;
        for v in 0..n {
            for &u in p.neighbors(v) {
                pool.set(at, u);
                at += 1;
            }
        }
        let mut offset = 0;
        let head = IdxVec::from_iter((0..n).map(|v| {
            let h = offset;
            offset += p.degree(v);
            h
        }));
        Ok(QuotientGraph {
            n,
            state: (0..n).map(|_| AtomicU8::new(NodeState::Variable as u8)).collect(),
            head,
            len: IdxVec::from_iter((0..n).map(|v| p.degree(v))),
            elen: IdxVec::filled(n, 0),
            weight: IdxVec::filled(n, 1),
            degree: IdxVec::from_iter((0..n).map(|v| p.degree(v))),
            parent: IdxVec::filled(n, NONE),
            next_member: IdxVec::filled(n, NONE),
            last_member: IdxVec::from_iter(0..n),
            pool,
            pool_top: AtomicUsize::new(nnz),
            peak_top: AtomicUsize::new(nnz),
            initial_top: nnz,
            collections: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn state(&self, i: usize) -> NodeState {
        NodeState::from_u8(self.state[i].load(Relaxed))
    }

    #[inline]
    fn set_state(&self, i: usize, s: NodeState) {
        self.state[i].store(s as u8, Relaxed)
    }

    #[inline]
    pub fn is_variable(&self, v: usize) -> bool {
        self.state(v) == NodeState::Variable
    }

    /// Number of original vertices represented by `v`.
    #[inline]
    pub fn weight(&self, v: usize) -> usize {
        self.weight.get(v)
    }

    /// Stored approximate external degree of variable `v`.
    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degree.get(v)
    }

    #[inline]
    pub(crate) fn set_degree(&self, v: usize, d: usize) {
        self.degree.set(v, d)
    }

    /// Weighted size of `L_e`.
    #[inline]
    pub fn element_size(&self, e: usize) -> usize {
        self.degree.get(e)
    }

    /// The node `i` was folded into, if any.
    pub fn parent(&self, i: usize) -> Option<usize> {
        let p = self.parent.get(i);
        (p != NONE).then_some(p)
    }

    #[inline]
    fn slice(&self, start: usize, len: usize) -> impl Iterator<Item = usize> + '_ {
        (start..start + len).map(move |i| self.pool.get(i))
    }

    /// Stored `(|A_v|, |E_v|)` of a variable, or `(|L_e|, 0)` of an element.
    pub fn list_lengths(&self, i: usize) -> (usize, usize) {
        let len = self.len.get(i);
        let elen = self.elen.get(i);
        (len - elen, elen)
    }

    /// Stored `A_v` entries (may include stale merged indices).
    pub fn a_iter(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (alen, _) = self.list_lengths(v);
        self.slice(self.head.get(v), alen)
    }

    /// Stored `E_v` entries.
    pub fn e_iter(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (alen, elen) = self.list_lengths(v);
        self.slice(self.head.get(v) + alen, elen)
    }

    /// Stored `L_e` entries (may include stale indices).
    pub fn l_iter(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.slice(self.head.get(e), self.len.get(e))
    }

    pub fn a_list(&self, v: usize) -> Vec<usize> {
        self.a_iter(v).collect()
    }

    pub fn e_list(&self, v: usize) -> Vec<usize> {
        self.e_iter(v).collect()
    }

    pub fn l_list(&self, e: usize) -> Vec<usize> {
        self.l_iter(e).collect()
    }

    pub fn live_variables(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.is_variable(v))
    }

    pub fn pool_top(&self) -> usize {
        self.pool_top.load(Relaxed)
    }

    pub fn pool_capacity(&self) -> usize {
        self.pool.len()
    }

    pub fn initial_pool_usage(&self) -> usize {
        self.initial_top
    }

    /// Highest pool top seen so far.
    pub fn peak_pool_usage(&self) -> usize {
        self.peak_top.load(Relaxed)
    }

    pub fn garbage_collections(&self) -> usize {
        self.collections
    }

    /// Follows merge links to the representative. Compresses the path.
    pub fn find_representative(&self, v: usize) -> usize {
        let mut root = v;
        while self.state(root) == NodeState::Merged {
            root = self.parent.get(root);
        }
        let mut cur = v;
        while cur != root {
            let next = self.parent.get(cur);
            self.parent.set(cur, root);
            cur = next;
        }
        root
    }

    /// Original vertices represented by `v`: `v` first, then merged members in
    /// the order they were folded in.
    pub fn members(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight(v).max(1));
        let mut cur = v;
        while cur != NONE {
            out.push(cur);
            cur = self.next_member.get(cur);
        }
        out
    }

    pub(crate) fn append_members(&self, into: usize, from: usize) {
        let tail = self.last_member.get(into);
        self.next_member.set(tail, from);
        self.last_member.set(into, self.last_member.get(from));
    }

    fn resolve_element(&self, mut e: usize) -> Option<usize> {
        loop {
            match self.state(e) {
                NodeState::Element => return Some(e),
                NodeState::Absorbed => e = self.parent.get(e),
                _ => return None,
            }
        }
    }

    /// `(A_v ∪ ⋃_{e ∈ E_v} L_e) \ {v}` as sorted live representatives.
    pub fn reconstruct_neighborhood(&self, v: usize) -> Result<Vec<usize>, QuotientError> {
        if v >= self.n || !self.is_variable(v) {
            return Err(QuotientError::NotAVariable(v));
        }
        let mut out = Vec::new();
        let mut push = |u: usize| {
            let r = self.find_representative(u);
            if r != v && self.is_variable(r) {
                out.push(r);
            }
        };
        for u in self.a_iter(v) {
            push(u);
        }
        for e in self.e_iter(v) {
            if let Some(e) = self.resolve_element(e) {
                for u in self.l_iter(e) {
                    push(u);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Calls `f` for every live representative adjacent to `v`, possibly more
    /// than once. Reads only; safe during the selection phase.
    pub(crate) fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize)) {
        for u in self.a_iter(v) {
            if u != v && self.is_variable(u) {
                f(u);
            }
        }
        for e in self.e_iter(v) {
            if self.state(e) != NodeState::Element {
                continue;
            }
            for u in self.l_iter(e) {
                if u != v && self.is_variable(u) {
                    f(u);
                }
            }
        }
    }

    /// `|A_p| + Σ_{e ∈ E_p} |L_e|`, an upper bound on the stored size of `L_p`.
    pub fn neighborhood_upper_bound(&self, p: usize) -> usize {
        let (alen, _) = self.list_lengths(p);
        alen + self.e_iter(p).map(|e| self.len.get(e)).sum::<usize>()
    }

    /// Builds `L_p` (live representatives, each once) into `out` without
    /// touching the graph.
    pub fn collect_element(&self, p: usize, marker: &mut Marker, out: &mut Vec<usize>) -> Result<(), QuotientError> {
        if p >= self.n || !self.is_variable(p) {
            return Err(QuotientError::NotAVariable(p));
        }
        out.clear();
        marker.advance();
        marker.mark(p);
        for u in self.a_iter(p) {
            if self.is_variable(u) && !marker.is_marked(u) {
                marker.mark(u);
                out.push(u);
            }
        }
        for e in self.e_iter(p) {
            for u in self.l_iter(e) {
                if self.is_variable(u) && !marker.is_marked(u) {
                    marker.mark(u);
                    out.push(u);
                }
            }
        }
        Ok(())
    }

    /// Claims `length` slots at the top of the pool with one indivisible update.
    pub fn reserve_pool(&self, length: usize) -> Result<PoolReservation, QuotientError> {
        let cap = self.pool.len();
        let res = self.pool_top.fetch_update(Relaxed, Relaxed, |top| {
            top.checked_add(length).filter(|&end| end <= cap)
        });
        match res {
            Ok(top) => {
                self.peak_top.fetch_max(top + length, Relaxed);
                Ok(PoolReservation { offset: top, length })
            }
            Err(top) => Err(QuotientError::PoolExhausted {
                requested: length,
                available: cap - top,
            }),
        }
    }

    /// Turns pivot `p` into an element for clique `lp` (as produced by
    /// [`collect_element`](Self::collect_element)) and applies the connection
    /// updates to every variable in `lp`.
    ///
    /// Absorbs `E_p`, prunes `A_v` of entries in `lp ∪ {p}`, drops absorbed
    /// elements from `E_v` and appends `p`. These rewrites happen in place:
    /// `|A_v| + |E_v|` never grows. The clique itself is stored later with
    /// [`store_element`](Self::store_element), once merging has shrunk it.
    ///
    /// Returns the runs released by `p` and by the elements it absorbed. No
    /// other pivot can reach them, so they can hold the new clique.
    pub fn commit_element(
        &self,
        p: usize,
        lp: &[usize],
        marker: &mut Marker,
    ) -> Result<Vec<PoolReservation>, QuotientError> {
        if !self.is_variable(p) {
            return Err(QuotientError::NotAVariable(p));
        }
        let mut freed = vec![self.run_of(p)];
        let (alen, elen) = self.list_lengths(p);
        let e_start = self.head.get(p) + alen;
        for e in self.slice(e_start, elen) {
            if self.state(e) == NodeState::Element {
                freed.push(self.run_of(e));
                self.absorb_element(e, p);
            }
        }
        self.set_state(p, NodeState::Element);
        self.len.set(p, 0);
        self.elen.set(p, 0);
        self.degree.set(p, lp.iter().map(|&v| self.weight(v)).sum());

        marker.advance();
        for &v in lp {
            marker.mark(v);
        }
        for &v in lp {
            self.rewrite_for_pivot(v, p, marker);
        }
        Ok(freed)
    }

    /// Writes `list` as `L_e` into `reservation` and records its weighted size.
    pub fn store_element(
        &self,
        e: usize,
        list: &[usize],
        reservation: &mut PoolReservation,
    ) -> Result<(), QuotientError> {
        let at = reservation.take(list.len()).ok_or(QuotientError::ReservationTooSmall {
            needed: list.len(),
            available: reservation.length(),
        })?;
        let mut size = 0;
        for (k, &v) in list.iter().enumerate() {
            self.pool.set(at + k, v);
            size += self.weight(v);
        }
        self.head.set(e, at);
        self.len.set(e, list.len());
        self.degree.set(e, size);
        Ok(())
    }

    fn rewrite_for_pivot(&self, v: usize, p: usize, in_lp: &Marker) {
        let h = self.head.get(v);
        let len = self.len.get(v);
        let alen = len - self.elen.get(v);
        let mut w = h;
        for r in h..h + alen {
            let u = self.pool.get(r);
            if self.is_variable(u) && !in_lp.is_marked(u) {
                self.pool.set(w, u);
                w += 1;
            }
        }
        let new_alen = w - h;
        for r in h + alen..h + len {
            let e = self.pool.get(r);
            if self.state(e) == NodeState::Element {
                self.pool.set(w, e);
                w += 1;
            }
        }
        assert!(w < h + len, "variable {v} has no slot freed by pivot {p}");
        self.pool.set(w, p);
        w += 1;
        self.len.set(v, w - h);
        self.elen.set(v, w - h - new_alen);
    }

    /// Current run of node `i`; dead once `i` is merged, eliminated or absorbed.
    pub(crate) fn run_of(&self, i: usize) -> PoolReservation {
        PoolReservation {
            offset: self.head.get(i),
            length: self.len.get(i),
        }
    }

    /// Collect, commit and store in one call. On a short reservation the
    /// graph is left untouched.
    pub fn eliminate_pivot(
        &self,
        p: usize,
        reservation: &mut PoolReservation,
        marker: &mut Marker,
    ) -> Result<Vec<usize>, QuotientError> {
        let mut lp = Vec::new();
        self.collect_element(p, marker, &mut lp)?;
        if reservation.length() < lp.len() {
            return Err(QuotientError::ReservationTooSmall {
                needed: lp.len(),
                available: reservation.length(),
            });
        }
        self.commit_element(p, &lp, marker)?;
        self.store_element(p, &lp, reservation)?;
        Ok(lp)
    }

    pub(crate) fn absorb_element(&self, e: usize, into: usize) {
        self.set_state(e, NodeState::Absorbed);
        self.parent.set(e, into);
        self.len.set(e, 0);
    }

    /// Marks variable `v` as eliminated along with pivot `p`.
    pub(crate) fn kill_into(&self, v: usize, p: usize) {
        self.set_state(v, NodeState::Dead);
        self.parent.set(v, p);
        self.len.set(v, 0);
        self.elen.set(v, 0);
        self.append_members(p, v);
    }

    /// Keeps the `E_v` entries that are live elements and satisfy `keep`.
    /// Returns the new `|E_v|`.
    pub(crate) fn retain_elements(&self, v: usize, mut keep: impl FnMut(usize) -> bool) -> usize {
        let h = self.head.get(v);
        let len = self.len.get(v);
        let alen = len - self.elen.get(v);
        let mut w = h + alen;
        for r in h + alen..h + len {
            let e = self.pool.get(r);
            if self.state(e) == NodeState::Element && keep(e) {
                self.pool.set(w, e);
                w += 1;
            }
        }
        self.len.set(v, w - h);
        self.elen.set(v, w - h - alen);
        w - h - alen
    }

    /// Merges variables in `scope` whose `A ∪ E` sets coincide (ignoring each
    /// other). Returns `(merged, representative)` pairs.
    ///
    /// Candidates are bucketed by the sum of their entries, so colliding
    /// buckets are resolved by a full set comparison.
    pub fn merge_indistinguishable(&self, scope: &[usize], marker: &mut Marker) -> Vec<(usize, usize)> {
        let mut keyed: Vec<(u64, usize)> = scope
            .iter()
            .copied()
            .filter(|&v| self.is_variable(v))
            .map(|v| {
                let h = self.head.get(v);
                let sum = self
                    .slice(h, self.len.get(v))
                    .fold(0u64, |acc, x| acc.wrapping_add(x as u64));
                (sum, v)
            })
            .collect();
        keyed.sort_unstable();

        let mut merges = Vec::new();
        let mut start = 0;
        while start < keyed.len() {
            let mut end = start + 1;
            while end < keyed.len() && keyed[end].0 == keyed[start].0 {
                end += 1;
            }
            for a in start..end {
                let i = keyed[a].1;
                if !self.is_variable(i) {
                    continue;
                }
                let mut marked_i = None;
                for &(_, j) in &keyed[a + 1..end] {
                    if !self.is_variable(j) {
                        continue;
                    }
                    let ci = marked_i.get_or_insert_with(|| {
                        marker.advance();
                        let mut count = 0;
                        for x in self.slice(self.head.get(i), self.len.get(i)) {
                            marker.mark(x);
                            count += 1;
                        }
                        count
                    });
                    if self.same_lists(i, *ci, j, marker) {
                        self.fold_into(j, i);
                        merges.push((j, i));
                    }
                }
            }
            start = end;
        }
        merges
    }

    fn same_lists(&self, i: usize, marked_count: usize, j: usize, marker: &Marker) -> bool {
        if self.elen.get(i) != self.elen.get(j) {
            return false;
        }
        let i_has_j = marker.is_marked(j) as usize;
        let mut count_j = 0;
        for x in self.slice(self.head.get(j), self.len.get(j)) {
            if x == i {
                continue;
            }
            if !marker.is_marked(x) {
                return false;
            }
            count_j += 1;
        }
        count_j == marked_count - i_has_j
    }

    fn fold_into(&self, j: usize, i: usize) {
        self.weight.add(i, self.weight(j));
        self.weight.set(j, 0);
        self.set_state(j, NodeState::Merged);
        self.parent.set(j, i);
        // the run stays recorded so the caller can reuse it
        self.append_members(i, j);
    }

    /// Slots below the pool top not owned by any live list.
    pub fn dead_slots(&self) -> usize {
        let live: usize = (0..self.n)
            .filter(|&i| matches!(self.state(i), NodeState::Variable | NodeState::Element))
            .map(|i| self.len.get(i))
            .sum();
        self.pool_top() - live
    }

    /// Slides every live list to the front of the pool. Requires exclusive access.
    pub fn garbage_collect(&mut self) -> usize {
        let mut live: Vec<(usize, usize)> = (0..self.n)
            .filter(|&i| matches!(self.state(i), NodeState::Variable | NodeState::Element))
            .filter(|&i| self.len.get(i) > 0)
            .map(|i| (self.head.get(i), i))
            .collect();
        live.sort_unstable();
        let mut top = 0;
        for (h, i) in live {
            let l = self.len.get(i);
            if h != top {
                for k in 0..l {
                    self.pool.set(top + k, self.pool.get(h + k));
                }
                self.head.set(i, top);
            }
            top += l;
        }
        let before = self.pool_top();
        self.pool_top.store(top, Relaxed);
        self.collections += 1;
        before - top
    }

    /// Extends the pool by `extra` slots. Requires exclusive access.
    pub fn grow_pool(&mut self, extra: usize) -> Result<(), QuotientError> {
        checked_index(self.pool.len() as u128 + extra as u128)?;
        self.pool.grow(extra);
        Ok(())
    }

    /// One line per node, e.g. `1: variable A=[0, 2] E=[4] w=1` or
    /// `4: element L=[1, 3, 5, 7] w=4`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let fmt = |xs: Vec<usize>| {
            let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(", "))
        };
        for i in 0..self.n {
            let st = self.state(i);
            let _ = match st {
                NodeState::Variable => writeln!(
                    s,
                    "{i}: variable A={} E={} w={}",
                    fmt(self.a_list(i)),
                    fmt(self.e_list(i)),
                    self.weight(i)
                ),
                NodeState::Element => writeln!(s, "{i}: element L={} w={}", fmt(self.l_list(i)), self.element_size(i)),
                _ => writeln!(s, "{i}: {} into {}", st.label(), self.parent.get(i)),
            };
        }
        s
    }
}
