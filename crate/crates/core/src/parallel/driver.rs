use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering::Relaxed};
use std::sync::{Barrier, Mutex};
use std::time::Instant;

use crate::amd::{finish_pivot, scan_pivot, DegreeWorkspace, FinishedPivot, StepObserver, StepView};
use crate::matrix_io::{Permutation, SparsePattern};
use crate::quotient::{FreeRuns, Marker, PoolReservation, QuotientError, QuotientGraph};
use crate::result::{IntraCounts, OrderingError, OrderingResult, PhaseTimes, StepStats};

use super::lists::{AffinityMap, ConcurrentDegreeLists, WorkerLists};
use super::select::{candidate_label, LabelBoard};
use super::ParallelConfig;

/// Multiple-elimination AMD on `cfg.workers` threads.
pub fn parallel_amd(p: &SparsePattern, cfg: &ParallelConfig) -> Result<OrderingResult, OrderingError> {
    parallel_amd_observed(p, cfg, &mut ())
}

/// Like [`parallel_amd`], calling `observer` on the calling thread after
/// every step while the workers wait.
pub fn parallel_amd_observed(
    pattern: &SparsePattern,
    cfg: &ParallelConfig,
    observer: &mut dyn StepObserver,
) -> Result<OrderingResult, OrderingError> {
    cfg.validate(pattern.n())?;
    let n = pattern.n();
    let t0 = Instant::now();
    let g = QuotientGraph::from_pattern(pattern, cfg.augmentation)?;
    let workers = cfg.workers;
    let mut lists = ConcurrentDegreeLists::new(n, workers);
    let (aff, worker_lists) = lists.split_mut();
    let shared = Shared {
        g: &g,
        aff,
        cfg,
        barrier: Barrier::new(workers),
        lamd: (0..workers).map(|_| AtomicUsize::new(n)).collect(),
        board: LabelBoard::new(n),
        winners: (0..workers).map(|_| Mutex::new(Vec::new())).collect(),
        assigned: (0..workers).map(|_| Mutex::new(Vec::new())).collect(),
        output: (0..workers).map(|_| Mutex::new(WorkerOutput::default())).collect(),
        done: AtomicBool::new(n == 0),
        failure: Mutex::new(None),
        step: AtomicUsize::new(0),
        k_start: AtomicUsize::new(0),
        writers: (0..if cfg!(debug_assertions) { n } else { 0 })
            .map(|_| AtomicU64::new(0))
            .collect(),
    };
    let mut driver = Driver {
        observer,
        order: Vec::with_capacity(n),
        steps: Vec::new(),
        trace: Vec::new(),
        times: PhaseTimes::default(),
        intra: IntraCounts::default(),
        pivots: Vec::new(),
        step_start: t0,
        core_start: t0,
    };

    let setup = t0.elapsed().as_secs_f64();
    let (first, rest) = worker_lists.split_first_mut().expect("at least one worker");
    std::thread::scope(|s| {
        for wl in rest.iter_mut() {
            let sh = &shared;
            s.spawn(move || worker_loop(sh, wl, None));
        }
        worker_loop(&shared, first, Some(&mut driver));
    });
    driver.times.preprocess += setup;

    if let Some(e) = shared.failure.into_inner().expect("no worker panicked") {
        return Err(e);
    }
    Ok(OrderingResult {
        permutation: Permutation::from_order(driver.order).expect("every vertex eliminated exactly once"),
        steps: driver.steps,
        phase_times: driver.times,
        peak_pool_usage: g.peak_pool_usage(),
        pool_capacity: g.pool_capacity(),
        garbage_collections: 0,
        fill_edges: None,
        intra: driver.intra,
        trace: driver.trace,
    })
}

struct Shared<'a> {
    g: &'a QuotientGraph,
    aff: &'a AffinityMap,
    cfg: &'a ParallelConfig,
    barrier: Barrier,
    lamd: Vec<AtomicUsize>,
    board: LabelBoard,
    winners: Vec<Mutex<Vec<usize>>>,
    assigned: Vec<Mutex<Vec<usize>>>,
    output: Vec<Mutex<WorkerOutput>>,
    done: AtomicBool,
    failure: Mutex<Option<OrderingError>>,
    step: AtomicUsize,
    k_start: AtomicUsize,
    /// Debug builds only: `(step + 1) << 16 | worker` of the last list
    /// insert of each variable.
    writers: Vec<AtomicU64>,
}

impl Shared<'_> {
    fn fail(&self, e: OrderingError) {
        let mut f = self.failure.lock().expect("failure slot");
        if f.is_none() {
            *f = Some(e);
        }
    }

    fn failed(&self) -> bool {
        self.failure.lock().expect("failure slot").is_some()
    }

    /// Asserts that no other worker inserted `v` during this step.
    fn check_single_owner(&self, v: usize, me: usize) {
        if let Some(w) = self.writers.get(v) {
            let tag = ((self.step.load(Relaxed) as u64 + 1) << 16) | me as u64;
            let prev = w.swap(tag, Relaxed);
            assert!(
                prev >> 16 != tag >> 16 || prev == tag,
                "variable {v} inserted by workers {} and {me} in one step",
                prev & 0xffff
            );
        }
    }
}

#[derive(Default)]
struct WorkerOutput {
    order: Vec<usize>,
    intra: IntraCounts,
}

/// Bookkeeping done by worker 0 between phases.
struct Driver<'o> {
    observer: &'o mut dyn StepObserver,
    order: Vec<usize>,
    steps: Vec<StepStats>,
    trace: Vec<Vec<usize>>,
    times: PhaseTimes,
    intra: IntraCounts,
    pivots: Vec<usize>,
    step_start: Instant,
    core_start: Instant,
}

impl Driver<'_> {
    /// Sorts the winners and hands each worker a contiguous block.
    fn distribute(&mut self, sh: &Shared<'_>) {
        let mut d: Vec<usize> = Vec::new();
        for w in &sh.winners {
            d.append(&mut w.lock().expect("winner slot"));
        }
        d.sort_unstable();
        let workers = sh.assigned.len();
        let chunk = d.len().div_ceil(workers).max(1);
        for (t, slot) in sh.assigned.iter().enumerate() {
            let lo = (t * chunk).min(d.len());
            let hi = ((t + 1) * chunk).min(d.len());
            *slot.lock().expect("assignment slot") = d[lo..hi].to_vec();
        }
        self.pivots = d;
        self.core_start = Instant::now();
        self.times.selection += (self.core_start - self.step_start).as_secs_f64();
    }

    /// Emits the step in worker order, which is ascending pivot order.
    fn finish_step(&mut self, sh: &Shared<'_>) {
        let start = self.order.len();
        for o in &sh.output {
            let mut o = o.lock().expect("output slot");
            self.order.append(&mut o.order);
            self.intra.add(&o.intra);
            o.intra = IntraCounts::default();
        }
        let now = Instant::now();
        self.times.core += (now - self.core_start).as_secs_f64();
        let eliminated = self.order.len() - start;
        self.steps.push(StepStats {
            pivots: self.pivots.len(),
            eliminated,
            seconds: (now - self.step_start).as_secs_f64(),
        });
        sh.k_start.store(self.order.len(), Relaxed);
        sh.step.fetch_add(1, Relaxed);
        if !sh.failed() {
            self.observer.on_step(&StepView {
                graph: sh.g,
                pivots: &self.pivots,
                eliminated: &self.order[start..],
                k: self.order.len(),
            });
        }
        self.trace.push(std::mem::take(&mut self.pivots));
    }
}

fn worker_loop(sh: &Shared<'_>, wl: &mut WorkerLists, mut driver: Option<&mut Driver<'_>>) {
    let g = sh.g;
    let n = g.n();
    let me = wl.tid();
    let workers = sh.lamd.len();
    let lim = sh.cfg.lim();

    let (lo, hi) = (me * n / workers, (me + 1) * n / workers);
    for v in lo..hi {
        wl.insert(sh.aff, v, g.degree(v));
    }

    let mut ws = DegreeWorkspace::new(n);
    let mut marker = Marker::new(n);
    let mut touched = Vec::new();
    let mut scratch = Vec::new();
    let mut cands = Vec::new();
    let mut lp = Vec::new();
    let mut free = FreeRuns::new();

    loop {
        sh.lamd[me].store(wl.lamd(sh.aff), Relaxed);
        if let Some(d) = driver.as_deref_mut() {
            d.step_start = Instant::now();
            if d.order.len() == n || sh.failed() {
                sh.done.store(true, Relaxed);
            }
        }
        sh.barrier.wait();
        if sh.done.load(Relaxed) {
            break;
        }

        // candidates and labels
        let amd = sh.lamd.iter().map(|l| l.load(Relaxed)).min().unwrap_or(n);
        let top = ((sh.cfg.mult * amd as f64).floor() as usize).max(amd);
        wl.gather(sh.aff, amd, top, lim, &mut cands);
        for u in touched.drain(..) {
            sh.board.reset(u);
        }
        sh.barrier.wait();
        let step = sh.step.load(Relaxed) as u64;
        for &v in &cands {
            sh.board.push(g, v, candidate_label(sh.cfg.seed, step, v), &mut touched);
        }
        sh.barrier.wait();
        let wins: Vec<usize> = cands
            .iter()
            .copied()
            .filter(|&v| sh.board.holds(g, v, candidate_label(sh.cfg.seed, step, v)))
            .collect();
        *sh.winners[me].lock().expect("winner slot") = wins;
        sh.barrier.wait();
        if let Some(d) = driver.as_deref_mut() {
            d.distribute(sh);
        }
        sh.barrier.wait();

        // first half: cliques, connection updates, absorption, mass elimination
        let mine = std::mem::take(&mut *sh.assigned[me].lock().expect("assignment slot"));
        let mut pending = Vec::with_capacity(mine.len());
        for p in mine {
            sh.aff.remove(p);
            let committed = g
                .collect_element(p, &mut marker, &mut lp)
                .and_then(|_| g.commit_element(p, &lp, &mut marker));
            match committed {
                Ok(freed) => {
                    let pend = scan_pivot(
                        g,
                        p,
                        std::mem::take(&mut lp),
                        &mut ws,
                        &mut scratch,
                        sh.cfg.aggressive_absorption,
                    );
                    pending.push((pend, freed));
                }
                Err(e) => sh.fail(e.into()),
            }
        }
        sh.barrier.wait();

        // second half: merging, degrees, storage, list updates
        let k0 = sh.k_start.load(Relaxed);
        let mut out = WorkerOutput::default();
        let mut finished: Vec<(FinishedPivot, Vec<PoolReservation>)> = Vec::with_capacity(pending.len());
        for (pend, freed) in pending {
            let done = finish_pivot(g, pend, &mut marker, k0 + out.order.len());
            out.order.extend_from_slice(&done.chain);
            out.intra.add(&done.intra);
            finished.push((done, freed));
        }
        if let Err(e) = store_elements(g, &mut free, finished.as_mut_slice()) {
            sh.fail(match e {
                QuotientError::PoolExhausted { requested, available } => OrderingError::PoolExhausted {
                    requested,
                    available,
                    augmentation: sh.cfg.augmentation,
                },
                other => other.into(),
            });
        }
        for (done, _) in &finished {
            for &v in &done.killed {
                sh.aff.remove(v);
            }
            for &(j, _) in &done.merges {
                sh.aff.remove(j);
            }
            for u in &done.updates {
                sh.check_single_owner(u.v, me);
                wl.insert(sh.aff, u.v, u.degree);
            }
        }
        *sh.output[me].lock().expect("output slot") = out;
        sh.barrier.wait();
        if let Some(d) = driver.as_deref_mut() {
            d.finish_step(sh);
        }
    }
}

/// Stores this worker's cliques in runs it freed, the rest in a single
/// fresh reservation.
fn store_elements(
    g: &QuotientGraph,
    free: &mut FreeRuns,
    finished: &mut [(FinishedPivot, Vec<PoolReservation>)],
) -> Result<(), QuotientError> {
    for (done, freed) in finished.iter_mut() {
        for r in freed.drain(..).chain(done.released.drain(..)) {
            free.release(r);
        }
    }
    let slots: Vec<Option<PoolReservation>> = finished.iter().map(|(done, _)| free.take(done.element.len())).collect();
    let need: usize = finished
        .iter()
        .zip(&slots)
        .filter(|(_, s)| s.is_none())
        .map(|((done, _), _)| done.element.len())
        .sum();
    let mut fresh = if need > 0 { Some(g.reserve_pool(need)?) } else { None };
    for ((done, _), slot) in finished.iter().zip(slots) {
        let p = *done.chain.first().expect("chain starts with the pivot");
        match slot {
            Some(mut r) => g.store_element(p, &done.element, &mut r)?,
            None => g.store_element(p, &done.element, fresh.as_mut().expect("reserved above"))?,
        }
    }
    Ok(())
}
