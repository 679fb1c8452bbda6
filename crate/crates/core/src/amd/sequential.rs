use std::time::Instant;

use crate::matrix_io::{Permutation, SparsePattern};
use crate::quotient::{FreeRuns, Marker, PoolReservation, QuotientError, QuotientGraph};
use crate::result::{IntraCounts, OrderingError, OrderingResult, PhaseTimes, StepStats};

use super::{update_approximate_degrees, AmdOptions, DegreeWorkspace, SequentialDegreeLists, StepObserver, StepView};

/// Classic AMD: one minimum-degree pivot per step, lowest index on ties.
pub fn sequential_amd(p: &SparsePattern, opts: &AmdOptions) -> Result<OrderingResult, OrderingError> {
    sequential_amd_observed(p, opts, &mut ())
}

pub fn sequential_amd_observed(
    pattern: &SparsePattern,
    opts: &AmdOptions,
    observer: &mut dyn StepObserver,
) -> Result<OrderingResult, OrderingError> {
    let n = pattern.n();
    let t0 = Instant::now();
    let mut g = QuotientGraph::from_pattern(pattern, opts.augmentation)?;
    let mut lists = SequentialDegreeLists::new(n);
    for v in 0..n {
        lists.insert(v, g.degree(v));
    }
    let mut times = PhaseTimes {
        preprocess: t0.elapsed().as_secs_f64(),
        ..PhaseTimes::default()
    };

    let mut ws = DegreeWorkspace::new(n);
    let mut marker = Marker::new(n);
    let mut order = Vec::with_capacity(n);
    let mut steps = Vec::new();
    let mut trace = Vec::new();
    let mut intra = IntraCounts::default();
    let mut lp = Vec::new();
    let mut free = FreeRuns::new();

    loop {
        let ts = Instant::now();
        let Some((p, _)) = lists.pop_min() else { break };
        let tc = Instant::now();
        times.selection += (tc - ts).as_secs_f64();

        g.collect_element(p, &mut marker, &mut lp)?;
        let freed = g.commit_element(p, &lp, &mut marker)?;
        let done = update_approximate_degrees(
            &g,
            p,
            std::mem::take(&mut lp),
            &mut ws,
            &mut marker,
            order.len(),
            opts.aggressive_absorption,
        );
        for r in freed.into_iter().chain(done.released.iter().copied()) {
            free.release(r);
        }
        let mut res = match free.take(done.element.len()) {
            Some(r) => r,
            None => reserve_with_collection(&mut g, &mut free, done.element.len())?,
        };
        g.store_element(p, &done.element, &mut res)?;
        for &v in &done.killed {
            lists.remove(v);
        }
        for &(j, _) in &done.merges {
            lists.remove(j);
        }
        for u in &done.updates {
            lists.insert(u.v, u.degree);
        }
        let start = order.len();
        order.extend_from_slice(&done.chain);
        intra.add(&done.intra);
        let secs = tc.elapsed().as_secs_f64();
        times.core += secs;
        steps.push(StepStats {
            pivots: 1,
            eliminated: done.chain.len(),
            seconds: (ts.elapsed()).as_secs_f64(),
        });
        trace.push(vec![p]);
        observer.on_step(&StepView {
            graph: &g,
            pivots: &[p],
            eliminated: &order[start..],
            k: order.len(),
        });
    }

    Ok(OrderingResult {
        permutation: Permutation::from_order(order).expect("every vertex eliminated exactly once"),
        steps,
        phase_times: times,
        peak_pool_usage: g.peak_pool_usage(),
        pool_capacity: g.pool_capacity(),
        garbage_collections: g.garbage_collections(),
        fill_edges: None,
        intra,
        trace,
    })
}

/// Claims new space, compacting and then growing the pool if needed.
/// Compaction moves runs, so it also forgets the free ones.
fn reserve_with_collection(
    g: &mut QuotientGraph,
    free: &mut FreeRuns,
    len: usize,
) -> Result<PoolReservation, QuotientError> {
    match g.reserve_pool(len) {
        Err(QuotientError::PoolExhausted { .. }) => {}
        other => return other,
    }
    g.garbage_collect();
    free.clear();
    match g.reserve_pool(len) {
        Err(QuotientError::PoolExhausted { .. }) => {}
        other => return other,
    }
    let extra = len.max(g.pool_capacity() / 2);
    g.grow_pool(extra)?;
    g.reserve_pool(len)
}
