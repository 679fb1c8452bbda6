//! Set differences and the three-term degree bound.
//!
//! Sizes are weighted: a supervariable counts as many vertices as it
//! represents, and degrees are external (a variable's own supervariable is
//! left out of its count).

use crate::idx::NONE;
use crate::quotient::{Marker, NodeState, PoolReservation, QuotientGraph};
use crate::result::IntraCounts;

use super::DegreeWorkspace;

/// `|L_e \ L_p|` for every element `e ≠ p` adjacent to a variable of `lp`,
/// in order of first encounter. Advances the workspace clock.
pub fn compute_set_difference_sizes(
    g: &QuotientGraph,
    p: usize,
    lp: &[usize],
    ws: &mut DegreeWorkspace,
) -> Vec<(usize, usize)> {
    let mut touched = Vec::new();
    fill_set_differences(g, p, lp, ws, &mut touched);
    touched
        .iter()
        .map(|&e| (e, ws.get(e).expect("stamped this round")))
        .collect()
}

/// Leaves the differences in `ws`; `touched` receives the distinct elements.
pub(crate) fn fill_set_differences(
    g: &QuotientGraph,
    p: usize,
    lp: &[usize],
    ws: &mut DegreeWorkspace,
    touched: &mut Vec<usize>,
) -> usize {
    ws.advance();
    touched.clear();
    let mut work = 0;
    for &v in lp {
        if !g.is_variable(v) {
            continue;
        }
        let wv = g.weight(v);
        for e in g.e_iter(v) {
            if e == p || g.state(e) != NodeState::Element {
                continue;
            }
            work += 1;
            if ws.touch(e, g.element_size(e), wv) {
                touched.push(e);
            }
        }
    }
    work
}

/// One pivot between its clique being stored and its degree updates.
#[derive(Debug, Clone)]
pub struct PendingPivot {
    pub p: usize,
    pub lp: Vec<usize>,
    /// `|A_v| + Σ_{e ∈ E_v, e ≠ p} |L_e \ L_p|` aligned with `lp`; `NONE` for
    /// variables eliminated together with `p`.
    partial: Vec<usize>,
    pub killed: Vec<usize>,
    /// Runs of nodes absorbed or eliminated so far by this pivot.
    pub released: Vec<PoolReservation>,
    pub intra: IntraCounts,
}

/// The three candidate degrees of one updated variable and the chosen value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeUpdate {
    pub v: usize,
    pub terms: [usize; 3],
    pub degree: usize,
}

#[derive(Debug, Clone, Default)]
pub struct FinishedPivot {
    /// Representatives left in `L_p`; what gets stored for the element.
    pub element: Vec<usize>,
    /// Original vertices eliminated with this pivot, in output order.
    pub chain: Vec<usize>,
    pub updates: Vec<DegreeUpdate>,
    /// `(merged, representative)` pairs formed inside `L_p`.
    pub merges: Vec<(usize, usize)>,
    /// Variables of `L_p` eliminated together with the pivot.
    pub killed: Vec<usize>,
    /// Runs left dead by absorbed elements, eliminated and merged variables.
    /// Only this pivot's owner may reuse them.
    pub released: Vec<PoolReservation>,
    pub intra: IntraCounts,
}

/// First half of the update. Computes the set differences, absorbs elements
/// covered by `L_p` (when `aggressive`), and eliminates variables whose only
/// remaining connection is `p`.
///
/// Writes only to variables of `lp` and elements whose clique lies inside
/// `lp ∪ {p}`.
pub fn scan_pivot(
    g: &QuotientGraph,
    p: usize,
    lp: Vec<usize>,
    ws: &mut DegreeWorkspace,
    touched: &mut Vec<usize>,
    aggressive: bool,
) -> PendingPivot {
    let work = fill_set_differences(g, p, &lp, ws, touched);
    let intra = IntraCounts {
        pivots: 1,
        lp: lp.len(),
        work,
        unique: touched.len(),
    };
    let mut partial = Vec::with_capacity(lp.len());
    let mut killed = Vec::new();
    let mut released = Vec::new();
    for &v in &lp {
        let mut part: usize = g.a_iter(v).filter(|&u| g.is_variable(u)).map(|u| g.weight(u)).sum();
        let elen = g.retain_elements(v, |e| {
            if e == p {
                return true;
            }
            let d = ws.get(e).unwrap_or_else(|| g.element_size(e));
            if d == 0 && aggressive {
                released.push(g.run_of(e));
                g.absorb_element(e, p);
                false
            } else {
                part += d;
                true
            }
        });
        if g.list_lengths(v).0 == 0 && elen == 1 {
            released.push(g.run_of(v));
            g.kill_into(v, p);
            killed.push(v);
            partial.push(NONE);
        } else {
            partial.push(part);
        }
    }
    PendingPivot {
        p,
        lp,
        partial,
        killed,
        released,
        intra,
    }
}

/// Second half of the update: merges indistinguishable variables of `L_p`,
/// then applies
/// `d_v = min(n − k − w_v, d_v + |L_p \ v| − w_p, |A_v| + |L_p \ v| + Σ |L_e \ L_p|)`.
///
/// `k_before` counts vertices eliminated before this pivot.
pub fn finish_pivot(g: &QuotientGraph, pending: PendingPivot, marker: &mut Marker, k_before: usize) -> FinishedPivot {
    let PendingPivot {
        p,
        lp,
        partial,
        killed,
        mut released,
        intra,
    } = pending;
    let survivors: Vec<usize> = lp
        .iter()
        .zip(&partial)
        .filter(|&(_, &part)| part != NONE)
        .map(|(&v, _)| v)
        .collect();
    let merges = g.merge_indistinguishable(&survivors, marker);
    released.extend(merges.iter().map(|&(j, _)| g.run_of(j)));
    let degme: usize = survivors
        .iter()
        .filter(|&&v| g.is_variable(v))
        .map(|&v| g.weight(v))
        .sum();
    let chain = g.members(p);
    let k = k_before + chain.len();
    let n = g.n();
    let wp = g.weight(p);
    let mut updates = Vec::with_capacity(survivors.len());
    for (&v, &part) in lp.iter().zip(&partial) {
        if part == NONE || !g.is_variable(v) {
            continue;
        }
        let wv = g.weight(v);
        let ext = degme - wv;
        let terms = [
            n.saturating_sub(k + wv),
            (g.degree(v) + ext).saturating_sub(wp),
            part + ext,
        ];
        let degree = terms.into_iter().min().expect("three terms");
        g.set_degree(v, degree);
        updates.push(DegreeUpdate { v, terms, degree });
    }
    let element = survivors.into_iter().filter(|&v| g.is_variable(v)).collect();
    FinishedPivot {
        element,
        chain,
        updates,
        merges,
        killed,
        released,
        intra,
    }
}

/// Both halves back to back, for a pivot whose element was just committed.
/// The caller still has to store `element`.
pub fn update_approximate_degrees(
    g: &QuotientGraph,
    p: usize,
    lp: Vec<usize>,
    ws: &mut DegreeWorkspace,
    marker: &mut Marker,
    k_before: usize,
    aggressive: bool,
) -> FinishedPivot {
    let mut touched = Vec::new();
    let pending = scan_pivot(g, p, lp, ws, &mut touched, aggressive);
    finish_pivot(g, pending, marker, k_before)
}

/// Stored degree capped by the remaining vertex count. Variables outside
/// recent cliques keep their old value, which can exceed the cap.
pub fn effective_degree(g: &QuotientGraph, v: usize, eliminated: usize) -> usize {
    g.degree(v).min(g.n().saturating_sub(eliminated + g.weight(v)))
}
