//! Important X-Y edge separators and the structure of closest cuts.
//!
//! Enumeration follows the standard farthest-min-cut branching: compute the
//! minimum cut whose X-side is maximal, then branch on its lowest-id edge
//! being inside or outside the separator. Candidates are deduplicated and
//! filtered down to the important ones by pairwise domination, which is
//! sound because the candidate list contains every important separator.

use std::collections::BTreeSet;

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::SmcError;

/// An important separator together with the set reachable from its source
/// side once the separator is removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorRecord {
    pub edges: BTreeSet<EdgeId>,
    pub reachable: BTreeSet<NodeId>,
}

impl SeparatorRecord {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

/// Nodes reachable from `y` avoiding `s`, and the rest.
pub fn reachable_set(g: &MultiGraph, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
    let r = g.reachable(y, s);
    let far = g.nodes().filter(|v| !r.contains(v)).collect();
    (r, far)
}

/// All important X-Y separators with at most `limit` edges. Their number
/// is at most 4^limit.
pub fn enumerate_important_separators(
    g: &MultiGraph,
    x: &BTreeSet<NodeId>,
    y: &BTreeSet<NodeId>,
    limit: usize,
) -> Vec<SeparatorRecord> {
    if x.is_empty() || y.is_empty() || !x.is_disjoint(y) {
        return Vec::new();
    }
    let mut candidates: BTreeSet<BTreeSet<EdgeId>> = BTreeSet::new();
    collect_candidates(g, x.clone(), y, limit, &BTreeSet::new(), &mut candidates);

    // Keep minimal separators only, then drop dominated ones.
    let mut scored: Vec<(BTreeSet<EdgeId>, BTreeSet<NodeId>)> = candidates
        .into_iter()
        .filter(|s| s.len() <= limit && is_minimal(g, x, y, s))
        .map(|s| {
            let r = g.reachable(x, &s);
            (s, r)
        })
        .collect();
    scored.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    let mut out = Vec::new();
    for i in 0..scored.len() {
        let (s, r) = &scored[i];
        let dominated = scored.iter().any(|(s2, r2)| {
            s2 != s && s2.len() <= s.len() && r.is_subset(r2) && r != r2
        });
        if !dominated {
            out.push(SeparatorRecord {
                edges: s.clone(),
                reachable: r.clone(),
            });
        }
    }
    out
}

fn collect_candidates(
    g: &MultiGraph,
    x: BTreeSet<NodeId>,
    y: &BTreeSet<NodeId>,
    limit: usize,
    removed: &BTreeSet<EdgeId>,
    out: &mut BTreeSet<BTreeSet<EdgeId>>,
) {
    if !x.is_disjoint(y) {
        return;
    }
    let (value, far_side) = g.farthest_min_cut_side(&x, y);
    if value > limit {
        return;
    }
    let cut = g.boundary_edges(&far_side);
    let mut candidate = removed.clone();
    candidate.extend(cut.iter().copied());
    out.insert(candidate);
    if cut.is_empty() {
        return;
    }
    let e = *cut.iter().next().unwrap();
    let (u, v) = g.endpoints(e);
    let outside = if far_side.contains(&u) { v } else { u };

    // e in the separator: delete it and spend one unit.
    if limit >= 1 {
        let mut removed2 = removed.clone();
        removed2.insert(e);
        collect_candidates(
            &g.delete_edges(&BTreeSet::from([e])),
            x.clone(),
            y,
            limit - 1,
            &removed2,
            out,
        );
    }
    // e not in the separator: its far endpoint joins the source side.
    let mut x2 = x;
    x2.extend(far_side.iter().copied());
    x2.insert(outside);
    collect_candidates(g, x2, y, limit, removed, out);
}

fn is_minimal(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    let r = g.reachable(x, s);
    if y.iter().any(|v| r.contains(v)) {
        return false;
    }
    for e in s {
        let mut smaller = s.clone();
        smaller.remove(e);
        let r2 = g.reachable(x, &smaller);
        if y.iter().all(|v| !r2.contains(v)) {
            return false;
        }
    }
    true
}

/// Union of all edges on some minimal x-y cut of size at most `k`, over all
/// pairs from `y`.
pub fn compute_z(g: &MultiGraph, y: &BTreeSet<NodeId>, k: usize) -> Result<BTreeSet<EdgeId>, SmcError> {
    if y.len() < 2 {
        return Err(SmcError::InvalidArgument("compute_z needs at least two nodes".into()));
    }
    let nodes: Vec<NodeId> = y.iter().copied().collect();
    let mut out = BTreeSet::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            for cut in g.enumerate_minimal_cuts(nodes[i], nodes[j], k)? {
                out.extend(cut);
            }
        }
    }
    Ok(out)
}

/// Splits a Y-closest cut into records, one per component of the far side:
/// the record's edges join that component to the Y-side and form an
/// important separator from any of the component's nodes to Y. The edge
/// sets are pairwise disjoint and union to `s`; the far sides partition
/// the far side of `s`.
pub fn decompose_closest_cut(
    g: &MultiGraph,
    y: &BTreeSet<NodeId>,
    s: &BTreeSet<EdgeId>,
) -> Result<Vec<SeparatorRecord>, SmcError> {
    let (r, _) = reachable_set(g, y, s);
    for e in s {
        let (u, v) = g.endpoints(*e);
        if r.contains(&u) == r.contains(&v) {
            return Err(SmcError::Precondition(format!(
                "cut edge {e} does not cross between the Y-side and its complement"
            )));
        }
    }
    let far: BTreeSet<NodeId> = g.nodes().filter(|v| !r.contains(v)).collect();
    let far_components = g.induced(&far).components();
    let mut out = Vec::new();
    for comp in far_components.blocks {
        let edges: BTreeSet<EdgeId> = s
            .iter()
            .filter(|e| {
                let (u, v) = g.endpoints(**e);
                comp.contains(&u) || comp.contains(&v)
            })
            .copied()
            .collect();
        out.push(SeparatorRecord {
            edges,
            reachable: comp,
        });
    }
    Ok(out)
}
