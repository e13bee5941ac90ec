//! Exponential-time ground truth.
//!
//! Everything here is enumeration against the bare definitions. Outputs
//! are canonical (size-ascending, then lexicographic by member ids) so
//! independent implementations can be compared byte for byte.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::instance::{verify_cut, CutSet, Instance, Variant};

/// Minimum-size cut of size at most `inst.budget`, or `None`. Intended for
/// small graphs (|E| around 25, or small budgets).
pub fn brute_force_solve(inst: &Instance) -> Option<CutSet> {
    match inst.variant {
        Variant::Edge => {
            let universe: Vec<EdgeId> = inst.graph.edge_ids().collect();
            for size in 0..=inst.budget.min(universe.len()) {
                for combo in universe.iter().combinations(size) {
                    let cut = CutSet::Edges(combo.into_iter().copied().collect());
                    if verify_cut(inst, &cut).unwrap() {
                        return Some(cut);
                    }
                }
            }
            None
        }
        Variant::Node | Variant::RNode => {
            let terminals = inst.terminals();
            let universe: Vec<NodeId> = inst
                .graph
                .nodes()
                .filter(|v| inst.variant == Variant::Node || !terminals.contains(v))
                .collect();
            for size in 0..=inst.budget.min(universe.len()) {
                for combo in universe.iter().combinations(size) {
                    let cut = CutSet::Nodes(combo.into_iter().copied().collect());
                    if verify_cut(inst, &cut).unwrap() {
                        return Some(cut);
                    }
                }
            }
            None
        }
    }
}

/// Side of `y` and its complement after deleting the edge set `s`.
pub fn reach_split(g: &MultiGraph, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
    let r = g.reachable(y, s);
    let far = g.nodes().filter(|v| !r.contains(v)).collect();
    (r, far)
}

fn is_minimal_for_reach(g: &MultiGraph, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    let (r, _) = reach_split(g, y, s);
    for e in s {
        let mut smaller = s.clone();
        smaller.remove(e);
        if reach_split(g, y, &smaller).0 == r {
            return false;
        }
    }
    true
}

/// Definitional check: `s` is inclusion-wise minimal and no equal-or-smaller
/// edge set has a strictly smaller `y`-side.
pub fn check_closest(g: &MultiGraph, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    if !is_minimal_for_reach(g, y, s) {
        return false;
    }
    let (r, _) = reach_split(g, y, s);
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    for size in 0..=s.len() {
        for combo in edges.iter().combinations(size) {
            let other: BTreeSet<EdgeId> = combo.into_iter().copied().collect();
            let (r2, _) = reach_split(g, y, &other);
            if r2.is_subset(&r) && r2 != r {
                return false;
            }
        }
    }
    true
}

/// All `y`-closest cuts of size at most `limit`, by double enumeration over
/// edge subsets. The empty set qualifies on a connected graph.
pub fn enumerate_closest_cuts(g: &MultiGraph, y: &BTreeSet<NodeId>, limit: usize) -> Vec<BTreeSet<EdgeId>> {
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let mut out = Vec::new();
    for size in 0..=limit.min(edges.len()) {
        for combo in edges.iter().combinations(size) {
            let s: BTreeSet<EdgeId> = combo.into_iter().copied().collect();
            if check_closest(g, y, &s) {
                out.push(s);
            }
        }
    }
    out
}

/// Definitional check: `s` is an inclusion-wise minimal X-Y edge separator
/// and no equal-or-smaller separator has a strictly larger X-side.
pub fn check_important(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    if !is_edge_separator(g, x, y, s) || !is_minimal_separator(g, x, y, s) {
        return false;
    }
    let rx = g.reachable(x, s);
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    for size in 0..=s.len() {
        for combo in edges.iter().combinations(size) {
            let other: BTreeSet<EdgeId> = combo.into_iter().copied().collect();
            if !is_edge_separator(g, x, y, &other) {
                continue;
            }
            let rx2 = g.reachable(x, &other);
            if rx.is_subset(&rx2) && rx != rx2 {
                return false;
            }
        }
    }
    true
}

pub fn is_edge_separator(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    let r = g.reachable(x, s);
    y.iter().all(|v| !r.contains(v))
}

pub fn is_minimal_separator(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<EdgeId>) -> bool {
    for e in s {
        let mut smaller = s.clone();
        smaller.remove(e);
        if is_edge_separator(g, x, y, &smaller) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------
// Node-deletion analogues. Deleted nodes block reachability entirely;
// separators must avoid X and Y. Used to reproduce the counterexample
// showing that closest node cuts do not decompose into disjoint important
// node separators, unlike the edge case.

fn node_reach(g: &MultiGraph, from: &BTreeSet<NodeId>, deleted: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    g.delete_nodes(deleted)
        .reachable(&from.difference(deleted).copied().collect(), &BTreeSet::new())
}

pub fn is_node_separator(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<NodeId>) -> bool {
    if x.iter().any(|v| s.contains(v)) || y.iter().any(|v| s.contains(v)) {
        return false;
    }
    let r = node_reach(g, x, s);
    y.iter().all(|v| !r.contains(v))
}

fn is_minimal_node_separator(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<NodeId>) -> bool {
    is_node_separator(g, x, y, s)
        && s.iter().all(|v| {
            let mut smaller = s.clone();
            smaller.remove(v);
            !is_node_separator(g, x, y, &smaller)
        })
}

pub fn check_important_node(g: &MultiGraph, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, s: &BTreeSet<NodeId>) -> bool {
    if !is_minimal_node_separator(g, x, y, s) {
        return false;
    }
    let rx = node_reach(g, x, s);
    let candidates: Vec<NodeId> = g.nodes().filter(|v| !x.contains(v) && !y.contains(v)).collect();
    for size in 0..=s.len() {
        for combo in candidates.iter().combinations(size) {
            let other: BTreeSet<NodeId> = combo.into_iter().copied().collect();
            if !is_node_separator(g, x, y, &other) {
                continue;
            }
            let rx2 = node_reach(g, x, &other);
            if rx.is_subset(&rx2) && rx != rx2 {
                return false;
            }
        }
    }
    true
}

pub fn check_closest_node(g: &MultiGraph, y: &BTreeSet<NodeId>, s: &BTreeSet<NodeId>) -> bool {
    if s.iter().any(|v| y.contains(v)) {
        return false;
    }
    let r = node_reach(g, y, s);
    // inclusion-wise minimal for the reachable set
    for v in s {
        let mut smaller = s.clone();
        smaller.remove(v);
        if node_reach(g, y, &smaller) == r {
            return false;
        }
    }
    let candidates: Vec<NodeId> = g.nodes().filter(|v| !y.contains(v)).collect();
    for size in 0..=s.len() {
        for combo in candidates.iter().combinations(size) {
            let other: BTreeSet<NodeId> = combo.into_iter().copied().collect();
            let r2 = node_reach(g, y, &other);
            if r2.is_subset(&r) && r2 != r {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{set_is_cut, Instance};

    fn star(leaves: u32) -> (MultiGraph, NodeId) {
        let mut g = MultiGraph::with_node_ids((1..=leaves + 1).map(NodeId));
        let center = NodeId(1);
        for leaf in 2..=leaves + 1 {
            g.add_edge(center, NodeId(leaf));
        }
        (g, center)
    }

    #[test]
    fn brute_force_path_lexicographic_tie_break() {
        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        let ab = g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        let inst = Instance::new(g, Variant::Edge, vec![BTreeSet::from([NodeId(1), NodeId(3)])], 1).unwrap();
        assert_eq!(brute_force_solve(&inst), Some(CutSet::Edges(BTreeSet::from([ab]))));
    }

    #[test]
    fn brute_force_three_disjoint_demands_need_three_edges() {
        let (g, center) = star(3);
        let sets = (2..=4)
            .map(|leaf| BTreeSet::from([NodeId(leaf), center]))
            .collect();
        let inst = Instance::new(g, Variant::Edge, sets, 2).unwrap();
        assert_eq!(brute_force_solve(&inst), None);
    }

    #[test]
    fn star_closest_cut_counts_are_binomial() {
        for n in 1..=6u32 {
            let (g, center) = star(n);
            let y = BTreeSet::from([center]);
            let cuts = enumerate_closest_cuts(&g, &y, n as usize);
            for l in 0..=n as usize {
                let count = cuts.iter().filter(|c| c.len() == l).count();
                let binom = (0..l).fold(1usize, |acc, i| acc * (n as usize - i) / (i + 1));
                assert_eq!(count, binom, "star n={n} l={l}");
            }
        }
    }

    #[test]
    fn single_edge_closest_cut() {
        let mut g = MultiGraph::with_node_ids([NodeId(1), NodeId(2)]);
        let e = g.add_edge(NodeId(1), NodeId(2));
        let cuts = enumerate_closest_cuts(&g, &BTreeSet::from([NodeId(1)]), 1);
        assert!(cuts.contains(&BTreeSet::from([e])));
    }

    #[test]
    fn path_first_edge_is_closest_second_is_not() {
        // y - a - b
        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        let ya = g.add_edge(NodeId(1), NodeId(2));
        let ab = g.add_edge(NodeId(2), NodeId(3));
        let y = BTreeSet::from([NodeId(1)]);
        assert!(check_closest(&g, &y, &BTreeSet::from([ya])));
        assert!(!check_closest(&g, &y, &BTreeSet::from([ab])));
    }

    #[test]
    fn diamond_importance() {
        let mut g = MultiGraph::with_node_ids((1..=4).map(NodeId));
        let xu = g.add_edge(NodeId(1), NodeId(2));
        let xv = g.add_edge(NodeId(1), NodeId(3));
        let uy = g.add_edge(NodeId(2), NodeId(4));
        let vy = g.add_edge(NodeId(3), NodeId(4));
        let x = BTreeSet::from([NodeId(1)]);
        let y = BTreeSet::from([NodeId(4)]);
        assert!(check_important(&g, &x, &y, &BTreeSet::from([uy, vy])));
        assert!(!check_important(&g, &x, &y, &BTreeSet::from([xu, xv])));
    }

    #[test]
    fn single_edge_is_important() {
        let mut g = MultiGraph::with_node_ids([NodeId(1), NodeId(2)]);
        let e = g.add_edge(NodeId(1), NodeId(2));
        assert!(check_important(
            &g,
            &BTreeSet::from([NodeId(1)]),
            &BTreeSet::from([NodeId(2)]),
            &BTreeSet::from([e])
        ));
    }

    #[test]
    fn fan_node_cut_is_closest_but_members_are_important_unions_only() {
        let (g, y, s, v) = crate::instance::tests::fan_graph();
        let ys = BTreeSet::from([y]);
        let cut = BTreeSet::from([s[0], s[1], s[2]]);
        assert!(check_closest_node(&g, &ys, &cut));
        assert!(check_important_node(
            &g,
            &BTreeSet::from([v[0]]),
            &ys,
            &BTreeSet::from([s[0], s[1]])
        ));
        assert!(check_important_node(
            &g,
            &BTreeSet::from([v[1]]),
            &ys,
            &BTreeSet::from([s[1], s[2]])
        ));
    }

    #[test]
    fn every_important_separator_is_minimal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.gen_range(3..=7u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            let x = BTreeSet::from([NodeId(1)]);
            let y = BTreeSet::from([NodeId(n)]);
            let edges: Vec<EdgeId> = g.edge_ids().collect();
            for size in 0..=2usize.min(edges.len()) {
                for combo in edges.iter().combinations(size) {
                    let s: BTreeSet<EdgeId> = combo.into_iter().copied().collect();
                    if check_important(&g, &x, &y, &s) {
                        assert!(is_minimal_separator(&g, &x, &y, &s));
                    }
                }
            }
        }
    }

    #[test]
    fn node_variant_feasible_whenever_budget_covers_sets() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let n = rng.gen_range(3..=7u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            let nodes: Vec<NodeId> = g.nodes().collect();
            let t = rng.gen_range(1..=3usize);
            let sets: Vec<BTreeSet<NodeId>> = (0..t)
                .map(|_| nodes.choose_multiple(&mut rng, 2).copied().collect())
                .filter(|s: &BTreeSet<NodeId>| s.len() == 2)
                .collect();
            if sets.is_empty() {
                continue;
            }
            let inst = Instance::new(g, Variant::Node, sets.clone(), sets.len()).unwrap();
            assert!(brute_force_solve(&inst).is_some());
        }
    }

    #[test]
    fn set_is_cut_handles_deleted_terminals() {
        let mut g = MultiGraph::with_node_ids((1..=2).map(NodeId));
        g.add_edge(NodeId(1), NodeId(2));
        let set = BTreeSet::from([NodeId(1), NodeId(2)]);
        assert!(set_is_cut(&g, &set, &CutSet::Nodes(BTreeSet::from([NodeId(1)]))));
        assert!(!set_is_cut(&g, &set, &CutSet::Nodes(BTreeSet::new())));
    }
}
