//! Edge Steiner multicut solver parameterized by cut size and number of
//! terminal sets, built from important separators.
//!
//! The instance is reduced to the case where a small node set Y hits every
//! terminal set (pick one terminal per set). A minimal cut then splits into
//! a part inside the union Z of small minimal cuts between Y-pairs and a
//! part that leaves Y connected; the second part is found by a subset DP
//! over important separators towards a single hub node, the first by
//! searching inside Z. Branching over the split and the budget division
//! ties it together.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::instance::{set_is_cut, verify_cut, CutSet, Instance, Variant};
use crate::separators::{enumerate_important_separators, reachable_set, SeparatorRecord};
use crate::twdp;
use crate::SmcError;

/// Bitmask of the terminal sets cut by a separator: bit i is set when some
/// terminal of set i ends up outside the hub side.
pub fn separator_type(
    g: &MultiGraph,
    hub: NodeId,
    sep: &SeparatorRecord,
    terminal_sets: &[BTreeSet<NodeId>],
) -> u32 {
    let (_, far) = reachable_set(g, &BTreeSet::from([hub]), &sep.edges);
    let mut mask = 0u32;
    for (i, set) in terminal_sets.iter().enumerate() {
        if set.iter().any(|v| far.contains(v)) {
            mask |= 1 << i;
        }
    }
    mask
}

/// Minimum edge multicut of size at most `k` for terminal sets that all
/// contain `hub`, via a subset DP over important separators from every
/// other node towards the hub.
pub fn solve_unipedal(
    g: &MultiGraph,
    hub: NodeId,
    terminal_sets: &[BTreeSet<NodeId>],
    k: usize,
) -> Result<Option<BTreeSet<EdgeId>>, SmcError> {
    for set in terminal_sets {
        if !set.contains(&hub) {
            return Err(SmcError::InvalidArgument(
                "solve_unipedal: the hub must belong to every terminal set".into(),
            ));
        }
    }
    if !g.is_connected() {
        return Err(SmcError::InvalidArgument("solve_unipedal: graph must be connected".into()));
    }
    let t = terminal_sets.len();
    let full: u32 = if t == 32 { u32::MAX } else { (1 << t) - 1 };
    let hub_set = BTreeSet::from([hub]);

    let mut pool: BTreeMap<BTreeSet<EdgeId>, u32> = BTreeMap::new();
    for x in g.nodes() {
        if x == hub {
            continue;
        }
        for sep in enumerate_important_separators(g, &BTreeSet::from([x]), &hub_set, k) {
            let mask = separator_type(g, hub, &sep, terminal_sets);
            pool.entry(sep.edges).or_insert(mask);
        }
    }

    let size = 1usize << t;
    let mut cost = vec![usize::MAX; size];
    let mut witness: Vec<Option<(u32, BTreeSet<EdgeId>)>> = vec![None; size];
    cost[0] = 0;
    for (edges, mask) in &pool {
        let prev_cost = cost.clone();
        for i in 0..size as u32 {
            if prev_cost[i as usize] == usize::MAX {
                continue;
            }
            let j = (i | mask) as usize;
            let c = prev_cost[i as usize] + edges.len();
            if c < cost[j] {
                cost[j] = c;
                witness[j] = Some((i, edges.clone()));
            }
        }
    }
    if cost[full as usize] > k {
        return Ok(None);
    }
    let mut cut = BTreeSet::new();
    let mut at = full;
    while at != 0 {
        let (prev, edges) = witness[at as usize].clone().expect("reachable DP state has a witness");
        cut.extend(edges);
        at = prev;
    }
    Ok(Some(normalize_cut(g, terminal_sets, cut)))
}

/// Drops edges whose removal from the cut keeps every terminal set cut.
fn normalize_cut(g: &MultiGraph, terminal_sets: &[BTreeSet<NodeId>], cut: BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
    let mut cur = cut;
    loop {
        let mut dropped = None;
        for e in cur.iter().rev() {
            let mut smaller = cur.clone();
            smaller.remove(e);
            let as_cut = CutSet::Edges(smaller.clone());
            if terminal_sets.iter().all(|set| set_is_cut(g, set, &as_cut)) {
                dropped = Some(smaller);
                break;
            }
        }
        match dropped {
            Some(next) => cur = next,
            None => return cur,
        }
    }
}

/// Adds a hub node joined to every node of `y` by k+1 parallel edges; no
/// cut of size at most k can separate the hub from `y`.
pub fn build_gstar(g: &MultiGraph, y: &BTreeSet<NodeId>, k: usize) -> (MultiGraph, NodeId) {
    let mut g2 = g.clone();
    let hub = g2.add_node();
    for v in y {
        for _ in 0..=k {
            g2.add_edge(hub, *v);
        }
    }
    (g2, hub)
}

/// Terminal rewrite that goes with [`build_gstar`].
pub fn rewrite_terminals_for_hub(set: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>, hub: NodeId) -> BTreeSet<NodeId> {
    let mut out: BTreeSet<NodeId> = set.difference(y).copied().collect();
    out.insert(hub);
    out
}

/// Incidence expansion of a graph: one node per original node and per
/// original edge. Edge nodes are adjacent when the edges share exactly one
/// endpoint, and to their own endpoints.
pub struct LineExpansion {
    pub graph: MultiGraph,
    pub node_image: BTreeMap<NodeId, NodeId>,
    pub edge_image: BTreeMap<EdgeId, NodeId>,
}

pub fn line_expansion(g: &MultiGraph) -> LineExpansion {
    let mut h = MultiGraph::new();
    let mut node_image = BTreeMap::new();
    let mut edge_image = BTreeMap::new();
    for v in g.nodes() {
        node_image.insert(v, h.add_node());
    }
    for e in g.edge_ids() {
        edge_image.insert(e, h.add_node());
    }
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    for (i, &e) in edges.iter().enumerate() {
        let (u, v) = g.endpoints(e);
        let eset = BTreeSet::from([u, v]);
        h.add_edge(edge_image[&e], node_image[&u]);
        if v != u {
            h.add_edge(edge_image[&e], node_image[&v]);
        }
        for &f in &edges[i + 1..] {
            let (a, b) = g.endpoints(f);
            let fset = BTreeSet::from([a, b]);
            if eset.intersection(&fset).count() == 1 {
                h.add_edge(edge_image[&e], edge_image[&f]);
            }
        }
    }
    LineExpansion {
        graph: h,
        node_image,
        edge_image,
    }
}

/// Graph on `u` where two nodes are adjacent iff some path between them is
/// internally disjoint from `u`. Simple graph; node ids are preserved.
pub fn build_torso(h: &MultiGraph, u: &BTreeSet<NodeId>) -> MultiGraph {
    let mut t = MultiGraph::with_node_ids(u.iter().copied());
    let mut pairs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for e in h.edge_ids() {
        let (a, b) = h.endpoints(e);
        if a != b && u.contains(&a) && u.contains(&b) {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let outside: BTreeSet<NodeId> = h.nodes().filter(|v| !u.contains(v)).collect();
    for comp in h.induced(&outside).components().blocks {
        let mut frontier = BTreeSet::new();
        for v in &comp {
            for w in h.neighbors(*v) {
                if u.contains(&w) {
                    frontier.insert(w);
                }
            }
        }
        let fr: Vec<NodeId> = frontier.into_iter().collect();
        for i in 0..fr.len() {
            for j in (i + 1)..fr.len() {
                pairs.insert((fr[i], fr[j]));
            }
        }
    }
    for (a, b) in pairs {
        t.add_edge(a, b);
    }
    t
}

/// Torso over `z` plus every node of `v_orig` attached to the frontier
/// clique of its component in `h` minus `z`.
pub fn build_h_prime(h: &MultiGraph, z: &BTreeSet<NodeId>, v_orig: &BTreeSet<NodeId>) -> MultiGraph {
    let mut out = build_torso(h, z);
    let rest: BTreeSet<NodeId> = h.nodes().filter(|v| !z.contains(v)).collect();
    let comps = h.induced(&rest).components();
    for v in v_orig {
        if z.contains(v) {
            continue;
        }
        let comp_idx = comps.block_of(*v).expect("v_orig node must live in h");
        let comp = &comps.blocks[comp_idx];
        let mut frontier = BTreeSet::new();
        for w in comp {
            for n in h.neighbors(*w) {
                if z.contains(&n) {
                    frontier.insert(n);
                }
            }
        }
        let mut g2 = MultiGraph::with_node_ids(out.nodes().chain([*v]));
        for e in out.edge_ids() {
            let (a, b) = out.endpoints(e);
            g2.add_edge(a, b);
        }
        for f in frontier {
            g2.add_edge(*v, f);
        }
        out = g2;
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ZEngine {
    /// Exhaustive search over subsets of the allowed edge set.
    Exhaustive,
    /// Restricted-node multicut on the expanded graph's torso, solved by
    /// tree-decomposition DP.
    TorsoDp,
}

/// Minimum edge multicut of the given sets using only edges from `allowed`,
/// with at most `k` edges, or `None`.
pub fn solve_z_restricted(
    g: &MultiGraph,
    terminal_sets: &[BTreeSet<NodeId>],
    k: usize,
    allowed: &BTreeSet<EdgeId>,
    engine: ZEngine,
) -> Result<Option<BTreeSet<EdgeId>>, SmcError> {
    match engine {
        ZEngine::Exhaustive => {
            let universe: Vec<EdgeId> = allowed.iter().copied().collect();
            for size in 0..=k.min(universe.len()) {
                for combo in universe.iter().combinations(size) {
                    let s: BTreeSet<EdgeId> = combo.into_iter().copied().collect();
                    let as_cut = CutSet::Edges(s.clone());
                    if terminal_sets.iter().all(|set| set_is_cut(g, set, &as_cut)) {
                        return Ok(Some(s));
                    }
                }
            }
            Ok(None)
        }
        ZEngine::TorsoDp => solve_z_restricted_torso(g, terminal_sets, k, allowed),
    }
}

fn solve_z_restricted_torso(
    g: &MultiGraph,
    terminal_sets: &[BTreeSet<NodeId>],
    k: usize,
    allowed: &BTreeSet<EdgeId>,
) -> Result<Option<BTreeSet<EdgeId>>, SmcError> {
    let expansion = line_expansion(g);
    let z_nodes: BTreeSet<NodeId> = allowed.iter().map(|e| expansion.edge_image[e]).collect();
    let orig_nodes: BTreeSet<NodeId> = expansion.node_image.values().copied().collect();
    let mut hp = build_h_prime(&expansion.graph, &z_nodes, &orig_nodes);

    // Nodes sharing a component of the expansion minus the allowed set can
    // never be separated by allowed edges; make each such group a clique so
    // the node instance cannot cheat by cutting around it.
    let rest: BTreeSet<NodeId> = expansion.graph.nodes().filter(|v| !z_nodes.contains(v)).collect();
    for comp in expansion.graph.induced(&rest).components().blocks {
        let members: Vec<NodeId> = comp.intersection(&orig_nodes).copied().collect();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                hp.add_edge(members[i], members[j]);
            }
        }
    }

    let mapped_sets: Vec<BTreeSet<NodeId>> = terminal_sets
        .iter()
        .map(|set| set.iter().map(|v| expansion.node_image[v]).collect())
        .collect();
    let inst = Instance::new(hp, Variant::RNode, mapped_sets, k)?;
    let td = twdp::heuristic_decomposition(&inst.graph);
    let cut = twdp::solve_twdp(&inst, &td)?;
    Ok(cut.map(|c| {
        let nodes = c.nodes().expect("restricted-node cut").clone();
        let back: BTreeMap<NodeId, EdgeId> = expansion.edge_image.iter().map(|(e, n)| (*n, *e)).collect();
        nodes.iter().map(|n| back[n]).collect()
    }))
}

/// Minimum edge multicut of size at most `k` when `y` meets every terminal
/// set, by branching over which sets are cut inside the Z edge set and how
/// the budget is divided.
pub fn solve_multipedal(
    g: &MultiGraph,
    y: &BTreeSet<NodeId>,
    terminal_sets: &[BTreeSet<NodeId>],
    k: usize,
    z_engine: ZEngine,
) -> Result<Option<BTreeSet<EdgeId>>, SmcError> {
    for set in terminal_sets {
        if set.is_disjoint(y) {
            return Err(SmcError::InvalidArgument(
                "solve_multipedal: y must intersect every terminal set".into(),
            ));
        }
    }
    if !g.is_connected() {
        return Err(SmcError::InvalidArgument("solve_multipedal: graph must be connected".into()));
    }
    if y.len() == 1 {
        let hub = *y.iter().next().unwrap();
        let sets: Vec<BTreeSet<NodeId>> = terminal_sets
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(hub);
                s
            })
            .collect();
        return solve_unipedal(g, hub, &sets, k);
    }

    let z = crate::separators::compute_z(g, y, k)?;
    let t = terminal_sets.len();
    let mut best: Option<BTreeSet<EdgeId>> = None;

    let mut masks: Vec<u32> = (0..1u32 << t).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for inside_mask in masks {
        let inside_sets: Vec<BTreeSet<NodeId>> = (0..t)
            .filter(|i| inside_mask >> i & 1 == 1)
            .map(|i| terminal_sets[i].clone())
            .collect();
        let outside_sets: Vec<BTreeSet<NodeId>> = (0..t)
            .filter(|i| inside_mask >> i & 1 == 0)
            .map(|i| terminal_sets[i].clone())
            .collect();
        for k_inside in 0..=k {
            let k_outside = k - k_inside;
            let Some(s_inside) = solve_z_restricted(g, &inside_sets, k_inside, &z, z_engine)? else {
                continue;
            };
            let s_outside = if outside_sets.is_empty() {
                Some(BTreeSet::new())
            } else {
                let (gstar, hub) = build_gstar(g, y, k);
                let rewritten: Vec<BTreeSet<NodeId>> = outside_sets
                    .iter()
                    .map(|s| rewrite_terminals_for_hub(s, y, hub))
                    .collect();
                solve_unipedal(&gstar, hub, &rewritten, k_outside)?
            };
            let Some(s_outside) = s_outside else { continue };
            let mut candidate: BTreeSet<EdgeId> = s_inside;
            candidate.extend(s_outside);
            // hub edges never appear: they are not important separator
            // members, but keep the check cheap and explicit
            debug_assert!(candidate.iter().all(|e| g.contains_edge(*e)));
            let inst = Instance::new(g.clone(), Variant::Edge, terminal_sets.to_vec(), k)?;
            if !verify_cut(&inst, &CutSet::Edges(candidate.clone()))? {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => (candidate.len(), &candidate) < (b.len(), b),
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    Ok(best)
}

/// Full edge-variant solver: drops already-separated sets, splits into
/// components, and runs the multipedal search with the lowest-id terminal
/// of each set as its hitting-set representative.
pub fn solve_edge_kt(inst: &Instance) -> Result<Option<CutSet>, SmcError> {
    solve_edge_with(inst, ZEngine::Exhaustive)
}

pub fn solve_edge_with(inst: &Instance, z_engine: ZEngine) -> Result<Option<CutSet>, SmcError> {
    if inst.variant != Variant::Edge {
        return Err(SmcError::InvalidArgument("solve_edge_kt expects the edge variant".into()));
    }
    let parts = inst.graph.components();
    let mut per_component: BTreeMap<usize, Vec<BTreeSet<NodeId>>> = BTreeMap::new();
    for set in &inst.terminal_sets {
        let blocks: BTreeSet<Option<usize>> = set.iter().map(|v| parts.block_of(*v)).collect();
        if blocks.len() == 1 {
            per_component
                .entry(blocks.into_iter().next().unwrap().unwrap())
                .or_default()
                .push(set.clone());
        }
        // sets spanning several components are already cut
    }
    let mut total: BTreeSet<EdgeId> = BTreeSet::new();
    for (block_idx, sets) in per_component {
        let sub = inst.graph.induced(&parts.blocks[block_idx]);
        let y: BTreeSet<NodeId> = sets.iter().map(|s| *s.iter().next().unwrap()).collect();
        let remaining = inst.budget - total.len().min(inst.budget);
        match solve_multipedal(&sub, &y, &sets, remaining, z_engine)? {
            Some(cut) => total.extend(cut),
            None => return Ok(None),
        }
    }
    if total.len() > inst.budget {
        return Ok(None);
    }
    Ok(Some(CutSet::Edges(total)))
}

/// Constructive split of an inclusion-wise minimal cut: edges on minimal
/// cuts between reachability regions of different `y` nodes versus edges
/// around components disjoint from `y`.
pub fn split_minimal_cut(
    g: &MultiGraph,
    y: &BTreeSet<NodeId>,
    s: &BTreeSet<EdgeId>,
) -> (BTreeSet<EdgeId>, BTreeSet<EdgeId>) {
    let mut near = BTreeSet::new();
    let mut far = BTreeSet::new();
    for hub in y {
        let r = g.reachable(&BTreeSet::from([*hub]), s);
        let s_hub = g.boundary_edges(&r);
        let rest: BTreeSet<NodeId> = g.nodes().filter(|v| !r.contains(v)).collect();
        for comp in g.induced(&rest).components().blocks {
            let delta = g.boundary_edges(&comp);
            if comp.iter().any(|v| y.contains(v)) {
                near.extend(delta.intersection(&s_hub).copied());
            } else {
                far.extend(delta.intersection(&s_hub).copied());
            }
        }
    }
    (near, far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{seq::SliceRandom, Rng, SeedableRng};

    fn star_with_sets() -> (MultiGraph, NodeId, Vec<BTreeSet<NodeId>>) {
        let mut g = MultiGraph::with_node_ids((1..=4).map(NodeId));
        let hub = NodeId(1);
        for leaf in 2..=4 {
            g.add_edge(hub, NodeId(leaf));
        }
        let sets = (2..=4).map(|leaf| BTreeSet::from([hub, NodeId(leaf)])).collect();
        (g, hub, sets)
    }

    #[test]
    fn separator_type_examples() {
        let (g, hub, sets) = star_with_sets();
        let sep = SeparatorRecord {
            edges: BTreeSet::from([EdgeId(0)]),
            reachable: BTreeSet::from([NodeId(2)]),
        };
        assert_eq!(separator_type(&g, hub, &sep, &sets), 0b001);
        let empty = SeparatorRecord {
            edges: BTreeSet::new(),
            reachable: BTreeSet::new(),
        };
        assert_eq!(separator_type(&g, hub, &empty, &sets), 0);

        // one set with several terminals behind the same cut sets one bit
        let sets2 = vec![BTreeSet::from([hub, NodeId(2), NodeId(3)])];
        let sep2 = SeparatorRecord {
            edges: BTreeSet::from([EdgeId(0), EdgeId(1)]),
            reachable: BTreeSet::new(),
        };
        assert_eq!(separator_type(&g, hub, &sep2, &sets2), 0b1);
    }

    #[test]
    fn unipedal_star() {
        let (g, hub, sets) = star_with_sets();
        let cut = solve_unipedal(&g, hub, &sets, 3).unwrap().unwrap();
        assert_eq!(cut.len(), 3);
        assert_eq!(solve_unipedal(&g, hub, &sets, 2).unwrap(), None);
    }

    #[test]
    fn unipedal_matches_oracle_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let mut solved = 0;
        while solved < 60 {
            let n = rng.gen_range(3..=8u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            if !g.is_connected() {
                continue;
            }
            solved += 1;
            let hub = NodeId(1);
            let nodes: Vec<NodeId> = g.nodes().collect();
            let t = rng.gen_range(1..=3usize);
            let sets: Vec<BTreeSet<NodeId>> = (0..t)
                .map(|_| {
                    let mut s: BTreeSet<NodeId> =
                        nodes.choose_multiple(&mut rng, rng.gen_range(1..=2)).copied().collect();
                    s.insert(hub);
                    while s.len() < 2 {
                        s.insert(*nodes.choose(&mut rng).unwrap());
                    }
                    s
                })
                .collect();
            let k = rng.gen_range(0..=3usize);
            let got = solve_unipedal(&g, hub, &sets, k).unwrap();
            let inst = Instance::new(g.clone(), Variant::Edge, sets.clone(), k).unwrap();
            let want = oracle::brute_force_solve(&inst);
            assert_eq!(got.is_some(), want.is_some());
            if let (Some(c), Some(w)) = (got, want) {
                assert_eq!(c.len(), w.len());
                assert!(verify_cut(&inst, &CutSet::Edges(c)).unwrap());
            }
        }
    }

    #[test]
    fn gstar_shape() {
        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        let y = BTreeSet::from([NodeId(1), NodeId(2)]);
        let (gs, hub) = build_gstar(&g, &y, 1);
        assert_eq!(gs.node_count(), 4);
        assert_eq!(gs.edge_count(), 2 + 2 * 2);
        assert_eq!(gs.incident_edges(hub).len(), 4);
        // no small cut separates the hub from y
        for e in gs.edge_ids() {
            let r = gs.reachable(&BTreeSet::from([hub]), &BTreeSet::from([e]));
            assert!(y.iter().all(|v| r.contains(v)));
        }
        let t = rewrite_terminals_for_hub(&BTreeSet::from([NodeId(1), NodeId(3)]), &y, hub);
        assert_eq!(t, BTreeSet::from([hub, NodeId(3)]));
    }

    #[test]
    fn line_expansion_shapes() {
        let mut g = MultiGraph::with_node_ids([NodeId(1), NodeId(2)]);
        g.add_edge(NodeId(1), NodeId(2));
        let le = line_expansion(&g);
        assert_eq!(le.graph.node_count(), 3);
        assert_eq!(le.graph.edge_count(), 2);

        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        let le = line_expansion(&g);
        assert_eq!(le.graph.node_count(), 5);
        assert_eq!(le.graph.edge_count(), 5);

        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        g.add_edge(NodeId(1), NodeId(3));
        let le = line_expansion(&g);
        assert_eq!(le.graph.node_count(), 6);
        assert_eq!(le.graph.edge_count(), 9);
    }

    #[test]
    fn torso_shapes() {
        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        let whole = build_torso(&g, &g.node_set());
        assert_eq!(whole.edge_count(), 2);
        let ends = build_torso(&g, &BTreeSet::from([NodeId(1), NodeId(3)]));
        assert_eq!(ends.edge_count(), 1);

        let mut star = MultiGraph::with_node_ids((1..=4).map(NodeId));
        star.add_edge(NodeId(1), NodeId(2));
        star.add_edge(NodeId(1), NodeId(3));
        star.add_edge(NodeId(1), NodeId(4));
        let leaves = build_torso(&star, &BTreeSet::from([NodeId(2), NodeId(3), NodeId(4)]));
        assert_eq!(leaves.edge_count(), 3);
    }

    #[test]
    fn h_prime_shapes() {
        let mut h = MultiGraph::with_node_ids((1..=3).map(NodeId));
        h.add_edge(NodeId(1), NodeId(2));
        h.add_edge(NodeId(2), NodeId(3));
        // whole node set: torso is h itself, nothing added
        let hp = build_h_prime(&h, &h.node_set(), &BTreeSet::new());
        assert_eq!(hp.edge_count(), 2);

        // path a-(ab)-b with the middle as torso set
        let hp = build_h_prime(&h, &BTreeSet::from([NodeId(2)]), &BTreeSet::from([NodeId(1), NodeId(3)]));
        assert_eq!(hp.node_count(), 3);
        assert_eq!(hp.edge_count(), 2);
        assert_eq!(hp.neighbors(NodeId(1)), BTreeSet::from([NodeId(2)]));
    }

    #[test]
    fn z_restricted_examples() {
        let mut g = MultiGraph::with_node_ids((1..=3).map(NodeId));
        let ab = g.add_edge(NodeId(1), NodeId(2));
        g.add_edge(NodeId(2), NodeId(3));
        let sets = vec![BTreeSet::from([NodeId(1), NodeId(3)])];
        assert_eq!(
            solve_z_restricted(&g, &sets, 1, &BTreeSet::new(), ZEngine::Exhaustive).unwrap(),
            None
        );
        assert_eq!(
            solve_z_restricted(&g, &sets, 1, &BTreeSet::from([ab]), ZEngine::Exhaustive).unwrap(),
            Some(BTreeSet::from([ab]))
        );
    }

    #[test]
    fn z_engines_agree_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(137);
        let mut checked = 0;
        while checked < 40 {
            let n = rng.gen_range(3..=7u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            if !g.is_connected() || g.edge_count() == 0 {
                continue;
            }
            checked += 1;
            let nodes: Vec<NodeId> = g.nodes().collect();
            let t = rng.gen_range(1..=2usize);
            let sets: Vec<BTreeSet<NodeId>> = (0..t)
                .filter_map(|_| {
                    let s: BTreeSet<NodeId> = nodes.choose_multiple(&mut rng, 2).copied().collect();
                    (s.len() == 2).then_some(s)
                })
                .collect();
            if sets.is_empty() {
                continue;
            }
            let k = rng.gen_range(0..=2usize);
            let edges: Vec<EdgeId> = g.edge_ids().collect();
            let m = rng.gen_range(0..=edges.len());
            let allowed: BTreeSet<EdgeId> = edges.choose_multiple(&mut rng, m).copied().collect();
            let a = solve_z_restricted(&g, &sets, k, &allowed, ZEngine::Exhaustive).unwrap();
            let b = solve_z_restricted(&g, &sets, k, &allowed, ZEngine::TorsoDp).unwrap();
            assert_eq!(a.is_some(), b.is_some(), "allowed={allowed:?} sets={sets:?} k={k}");
            if let (Some(a), Some(b)) = (a, b) {
                assert_eq!(a.len(), b.len());
                assert!(b.is_subset(&allowed));
                let as_cut = CutSet::Edges(b);
                assert!(sets.iter().all(|s| set_is_cut(&g, s, &as_cut)));
            }
        }
    }

    #[test]
    fn multipedal_degenerate_and_path() {
        // |Y| = 1 equals unipedal
        let (g, hub, sets) = star_with_sets();
        let a = solve_multipedal(&g, &BTreeSet::from([hub]), &sets, 3, ZEngine::Exhaustive)
            .unwrap()
            .unwrap();
        assert_eq!(a.len(), 3);

        // Y = both endpoints of a path, T = Y
        let mut g = MultiGraph::with_node_ids((1..=4).map(NodeId));
        for i in 1..4 {
            g.add_edge(NodeId(i), NodeId(i + 1));
        }
        let y = BTreeSet::from([NodeId(1), NodeId(4)]);
        let cut = solve_multipedal(&g, &y, &[y.clone()], 1, ZEngine::Exhaustive)
            .unwrap()
            .unwrap();
        assert_eq!(cut.len(), 1);
    }

    #[test]
    fn multipedal_matches_oracle_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(193);
        let mut checked = 0;
        while checked < 50 {
            let n = rng.gen_range(3..=8u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.45) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            if !g.is_connected() {
                continue;
            }
            checked += 1;
            let nodes: Vec<NodeId> = g.nodes().collect();
            let t = rng.gen_range(1..=3usize);
            let sets: Vec<BTreeSet<NodeId>> = (0..t)
                .filter_map(|_| {
                    let s: BTreeSet<NodeId> =
                        nodes.choose_multiple(&mut rng, rng.gen_range(2..=3)).copied().collect();
                    (s.len() >= 2).then_some(s)
                })
                .collect();
            if sets.is_empty() {
                continue;
            }
            let k = rng.gen_range(0..=3usize);
            let inst = Instance::new(g, Variant::Edge, sets, k).unwrap();
            let got = solve_edge_kt(&inst).unwrap();
            let want = oracle::brute_force_solve(&inst);
            assert_eq!(got.is_some(), want.is_some());
            if let (Some(c), Some(w)) = (got, want) {
                assert_eq!(c.len(), w.len());
                assert!(verify_cut(&inst, &c).unwrap());
            }
        }
    }

    #[test]
    fn split_properties_on_minimal_oracle_cuts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(211);
        let mut checked = 0;
        while checked < 30 {
            let n = rng.gen_range(4..=7u32);
            let mut g = MultiGraph::with_node_ids((1..=n).map(NodeId));
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(NodeId(i), NodeId(j));
                    }
                }
            }
            if !g.is_connected() {
                continue;
            }
            let nodes: Vec<NodeId> = g.nodes().collect();
            let t = rng.gen_range(1..=2usize);
            let sets: Vec<BTreeSet<NodeId>> = (0..t)
                .filter_map(|_| {
                    let s: BTreeSet<NodeId> = nodes.choose_multiple(&mut rng, 2).copied().collect();
                    (s.len() == 2).then_some(s)
                })
                .collect();
            if sets.is_empty() {
                continue;
            }
            let k = rng.gen_range(1..=3usize);
            let inst = Instance::new(g.clone(), Variant::Edge, sets.clone(), k).unwrap();
            let Some(CutSet::Edges(cut)) = oracle::brute_force_solve(&inst) else {
                continue;
            };
            // oracle minima are inclusion-wise minimal
            checked += 1;
            let y: BTreeSet<NodeId> = sets.iter().map(|s| *s.iter().next().unwrap()).collect();
            if y.len() < 2 {
                continue;
            }
            let (near, far) = split_minimal_cut(&g, &y, &cut);
            assert!(near.is_disjoint(&far));
            let mut union = near.clone();
            union.extend(far.iter().copied());
            assert_eq!(union, cut);
            let z = crate::separators::compute_z(&g, &y, k).unwrap();
            assert!(near.is_subset(&z));
            // y stays in one component without the far part
            let r = g.reachable(&BTreeSet::from([*y.iter().next().unwrap()]), &far);
            assert!(y.iter().all(|v| r.contains(v)));
            for hub in &y {
                let (_, far_all) = reachable_set(&g, &BTreeSet::from([*hub]), &cut);
                let (_, far_near) = reachable_set(&g, &BTreeSet::from([*hub]), &near);
                let (_, far_far) = reachable_set(&g, &BTreeSet::from([*hub]), &far);
                let mut both = far_near.clone();
                both.extend(far_far.iter().copied());
                assert_eq!(far_all, both);
            }
        }
    }
}
