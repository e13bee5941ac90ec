//! Tree solvers and kernels.
//!
//! Trees are re-rooted at their lowest node id. Every algorithm works from
//! the terminal root of each set: the root of the minimal subtree spanning
//! the set, found as the lowest common ancestor of the set's post-order
//! extremes. The greedy node solver runs in near-linear time; the others
//! are branching or subset-DP procedures for desk-scale inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::instance::{CutSet, Instance, Variant};
use crate::SmcError;

/// Rooted view of a tree with parent/depth arrays, BFS and post-order
/// numberings, and a sparse-table LCA over an Euler tour.
pub struct RootedTreeIndex {
    pub ids: Vec<NodeId>,
    pub index_of: BTreeMap<NodeId, usize>,
    pub parent: Vec<usize>,
    pub parent_edge: Vec<Option<EdgeId>>,
    pub depth: Vec<u32>,
    pub bfs_order: Vec<usize>,
    pub post_order: Vec<u32>,
    euler: Vec<u32>,
    first_visit: Vec<u32>,
    sparse: Vec<Vec<u32>>,
}

impl RootedTreeIndex {
    /// Roots the tree at its lowest node id.
    pub fn build(g: &MultiGraph) -> Result<Self, SmcError> {
        if !g.is_tree() {
            return Err(SmcError::InvalidArgument("input graph is not a tree".into()));
        }
        let ids: Vec<NodeId> = g.nodes().collect();
        let n = ids.len();
        let index_of: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
        for e in g.edge_ids() {
            let (u, v) = g.endpoints(e);
            let (iu, iv) = (index_of[&u], index_of[&v]);
            adj[iu].push((iv, e));
            adj[iv].push((iu, e));
        }
        let root = 0usize; // ids are sorted, so index 0 is the lowest id
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![None; n];
        let mut depth = vec![0u32; n];
        let mut bfs_order = Vec::with_capacity(n);
        parent[root] = root;
        bfs_order.push(root);
        let mut head = 0;
        while head < bfs_order.len() {
            let v = bfs_order[head];
            head += 1;
            for &(w, e) in &adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    parent_edge[w] = Some(e);
                    depth[w] = depth[v] + 1;
                    bfs_order.push(w);
                }
            }
        }

        // iterative DFS for post-order and Euler tour
        let mut post_order = vec![0u32; n];
        let mut euler: Vec<u32> = Vec::with_capacity(2 * n);
        let mut first_visit = vec![0u32; n];
        let mut post_counter = 0u32;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        first_visit[root] = 0;
        euler.push(root as u32);
        while let Some(&mut (v, ref mut child_pos)) = stack.last_mut() {
            if *child_pos < adj[v].len() {
                let (w, _) = adj[v][*child_pos];
                *child_pos += 1;
                if parent[w] == v && w != root {
                    first_visit[w] = euler.len() as u32;
                    euler.push(w as u32);
                    stack.push((w, 0));
                }
            } else {
                post_order[v] = post_counter;
                post_counter += 1;
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p as u32);
                }
            }
        }

        // sparse table of argmin-depth positions over the Euler tour
        let m = euler.len();
        let levels = (usize::BITS - m.leading_zeros()) as usize;
        let mut sparse: Vec<Vec<u32>> = Vec::with_capacity(levels);
        sparse.push((0..m as u32).collect());
        let mut span = 1;
        while 2 * span <= m {
            let prev = sparse.last().unwrap();
            let mut row = Vec::with_capacity(m - 2 * span + 1);
            for i in 0..=(m - 2 * span) {
                let a = prev[i];
                let b = prev[i + span];
                row.push(if depth[euler[a as usize] as usize] <= depth[euler[b as usize] as usize] {
                    a
                } else {
                    b
                });
            }
            sparse.push(row);
            span *= 2;
        }

        Ok(RootedTreeIndex {
            ids,
            index_of,
            parent,
            parent_edge,
            depth,
            bfs_order,
            post_order,
            euler,
            first_visit,
            sparse,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut lo, mut hi) = (self.first_visit[a], self.first_visit[b]);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        let span = (hi - lo + 1) as usize;
        let level = (usize::BITS - span.leading_zeros() - 1) as usize;
        let x = self.sparse[level][lo as usize];
        let y = self.sparse[level][hi as usize + 1 - (1 << level)];
        let (ex, ey) = (self.euler[x as usize] as usize, self.euler[y as usize] as usize);
        if self.depth[ex] <= self.depth[ey] {
            ex
        } else {
            ey
        }
    }

    pub fn lca_by_walk(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        a
    }

    /// Terminal root of a set: the LCA of its post-order minimum and
    /// maximum.
    pub fn terminal_root(&self, set: &BTreeSet<NodeId>) -> usize {
        let mut lo = usize::MAX;
        let mut hi = usize::MAX;
        for v in set {
            let i = self.index_of[v];
            if lo == usize::MAX || self.post_order[i] < self.post_order[lo] {
                lo = i;
            }
            if hi == usize::MAX || self.post_order[i] > self.post_order[hi] {
                hi = i;
            }
        }
        self.lca(lo, hi)
    }
}

/// Terminal roots of every set, as (set index, root node) pairs.
pub fn compute_terminal_roots(
    g: &MultiGraph,
    terminal_sets: &[BTreeSet<NodeId>],
) -> Result<Vec<(usize, NodeId)>, SmcError> {
    let idx = RootedTreeIndex::build(g)?;
    Ok(terminal_sets
        .iter()
        .enumerate()
        .map(|(i, set)| (i, idx.ids[idx.terminal_root(set)]))
        .collect())
}

/// Greedy node-variant tree solver: repeatedly delete the deepest terminal
/// root. Near-linear in the input size.
pub fn solve_node_tree_greedy(inst: &Instance) -> Result<Option<CutSet>, SmcError> {
    if inst.variant != Variant::Node {
        return Err(SmcError::InvalidArgument("greedy tree solver expects the node variant".into()));
    }
    let idx = RootedTreeIndex::build(&inst.graph)?;
    let n = idx.len();
    let t = inst.terminal_sets.len();

    let mut roots_at: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (set_id, set) in inst.terminal_sets.iter().enumerate() {
        roots_at[idx.terminal_root(set)].push(set_id as u32);
    }

    // one record per (set, terminal); spliceable per-node lists
    let mut record_set: Vec<u32> = Vec::new();
    let mut next: Vec<u32> = Vec::new();
    const NIL: u32 = u32::MAX;
    let mut head: Vec<u32> = vec![NIL; n];
    let mut tail: Vec<u32> = vec![NIL; n];
    for (set_id, set) in inst.terminal_sets.iter().enumerate() {
        for v in set {
            let i = idx.index_of[v];
            let r = record_set.len() as u32;
            record_set.push(set_id as u32);
            next.push(head[i]);
            head[i] = r;
            if tail[i] == NIL {
                tail[i] = r;
            }
        }
    }

    let mut set_cut = vec![false; t];
    let mut cut_nodes: BTreeSet<NodeId> = BTreeSet::new();
    for &v in idx.bfs_order.iter().rev() {
        let takes = roots_at[v].iter().any(|s| !set_cut[*s as usize]);
        if takes {
            cut_nodes.insert(idx.ids[v]);
            let mut r = head[v];
            while r != NIL {
                set_cut[record_set[r as usize] as usize] = true;
                r = next[r as usize];
            }
        } else if v != idx.bfs_order[0] {
            // splice this node's terminal list onto the parent
            let p = idx.parent[v];
            if head[v] != NIL {
                if head[p] == NIL {
                    head[p] = head[v];
                    tail[p] = tail[v];
                } else {
                    next[tail[p] as usize] = head[v];
                    tail[p] = tail[v];
                }
            }
        }
    }
    debug_assert!(set_cut.iter().all(|c| *c));
    if cut_nodes.len() > inst.budget {
        return Ok(None);
    }
    Ok(Some(CutSet::Nodes(cut_nodes)))
}

// ---------------------------------------------------------------------
// branching solver, edge and restricted-node variants

#[derive(Clone, Copy, Debug, Default)]
pub struct BranchStats {
    /// terminated recursion paths of the successful (or final) run
    pub leaves: u64,
    /// budget of that run
    pub run_budget: usize,
}

pub fn solve_tree_branch_kp(inst: &Instance) -> Result<Option<CutSet>, SmcError> {
    solve_tree_branch_kp_instrumented(inst).map(|(c, _)| c)
}

/// Exact minimum by running the decision branching with growing budgets.
/// Statistics cover every run, for bounding leaves by p^budget.
pub fn solve_tree_branch_kp_instrumented(
    inst: &Instance,
) -> Result<(Option<CutSet>, Vec<BranchStats>), SmcError> {
    if inst.variant != Variant::Edge && inst.variant != Variant::RNode {
        return Err(SmcError::InvalidArgument(
            "branching tree solver expects the edge or restricted-node variant".into(),
        ));
    }
    if !inst.graph.is_tree() {
        return Err(SmcError::InvalidArgument("input graph is not a tree".into()));
    }

    let (graph, terminal_sets) = if inst.variant == Variant::RNode {
        match contract_terminal_edges(&inst.graph, &inst.terminal_sets)? {
            Some(pair) => pair,
            None => return Ok((None, Vec::new())), // a set collapsed to one node
        }
    } else {
        (inst.graph.clone(), inst.terminal_sets.clone())
    };

    let mut stats = Vec::new();
    for budget in 0..=inst.budget {
        let mut leaves = 0u64;
        let got = branch(&graph, &terminal_sets, budget, inst.variant, &mut leaves);
        stats.push(BranchStats {
            leaves,
            run_budget: budget,
        });
        if let Some(mut members) = got {
            members.sort();
            let cut = match inst.variant {
                Variant::Edge => CutSet::Edges(members.into_iter().map(EdgeId).collect()),
                _ => CutSet::Nodes(members.into_iter().map(NodeId).collect()),
            };
            return Ok((Some(cut), stats));
        }
    }
    Ok((None, stats))
}

/// Contracts every edge with two terminal endpoints; `None` when a
/// terminal set collapses to a single node.
fn contract_terminal_edges(
    g: &MultiGraph,
    sets: &[BTreeSet<NodeId>],
) -> Result<Option<(MultiGraph, Vec<BTreeSet<NodeId>>)>, SmcError> {
    let terminals: BTreeSet<NodeId> = sets.iter().flatten().copied().collect();
    let to_contract: BTreeSet<EdgeId> = g
        .edge_ids()
        .filter(|e| {
            let (u, v) = g.endpoints(*e);
            u != v && terminals.contains(&u) && terminals.contains(&v)
        })
        .collect();
    let (h, map) = g.contract_edges(&to_contract)?;
    let mapped: Vec<BTreeSet<NodeId>> = sets.iter().map(|s| s.iter().map(|v| map[v]).collect()).collect();
    if mapped.iter().any(|s: &BTreeSet<NodeId>| s.len() < 2) {
        return Ok(None);
    }
    // drop parallel copies so the result stays a tree
    let mut seen: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut dedup: BTreeSet<EdgeId> = BTreeSet::new();
    for e in h.edge_ids() {
        let (u, v) = h.endpoints(e);
        let key = (u.min(v), u.max(v));
        if u == v || !seen.insert(key) {
            dedup.insert(e);
        }
    }
    Ok(Some((h.delete_edges(&dedup), mapped)))
}

fn branch(
    g: &MultiGraph,
    sets: &[BTreeSet<NodeId>],
    budget: usize,
    variant: Variant,
    leaves: &mut u64,
) -> Option<Vec<u32>> {
    if sets.is_empty() {
        *leaves += 1;
        return Some(Vec::new());
    }
    if budget == 0 {
        *leaves += 1;
        return None;
    }
    let idx = RootedTreeIndex::build(g).expect("branch state stays a tree");
    let terminals: BTreeSet<NodeId> = sets.iter().flatten().copied().collect();

    // deepest terminal root; ties by lowest node id
    let mut best: Option<(u32, NodeId, usize)> = None;
    for (i, set) in sets.iter().enumerate() {
        let r = idx.terminal_root(set);
        let cand = (idx.depth[r], idx.ids[r], i);
        let better = match best {
            None => true,
            Some((d, id, _)) => (cand.0, cand.1) > (d, id) && cand.0 > d || (cand.0 == d && cand.1 < id),
        };
        if better {
            best = Some(cand);
        }
    }
    let (_, root_id, set_idx) = best.unwrap();
    let root = idx.index_of[&root_id];

    // children of the terminal root inside the set's spanning subtree
    let set = &sets[set_idx];
    let mut subtree_children: BTreeSet<NodeId> = BTreeSet::new();
    for v in set {
        let mut cur = idx.index_of[v];
        if cur == root {
            continue;
        }
        while idx.parent[cur] != root {
            cur = idx.parent[cur];
        }
        subtree_children.insert(idx.ids[cur]);
    }

    match variant {
        Variant::Edge => {
            for child in subtree_children {
                let e = idx.parent_edge[idx.index_of[&child]].expect("non-root node has a parent edge");
                let keep = g.reachable(&BTreeSet::from([root_id]), &BTreeSet::from([e]));
                if let Some(mut sub) = recurse_on(g, sets, &keep, budget, variant, leaves) {
                    sub.push(e.0);
                    return Some(sub);
                }
            }
            None
        }
        Variant::RNode => {
            if !terminals.contains(&root_id) {
                // forced move: delete the non-terminal root itself
                let keep = keep_after_node_removal(g, &idx, root);
                return recurse_on(g, sets, &keep, budget, variant, leaves).map(|mut sub| {
                    sub.push(root_id.0);
                    sub
                });
            }
            for child in subtree_children {
                debug_assert!(!terminals.contains(&child));
                let keep = keep_after_node_removal(g, &idx, idx.index_of[&child]);
                if let Some(mut sub) = recurse_on(g, sets, &keep, budget, variant, leaves) {
                    sub.push(child.0);
                    return Some(sub);
                }
            }
            None
        }
        Variant::Node => unreachable!("node variant uses the greedy solver"),
    }
}

/// Everything outside the subtree rooted at `v`.
fn keep_after_node_removal(g: &MultiGraph, idx: &RootedTreeIndex, v: usize) -> BTreeSet<NodeId> {
    let cut: BTreeSet<NodeId> = match idx.parent_edge[v] {
        Some(e) => {
            let parent = idx.ids[idx.parent[v]];
            g.reachable(&BTreeSet::from([parent]), &BTreeSet::from([e]))
        }
        None => BTreeSet::new(), // removing the global root leaves nothing above
    };
    cut
}

fn recurse_on(
    g: &MultiGraph,
    sets: &[BTreeSet<NodeId>],
    keep: &BTreeSet<NodeId>,
    budget: usize,
    variant: Variant,
    leaves: &mut u64,
) -> Option<Vec<u32>> {
    let surviving: Vec<BTreeSet<NodeId>> = sets
        .iter()
        .filter(|s| s.iter().all(|v| keep.contains(v)))
        .cloned()
        .collect();
    if surviving.is_empty() {
        *leaves += 1;
        return Some(Vec::new());
    }
    if keep.is_empty() {
        *leaves += 1;
        return None;
    }
    let sub = g.induced(keep);
    branch(&sub, &surviving, budget - 1, variant, leaves)
}

// ---------------------------------------------------------------------
// hitting-set route, parameterized by the number of sets

/// Steiner subtree of a set: all nodes on paths between its terminals.
fn spanning_subtree_nodes(idx: &RootedTreeIndex, set: &BTreeSet<NodeId>) -> BTreeSet<usize> {
    let root = idx.terminal_root(set);
    let mut nodes = BTreeSet::from([root]);
    for v in set {
        let mut cur = idx.index_of[v];
        while !nodes.contains(&cur) {
            nodes.insert(cur);
            cur = idx.parent[cur];
        }
    }
    nodes
}

pub fn solve_tree_hitting_t(inst: &Instance) -> Result<Option<CutSet>, SmcError> {
    if inst.variant != Variant::Edge && inst.variant != Variant::RNode {
        return Err(SmcError::InvalidArgument(
            "hitting-set tree solver expects the edge or restricted-node variant".into(),
        ));
    }
    let idx = RootedTreeIndex::build(&inst.graph)?;
    let t = inst.terminal_sets.len();
    assert!(t <= 20, "subset DP over terminal sets");
    let terminals = inst.terminals();

    // universe elements and, per element, the mask of sets it hits
    let mut hit_mask: BTreeMap<u32, u32> = BTreeMap::new();
    for (i, set) in inst.terminal_sets.iter().enumerate() {
        let nodes = spanning_subtree_nodes(&idx, set);
        match inst.variant {
            Variant::Edge => {
                for &v in &nodes {
                    if let Some(e) = idx.parent_edge[v] {
                        if nodes.contains(&idx.parent[v]) {
                            *hit_mask.entry(e.0).or_insert(0) |= 1 << i;
                        }
                    }
                }
            }
            Variant::RNode => {
                for &v in &nodes {
                    if !terminals.contains(&idx.ids[v]) {
                        *hit_mask.entry(idx.ids[v].0).or_insert(0) |= 1 << i;
                    }
                }
            }
            Variant::Node => unreachable!(),
        }
    }

    let full: u32 = if t == 32 { u32::MAX } else { (1u32 << t) - 1 };
    let size = 1usize << t;
    let mut cost = vec![usize::MAX; size];
    let mut back: Vec<Option<(u32, u32)>> = vec![None; size];
    cost[0] = 0;
    for mask in 1..size as u32 {
        for (&elem, &hits) in &hit_mask {
            if hits & mask == 0 {
                continue;
            }
            let prev = (mask & !hits) as usize;
            if cost[prev] == usize::MAX {
                continue;
            }
            let c = cost[prev] + 1;
            if c < cost[mask as usize] {
                cost[mask as usize] = c;
                back[mask as usize] = Some((elem, mask & !hits));
            }
        }
    }
    if cost[full as usize] == usize::MAX || cost[full as usize] > inst.budget {
        return Ok(None);
    }
    let mut members = BTreeSet::new();
    let mut at = full;
    while at != 0 {
        let (elem, prev) = back[at as usize].expect("reachable mask has a backpointer");
        members.insert(elem);
        at = prev;
    }
    Ok(Some(match inst.variant {
        Variant::Edge => CutSet::Edges(members.into_iter().map(EdgeId).collect()),
        _ => CutSet::Nodes(members.into_iter().map(NodeId).collect()),
    }))
}

// ---------------------------------------------------------------------
// kernelization for parameter t + p

/// Exhaustively removes non-terminal leaves and splices out degree-two
/// non-terminals (for the restricted-node variant only next to another
/// non-terminal). Keeps the answer and is idempotent; the result has
/// O(t * p) nodes.
pub fn kernelize_tree_tp(inst: &Instance) -> Result<Instance, SmcError> {
    if inst.variant != Variant::Edge && inst.variant != Variant::RNode {
        return Err(SmcError::InvalidArgument("tree kernel expects the edge or restricted-node variant".into()));
    }
    if !inst.graph.is_tree() {
        return Err(SmcError::InvalidArgument("input graph is not a tree".into()));
    }
    let terminals = inst.terminals();
    let mut g = inst.graph.clone();
    loop {
        let mut changed = false;
        // non-terminal leaves
        loop {
            let leaf = g
                .nodes()
                .find(|v| !terminals.contains(v) && g.incident_edges(*v).len() <= 1 && g.node_count() > 1);
            match leaf {
                Some(v) => {
                    g = g.delete_nodes(&BTreeSet::from([v]));
                    changed = true;
                }
                None => break,
            }
        }
        // degree-two splices
        loop {
            let candidate = g.nodes().find(|v| {
                if terminals.contains(v) || g.incident_edges(*v).len() != 2 {
                    return false;
                }
                let ns: Vec<NodeId> = g.neighbors(*v).into_iter().collect();
                if ns.len() != 2 {
                    return false;
                }
                inst.variant == Variant::Edge || ns.iter().any(|u| !terminals.contains(u))
            });
            match candidate {
                Some(v) => {
                    let ns: Vec<NodeId> = g.neighbors(v).into_iter().collect();
                    g = g.delete_nodes(&BTreeSet::from([v]));
                    g.add_edge(ns[0], ns[1]);
                    changed = true;
                }
                None => break,
            }
        }
        if !changed {
            break;
        }
    }
    Instance::new(g, inst.variant, inst.terminal_sets.clone(), inst.budget)
}
