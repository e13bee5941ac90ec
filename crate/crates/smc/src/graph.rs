//! Undirected multigraph with stable ids.
//!
//! Every algorithm in this crate runs on [`MultiGraph`]. Contraction and
//! identification allocate fresh node ids but never touch edge ids, so an
//! edge found in a contracted graph can be reported directly against the
//! graph it came from. Self-loops and parallel edges are kept; cut
//! semantics ignore self-loops (they never separate anything).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::SmcError;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Disjoint non-empty node blocks covering a ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<BTreeSet<NodeId>>,
}

impl Partition {
    pub fn ground_set(&self) -> BTreeSet<NodeId> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn block_of(&self, v: NodeId) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&v))
    }

    /// Checks disjointness, non-emptiness and coverage of `ground`.
    pub fn is_valid_over(&self, ground: &BTreeSet<NodeId>) -> bool {
        let mut seen = BTreeSet::new();
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for v in b {
                if !seen.insert(*v) {
                    return false;
                }
            }
        }
        seen == *ground
    }
}

#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    labels: BTreeMap<NodeId, BTreeSet<NodeId>>,
    adj: BTreeMap<NodeId, Vec<EdgeId>>,
    edges: BTreeMap<EdgeId, (NodeId, NodeId)>,
    next_node: u32,
    next_edge: u32,
}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph::default()
    }

    /// Graph with the given node ids and no edges. Labels start as singletons.
    pub fn with_node_ids<I: IntoIterator<Item = NodeId>>(ids: I) -> Self {
        let mut g = MultiGraph::new();
        for v in ids {
            g.insert_node(v, BTreeSet::from([v]));
        }
        g
    }

    fn insert_node(&mut self, v: NodeId, label: BTreeSet<NodeId>) {
        assert!(!self.labels.contains_key(&v), "duplicate node id {v}");
        self.labels.insert(v, label);
        self.adj.insert(v, Vec::new());
        self.next_node = self.next_node.max(v.0 + 1);
    }

    pub fn add_node(&mut self) -> NodeId {
        let v = NodeId(self.next_node);
        self.insert_node(v, BTreeSet::from([v]));
        v
    }

    fn add_node_labelled(&mut self, label: BTreeSet<NodeId>) -> NodeId {
        let v = NodeId(self.next_node);
        self.insert_node(v, label);
        v
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> EdgeId {
        assert!(self.labels.contains_key(&u) && self.labels.contains_key(&v));
        let e = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(e, (u, v));
        self.adj.get_mut(&u).unwrap().push(e);
        if u != v {
            self.adj.get_mut(&v).unwrap().push(e);
        }
        e
    }

    fn add_edge_with_id(&mut self, e: EdgeId, u: NodeId, v: NodeId) {
        assert!(!self.edges.contains_key(&e));
        self.edges.insert(e, (u, v));
        self.adj.get_mut(&u).unwrap().push(e);
        if u != v {
            self.adj.get_mut(&v).unwrap().push(e);
        }
        self.next_edge = self.next_edge.max(e.0 + 1);
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.labels.keys().copied()
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.labels.keys().copied().collect()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge_id_set(&self) -> BTreeSet<EdgeId> {
        self.edges.keys().copied().collect()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.labels.contains_key(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[&e]
    }

    pub fn is_self_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.edges[&e];
        u == v
    }

    /// Original node ids merged into `v` over the graph's contraction history.
    pub fn label(&self, v: NodeId) -> &BTreeSet<NodeId> {
        &self.labels[&v]
    }

    /// Incident edges; a self-loop is listed once.
    pub fn incident_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.adj[&v]
    }

    pub fn neighbors(&self, v: NodeId) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for &e in &self.adj[&v] {
            let (a, b) = self.edges[&e];
            let w = if a == v { b } else { a };
            if w != v {
                out.insert(w);
            }
        }
        out
    }

    pub fn other_endpoint(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[&e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn delete_edges(&self, removed: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut g = self.clone();
        for &e in removed {
            if let Some((u, v)) = g.edges.remove(&e) {
                g.adj.get_mut(&u).unwrap().retain(|&x| x != e);
                if u != v {
                    g.adj.get_mut(&v).unwrap().retain(|&x| x != e);
                }
            }
        }
        g
    }

    pub fn delete_nodes(&self, removed: &BTreeSet<NodeId>) -> MultiGraph {
        let mut g = MultiGraph::new();
        for (v, label) in &self.labels {
            if !removed.contains(v) {
                g.insert_node(*v, label.clone());
            }
        }
        for (&e, &(u, v)) in &self.edges {
            if !removed.contains(&u) && !removed.contains(&v) {
                g.add_edge_with_id(e, u, v);
            }
        }
        g.next_node = self.next_node;
        g.next_edge = self.next_edge;
        g
    }

    /// Induced subgraph on `keep`; node, edge ids and labels are preserved.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> MultiGraph {
        let drop: BTreeSet<NodeId> = self.nodes().filter(|v| !keep.contains(v)).collect();
        self.delete_nodes(&drop)
    }

    /// Nodes reachable from `starts`, not crossing `blocked` edges.
    pub fn reachable(&self, starts: &BTreeSet<NodeId>, blocked: &BTreeSet<EdgeId>) -> BTreeSet<NodeId> {
        let mut seen: BTreeSet<NodeId> = starts.iter().filter(|v| self.contains_node(**v)).copied().collect();
        let mut queue: VecDeque<NodeId> = seen.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[&v] {
                if blocked.contains(&e) {
                    continue;
                }
                let w = self.other_endpoint(e, v);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn components(&self) -> Partition {
        let mut blocks = Vec::new();
        let mut seen = BTreeSet::new();
        for v in self.nodes() {
            if seen.contains(&v) {
                continue;
            }
            let comp = self.reachable(&BTreeSet::from([v]), &BTreeSet::new());
            seen.extend(comp.iter().copied());
            blocks.push(comp);
        }
        Partition { blocks }
    }

    pub fn is_connected(&self) -> bool {
        self.components().blocks.len() <= 1
    }

    /// A tree: connected with exactly n-1 edges and no self-loops.
    pub fn is_tree(&self) -> bool {
        self.node_count() > 0
            && self.edge_count() == self.node_count() - 1
            && self.edge_ids().all(|e| !self.is_self_loop(e))
            && self.is_connected()
    }

    /// Contracts every edge of `F`. Each connected component of (V, F)
    /// becomes one node; all other edges survive with their ids (as
    /// parallels or self-loops). Returns the old-node to new-node map.
    pub fn contract_edges(
        &self,
        f: &BTreeSet<EdgeId>,
    ) -> Result<(MultiGraph, BTreeMap<NodeId, NodeId>), SmcError> {
        for e in f {
            if !self.contains_edge(*e) {
                return Err(SmcError::InvalidArgument(format!("unknown edge {e}")));
            }
        }
        // Components of the subgraph (V, F) via union-find over endpoints.
        let mut groups: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        let mut rep: BTreeMap<NodeId, NodeId> = self.nodes().map(|v| (v, v)).collect();
        fn find(rep: &mut BTreeMap<NodeId, NodeId>, v: NodeId) -> NodeId {
            let mut r = v;
            while rep[&r] != r {
                r = rep[&r];
            }
            let mut c = v;
            while rep[&c] != r {
                let next = rep[&c];
                rep.insert(c, r);
                c = next;
            }
            r
        }
        for &e in f {
            let (u, v) = self.endpoints(e);
            let (ru, rv) = (find(&mut rep, u), find(&mut rep, v));
            if ru != rv {
                let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
                rep.insert(hi, lo);
            }
        }
        for v in self.nodes() {
            let r = find(&mut rep, v);
            groups.entry(r).or_default().insert(v);
        }

        let mut g = MultiGraph::new();
        g.next_node = self.next_node;
        let mut mapping: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (r, members) in &groups {
            if members.len() == 1 {
                g.insert_node(*r, self.labels[r].clone());
                mapping.insert(*r, *r);
            } else {
                let mut label = BTreeSet::new();
                for m in members {
                    label.extend(self.labels[m].iter().copied());
                }
                let fresh = g.add_node_labelled(label);
                for m in members {
                    mapping.insert(*m, fresh);
                }
            }
        }
        for (&e, &(u, v)) in &self.edges {
            if f.contains(&e) {
                continue;
            }
            g.add_edge_with_id(e, mapping[&u], mapping[&v]);
        }
        g.next_edge = self.next_edge;
        Ok((g, mapping))
    }

    /// Merges `v` and `w` into one node without removing any edge; a v-w
    /// edge becomes a self-loop. Returns the merged node id.
    pub fn identify_nodes_mapped(&self, v: NodeId, w: NodeId) -> Result<(MultiGraph, NodeId), SmcError> {
        if v == w {
            return Err(SmcError::InvalidArgument("identify: equal nodes".into()));
        }
        if !self.contains_node(v) || !self.contains_node(w) {
            return Err(SmcError::InvalidArgument("identify: dead node".into()));
        }
        let mut g = MultiGraph::new();
        g.next_node = self.next_node;
        for (x, label) in &self.labels {
            if *x != v && *x != w {
                g.insert_node(*x, label.clone());
            }
        }
        let mut label = self.labels[&v].clone();
        label.extend(self.labels[&w].iter().copied());
        let merged = g.add_node_labelled(label);
        let image = |x: NodeId| if x == v || x == w { merged } else { x };
        for (&e, &(a, b)) in &self.edges {
            g.add_edge_with_id(e, image(a), image(b));
        }
        g.next_edge = self.next_edge;
        Ok((g, merged))
    }

    pub fn identify_nodes(&self, v: NodeId, w: NodeId) -> Result<MultiGraph, SmcError> {
        self.identify_nodes_mapped(v, w).map(|(g, _)| g)
    }

    /// Folds `identify_nodes` over a group; singleton groups are a no-op.
    pub fn identify_group(&self, group: &BTreeSet<NodeId>) -> Result<(MultiGraph, NodeId), SmcError> {
        let mut it = group.iter();
        let first = *it
            .next()
            .ok_or_else(|| SmcError::InvalidArgument("identify_group: empty group".into()))?;
        let mut g = self.clone();
        let mut merged = first;
        for &v in it {
            let (next, m) = g.identify_nodes_mapped(merged, v)?;
            g = next;
            merged = m;
        }
        Ok((g, merged))
    }

    /// Minimum X-Y edge separator by augmenting paths; size equals the
    /// maximum number of edge-disjoint X-Y paths.
    pub fn min_edge_cut(&self, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>) -> Result<BTreeSet<EdgeId>, SmcError> {
        if x.is_empty() || y.is_empty() || !x.is_disjoint(y) {
            return Err(SmcError::InvalidArgument(
                "min_edge_cut: X, Y must be disjoint and non-empty".into(),
            ));
        }
        let (flow, _) = self.max_flow(x, y);
        let side = self.residual_reach_from(x, &flow);
        let mut cut = BTreeSet::new();
        for (&e, &(u, v)) in &self.edges {
            if u == v {
                continue;
            }
            if side.contains(&u) != side.contains(&v) {
                cut.insert(e);
            }
        }
        Ok(cut)
    }

    pub fn max_flow_value(&self, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>) -> usize {
        self.max_flow(x, y).1
    }

    /// Flow per edge: +1 along (u,v) as stored, -1 against, 0 idle.
    fn max_flow(&self, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>) -> (BTreeMap<EdgeId, i8>, usize) {
        let mut flow: BTreeMap<EdgeId, i8> = BTreeMap::new();
        let mut value = 0usize;
        loop {
            // BFS over residual arcs.
            let mut parent: BTreeMap<NodeId, (NodeId, EdgeId, i8)> = BTreeMap::new();
            let mut queue: VecDeque<NodeId> = x.iter().copied().collect();
            let mut seen: BTreeSet<NodeId> = x.clone();
            let mut hit: Option<NodeId> = None;
            'bfs: while let Some(v) = queue.pop_front() {
                for &e in &self.adj[&v] {
                    let (a, b) = self.edges[&e];
                    if a == b {
                        continue;
                    }
                    let w = if a == v { b } else { a };
                    let dir: i8 = if a == v { 1 } else { -1 };
                    let f = *flow.get(&e).unwrap_or(&0);
                    // residual capacity in direction v->w is 1 - dir*f
                    if 1 - dir * f <= 0 || seen.contains(&w) {
                        continue;
                    }
                    seen.insert(w);
                    parent.insert(w, (v, e, dir));
                    if y.contains(&w) {
                        hit = Some(w);
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
            let Some(mut cur) = hit else { break };
            while !x.contains(&cur) {
                let (prev, e, dir) = parent[&cur];
                *flow.entry(e).or_insert(0) += dir;
                cur = prev;
            }
            value += 1;
        }
        (flow, value)
    }

    fn residual_reach_from(&self, x: &BTreeSet<NodeId>, flow: &BTreeMap<EdgeId, i8>) -> BTreeSet<NodeId> {
        let mut seen: BTreeSet<NodeId> = x.clone();
        let mut queue: VecDeque<NodeId> = x.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[&v] {
                let (a, b) = self.edges[&e];
                if a == b {
                    continue;
                }
                let w = if a == v { b } else { a };
                let dir: i8 = if a == v { 1 } else { -1 };
                let f = *flow.get(&e).unwrap_or(&0);
                if 1 - dir * f > 0 && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Maximal X-side over all minimum X-Y cuts: nodes with no residual
    /// path into Y after a maximum flow.
    pub(crate) fn farthest_min_cut_side(&self, x: &BTreeSet<NodeId>, y: &BTreeSet<NodeId>) -> (usize, BTreeSet<NodeId>) {
        let (flow, value) = self.max_flow(x, y);
        // reverse reach: nodes that can still push into Y.
        let mut seen: BTreeSet<NodeId> = y.clone();
        let mut queue: VecDeque<NodeId> = y.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[&v] {
                let (a, b) = self.edges[&e];
                if a == b {
                    continue;
                }
                let w = if a == v { b } else { a };
                // arc w->v must have residual capacity
                let dir: i8 = if a == w { 1 } else { -1 };
                let f = *flow.get(&e).unwrap_or(&0);
                if 1 - dir * f > 0 && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        let side: BTreeSet<NodeId> = self.nodes().filter(|v| !seen.contains(v)).collect();
        (value, side)
    }

    /// Edges leaving `side` (self-loops never qualify).
    pub fn boundary_edges(&self, side: &BTreeSet<NodeId>) -> BTreeSet<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, (u, v))| u != v && (side.contains(u) != side.contains(v)))
            .map(|(e, _)| *e)
            .collect()
    }

    /// All inclusion-wise minimal x-y edge separators of size at most
    /// `limit`, by flow-guided include/exclude branching on min-cut edges,
    /// deduplicated and minimality-filtered against this graph.
    pub fn enumerate_minimal_cuts(
        &self,
        x: NodeId,
        y: NodeId,
        limit: usize,
    ) -> Result<Vec<BTreeSet<EdgeId>>, SmcError> {
        if x == y {
            return Err(SmcError::InvalidArgument("enumerate_minimal_cuts: x == y".into()));
        }
        let mut found: BTreeSet<BTreeSet<EdgeId>> = BTreeSet::new();
        let mut stack = vec![(self.clone(), x, y, BTreeSet::<EdgeId>::new())];
        while let Some((g, gx, gy, included)) = stack.pop() {
            let xs = BTreeSet::from([gx]);
            let ys = BTreeSet::from([gy]);
            let value = g.max_flow_value(&xs, &ys);
            if value == 0 {
                found.insert(included);
                continue;
            }
            if included.len() + value > limit {
                continue;
            }
            let cut = g.min_edge_cut(&xs, &ys).expect("disjoint by construction");
            let e = *cut.iter().next().unwrap();
            // include e
            let mut inc = included.clone();
            inc.insert(e);
            stack.push((g.delete_edges(&BTreeSet::from([e])), gx, gy, inc));
            // exclude e: contract it
            let (gc, map) = g.contract_edges(&BTreeSet::from([e])).unwrap();
            stack.push((gc, map[&gx], map[&gy], included));
        }
        let mut out: Vec<BTreeSet<EdgeId>> = found
            .into_iter()
            .filter(|s| self.is_minimal_cut_between(x, y, s))
            .collect();
        out.sort();
        Ok(out)
    }

    fn is_minimal_cut_between(&self, x: NodeId, y: NodeId, s: &BTreeSet<EdgeId>) -> bool {
        let xs = BTreeSet::from([x]);
        if self.reachable(&xs, s).contains(&y) {
            return false;
        }
        for e in s {
            let mut smaller = s.clone();
            smaller.remove(e);
            if !self.reachable(&xs, &smaller).contains(&y) {
                return false;
            }
        }
        true
    }

    /// Searches for a partition (V1, V2) with both sides larger than `a`,
    /// both sides connected, and at most `b` crossing edges; crossing-edge
    /// subsets are enumerated in size-then-lexicographic order, so the
    /// result is canonical. Runs in O(|E|^b) at the desk scales used here.
    pub fn find_good_separation(&self, a: usize, b: usize) -> Result<Option<Partition>, SmcError> {
        if !self.is_connected() {
            return Err(SmcError::InvalidArgument("find_good_separation: disconnected".into()));
        }
        let edge_list: Vec<EdgeId> = self.edge_ids().filter(|e| !self.is_self_loop(*e)).collect();
        for size in 1..=b.min(edge_list.len()) {
            let mut pick = vec![0usize; size];
            if let Some(p) = self.good_sep_scan(&edge_list, &mut pick, 0, 0, a) {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    fn good_sep_scan(
        &self,
        edge_list: &[EdgeId],
        pick: &mut [usize],
        depth: usize,
        start: usize,
        a: usize,
    ) -> Option<Partition> {
        if depth == pick.len() {
            let cand: BTreeSet<EdgeId> = pick.iter().map(|&i| edge_list[i]).collect();
            let parts = self.delete_edges(&cand).components();
            if parts.blocks.len() != 2 {
                return None;
            }
            let (v1, v2) = (&parts.blocks[0], &parts.blocks[1]);
            if v1.len() <= a || v2.len() <= a {
                return None;
            }
            // cand must be exactly the crossing set, else skip (the pure
            // crossing subset is enumerated separately).
            if self.boundary_edges(v1) != cand {
                return None;
            }
            return Some(parts);
        }
        for i in start..edge_list.len() {
            pick[depth] = i;
            if let Some(p) = self.good_sep_scan(edge_list, pick, depth + 1, i + 1, a) {
                return Some(p);
            }
        }
        None
    }

    /// Iterative descent to a connected induced subgraph with at most `b`
    /// border nodes and no (a, b/2)-good edge separation. Returns the
    /// subgraph's nodes and its border nodes in `self`.
    pub fn extract_bordered_subgraph(
        &self,
        a: usize,
        b: usize,
    ) -> Result<(BTreeSet<NodeId>, BTreeSet<NodeId>), SmcError> {
        if b % 2 != 0 {
            return Err(SmcError::InvalidArgument("extract_bordered_subgraph: b must be even".into()));
        }
        if !self.is_connected() {
            return Err(SmcError::InvalidArgument("extract_bordered_subgraph: disconnected".into()));
        }
        let mut keep = self.node_set();
        loop {
            let sub = self.induced(&keep);
            match sub.find_good_separation(a, b / 2)? {
                None => {
                    let border: BTreeSet<NodeId> = keep
                        .iter()
                        .filter(|v| self.neighbors(**v).iter().any(|w| !keep.contains(w)))
                        .copied()
                        .collect();
                    return Ok((keep, border));
                }
                Some(parts) => {
                    let border_count = |block: &BTreeSet<NodeId>| {
                        block
                            .iter()
                            .filter(|v| self.neighbors(**v).iter().any(|w| !keep.contains(w)))
                            .count()
                    };
                    let (c0, c1) = (border_count(&parts.blocks[0]), border_count(&parts.blocks[1]));
                    keep = if c0 <= c1 {
                        parts.blocks[0].clone()
                    } else {
                        parts.blocks[1].clone()
                    };
                }
            }
        }
    }
}
