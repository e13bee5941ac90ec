//! Tree-decomposition dynamic programming for all three deletion variants,
//! parameterized by the number of terminal sets and the decomposition
//! width.
//!
//! Decompositions come from a min-fill heuristic and are refined into nice
//! form (leaf / introduce node / introduce edge / forget / join). Per bag
//! the DP tracks the budget spent, which terminal sets are irrevocably cut,
//! the partition of live bag nodes into connectivity classes, per class and
//! terminal set whether a terminal below connects to it, and per terminal
//! set whether one of its terminals sits in a component that can no longer
//! reach the bag. A set becomes settled exactly when two of its terminals
//! can never meet again: one of them is deleted, or sits in a sealed
//! component away from the other.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::instance::{CutSet, Instance, Variant};
use crate::SmcError;

#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<NodeId>>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks the three decomposition invariants against `g`.
    pub fn validate(&self, g: &MultiGraph) -> Result<(), SmcError> {
        if self.bags.len() != self.children.len() || self.root >= self.bags.len() {
            return Err(SmcError::InvalidArgument("malformed decomposition tree".into()));
        }
        // the children arrays must describe a single tree rooted at root
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &c in &self.children[i] {
                if c >= self.bags.len() || seen[c] {
                    return Err(SmcError::InvalidArgument("decomposition is not a tree".into()));
                }
                seen[c] = true;
                count += 1;
                stack.push(c);
            }
        }
        if count != self.bags.len() {
            return Err(SmcError::InvalidArgument("decomposition tree is disconnected".into()));
        }
        for v in g.nodes() {
            let holding: Vec<usize> = (0..self.bags.len()).filter(|i| self.bags[*i].contains(&v)).collect();
            if holding.is_empty() {
                return Err(SmcError::InvalidArgument(format!("node {v} is in no bag")));
            }
            // connectivity of the holding set
            let hold: BTreeSet<usize> = holding.iter().copied().collect();
            let mut reached = BTreeSet::from([holding[0]]);
            let mut stack = vec![holding[0]];
            while let Some(i) = stack.pop() {
                let mut adj: Vec<usize> = self.children[i].clone();
                if let Some(p) = (0..self.bags.len()).find(|j| self.children[*j].contains(&i)) {
                    adj.push(p);
                }
                for j in adj {
                    if hold.contains(&j) && reached.insert(j) {
                        stack.push(j);
                    }
                }
            }
            if reached.len() != holding.len() {
                return Err(SmcError::InvalidArgument(format!("bags holding {v} are not connected")));
            }
        }
        for e in g.edge_ids() {
            let (u, v) = g.endpoints(e);
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(SmcError::InvalidArgument(format!("edge {e} has no home bag")));
            }
        }
        Ok(())
    }
}

/// Min-fill elimination. Valid for any input; width is heuristic, exact on
/// chordal graphs.
pub fn heuristic_decomposition(g: &MultiGraph) -> TreeDecomposition {
    if g.node_count() == 0 {
        return TreeDecomposition {
            bags: vec![BTreeSet::new()],
            children: vec![vec![]],
            root: 0,
        };
    }
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = g.nodes().map(|v| (v, g.neighbors(v))).collect();
    let mut order: Vec<NodeId> = Vec::new();
    let mut bags: Vec<BTreeSet<NodeId>> = Vec::new();
    let mut position: BTreeMap<NodeId, usize> = BTreeMap::new();
    while !adj.is_empty() {
        let (&v, _) = adj
            .iter()
            .min_by_key(|(v, ns)| {
                let fill = ns
                    .iter()
                    .map(|a| ns.iter().filter(|b| *b > a && !adj[a].contains(b)).count())
                    .sum::<usize>();
                (fill, ns.len(), **v)
            })
            .expect("non-empty");
        let neighbors = adj[&v].clone();
        let mut bag = neighbors.clone();
        bag.insert(v);
        position.insert(v, order.len());
        order.push(v);
        bags.push(bag);
        for a in &neighbors {
            for b in &neighbors {
                if a < b {
                    adj.get_mut(a).unwrap().insert(*b);
                    adj.get_mut(b).unwrap().insert(*a);
                }
            }
        }
        adj.remove(&v);
        for (_, ns) in adj.iter_mut() {
            ns.remove(&v);
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); bags.len()];
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..bags.len() {
        let v = order[i];
        let parent = bags[i]
            .iter()
            .filter(|w| **w != v)
            .map(|w| position[w])
            .min();
        match parent {
            Some(p) => children[p].push(i),
            None => roots.push(i),
        }
    }
    let root = *roots.last().expect("at least one elimination root");
    for r in roots {
        if r != root {
            children[root].push(r);
        }
    }
    TreeDecomposition { bags, children, root }
}

/// Exact treewidth by subset dynamic programming over elimination
/// prefixes. Exponential; intended for graphs of at most ~15 nodes.
pub fn exact_treewidth(g: &MultiGraph) -> usize {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let n = nodes.len();
    assert!(n <= 20, "exact_treewidth is exponential");
    if n == 0 {
        return 0;
    }
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut adj: Vec<u32> = vec![0; n];
    for e in g.edge_ids() {
        let (u, v) = g.endpoints(e);
        if u != v {
            adj[index[&u]] |= 1 << index[&v];
            adj[index[&v]] |= 1 << index[&u];
        }
    }
    // q(mask, v): neighbors of v outside mask reachable through mask
    let q = |mask: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let i = f.trailing_zeros() as usize;
                f &= f - 1;
                out |= adj[i] & !mask & !(1 << v);
                next |= adj[i] & mask & !seen;
            }
            seen |= next;
            frontier = next;
        }
        out
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut f = vec![u8::MAX; (full as usize) + 1];
    f[0] = 0;
    for mask in 1..=full {
        let mut best = u8::MAX;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let prev = mask & !(1 << v);
            let width = q(prev, v).count_ones() as u8;
            best = best.min(f[prev as usize].max(width));
        }
        f[mask as usize] = best;
    }
    f[full as usize] as usize
}

#[derive(Clone, Debug)]
enum NiceOp {
    Leaf,
    Introduce(NodeId),
    Forget(NodeId),
    IntroduceEdge(EdgeId),
    Join,
}

#[derive(Clone, Debug)]
struct NiceNode {
    op: NiceOp,
    bag: BTreeSet<NodeId>,
    children: Vec<usize>,
}

fn push_nice(nodes: &mut Vec<NiceNode>, op: NiceOp, bag: BTreeSet<NodeId>, children: Vec<usize>) -> usize {
    nodes.push(NiceNode { op, bag, children });
    nodes.len() - 1
}

fn chain_to(nodes: &mut Vec<NiceNode>, mut top: usize, mut bag: BTreeSet<NodeId>, target: &BTreeSet<NodeId>) -> usize {
    let to_forget: Vec<NodeId> = bag.difference(target).copied().collect();
    for v in to_forget {
        bag.remove(&v);
        top = push_nice(nodes, NiceOp::Forget(v), bag.clone(), vec![top]);
    }
    let to_introduce: Vec<NodeId> = target.difference(&bag).copied().collect();
    for v in to_introduce {
        bag.insert(v);
        top = push_nice(nodes, NiceOp::Introduce(v), bag.clone(), vec![top]);
    }
    top
}

fn build_bag(nodes: &mut Vec<NiceNode>, td: &TreeDecomposition, idx: usize) -> usize {
    let bag = td.bags[idx].clone();
    let mut tops: Vec<usize> = Vec::new();
    for &c in &td.children[idx] {
        let sub = build_bag(nodes, td, c);
        tops.push(chain_to(nodes, sub, td.bags[c].clone(), &bag));
    }
    if tops.is_empty() {
        let top = push_nice(nodes, NiceOp::Leaf, BTreeSet::new(), vec![]);
        return chain_to(nodes, top, BTreeSet::new(), &bag);
    }
    let mut top = tops[0];
    for &other in &tops[1..] {
        top = push_nice(nodes, NiceOp::Join, bag.clone(), vec![top, other]);
    }
    top
}

/// Children always precede parents in the returned vector.
fn build_nice(g: &MultiGraph, td: &TreeDecomposition) -> (Vec<NiceNode>, usize) {
    let mut nodes: Vec<NiceNode> = Vec::new();
    let body = build_bag(&mut nodes, td, td.root);
    let root = chain_to(&mut nodes, body, td.bags[td.root].clone(), &BTreeSet::new());

    // hang each non-loop edge on the lowest-index node holding both ends
    let mut edges_at: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for e in g.edge_ids() {
        let (u, v) = g.endpoints(e);
        if u == v {
            continue;
        }
        let spot = (0..nodes.len())
            .find(|i| nodes[*i].bag.contains(&u) && nodes[*i].bag.contains(&v))
            .expect("validated decomposition holds every edge");
        edges_at.entry(spot).or_default().push(e);
    }
    let mut rebuilt: Vec<NiceNode> = Vec::new();
    let mut remap: Vec<usize> = vec![0; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        let children = node.children.iter().map(|c| remap[*c]).collect();
        rebuilt.push(NiceNode {
            op: node.op.clone(),
            bag: node.bag.clone(),
            children,
        });
        let mut top = rebuilt.len() - 1;
        if let Some(edges) = edges_at.get(&i) {
            for &e in edges {
                rebuilt.push(NiceNode {
                    op: NiceOp::IntroduceEdge(e),
                    bag: node.bag.clone(),
                    children: vec![top],
                });
                top = rebuilt.len() - 1;
            }
        }
        remap[i] = top;
    }
    let root = remap[root];
    (rebuilt, root)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct StateKey {
    deleted: BTreeSet<NodeId>,
    classes: Vec<BTreeSet<NodeId>>,
    reach: Vec<u32>,
    stranded: u32,
}

#[derive(Clone, Debug)]
struct StateVal {
    settled: u32,
    spent: usize,
    witness: BTreeSet<u32>,
}

fn canonicalize(key: &mut StateKey) {
    let mut paired: Vec<(BTreeSet<NodeId>, u32)> =
        key.classes.drain(..).zip(key.reach.drain(..)).collect();
    paired.sort_by(|a, b| a.0.cmp(&b.0));
    for (c, r) in paired {
        key.classes.push(c);
        key.reach.push(r);
    }
}

fn settle_closure(key: &mut StateKey, val: &mut StateVal) {
    let any_reach: u32 = key.reach.iter().fold(0, |a, m| a | m);
    val.settled |= key.stranded & any_reach;
    key.stranded &= !val.settled;
    for m in &mut key.reach {
        *m &= !val.settled;
    }
}

struct Table {
    states: BTreeMap<StateKey, Vec<StateVal>>,
}

impl Table {
    fn new() -> Self {
        Table { states: BTreeMap::new() }
    }

    fn insert(&mut self, mut key: StateKey, mut val: StateVal) {
        canonicalize(&mut key);
        settle_closure(&mut key, &mut val);
        let entry = self.states.entry(key).or_default();
        for existing in entry.iter() {
            let dominates = existing.settled & val.settled == val.settled
                && existing.spent <= val.spent
                && (existing.settled != val.settled
                    || existing.spent < val.spent
                    || existing.witness <= val.witness);
            if dominates {
                return;
            }
        }
        entry.retain(|existing| {
            !(val.settled & existing.settled == existing.settled && val.spent <= existing.spent)
        });
        entry.push(val);
    }
}

/// Minimum cut of size at most the budget, or `None`, by DP over a nice
/// refinement of `td`. The decomposition is validated first.
pub fn solve_twdp(inst: &Instance, td: &TreeDecomposition) -> Result<Option<CutSet>, SmcError> {
    td.validate(&inst.graph)?;
    let g = &inst.graph;
    let t = inst.terminal_sets.len();
    assert!(t <= 32, "terminal-set masks are 32-bit");
    let full: u32 = if t == 32 { u32::MAX } else { (1u32 << t) - 1 };
    let budget = inst.budget;
    let member_mask: BTreeMap<NodeId, u32> = g
        .nodes()
        .map(|v| {
            let mask = inst
                .terminal_sets
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(&v))
                .fold(0u32, |a, (i, _)| a | 1 << i);
            (v, mask)
        })
        .collect();
    let terminals = inst.terminals();
    let can_delete = |v: NodeId| match inst.variant {
        Variant::Edge => false,
        Variant::Node => true,
        Variant::RNode => !terminals.contains(&v),
    };

    let (nodes, root) = build_nice(g, td);
    let mut tables: Vec<Table> = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let mut table = Table::new();
        match &node.op {
            NiceOp::Leaf => {
                table.insert(
                    StateKey {
                        deleted: BTreeSet::new(),
                        classes: vec![],
                        reach: vec![],
                        stranded: 0,
                    },
                    StateVal {
                        settled: 0,
                        spent: 0,
                        witness: BTreeSet::new(),
                    },
                );
            }
            NiceOp::Introduce(v) => {
                let child = &tables[node.children[0]];
                for (key, vals) in &child.states {
                    for val in vals {
                        // live branch
                        let mut k2 = key.clone();
                        k2.classes.push(BTreeSet::from([*v]));
                        k2.reach.push(member_mask[v] & !val.settled);
                        table.insert(k2, val.clone());
                        // delete branch
                        if can_delete(*v) && val.spent + 1 <= budget {
                            let mut k3 = key.clone();
                            k3.deleted.insert(*v);
                            let mut v3 = val.clone();
                            v3.spent += 1;
                            v3.settled |= member_mask[v];
                            v3.witness.insert(v.0);
                            table.insert(k3, v3);
                        }
                    }
                }
            }
            NiceOp::Forget(v) => {
                let child = &tables[node.children[0]];
                for (key, vals) in &child.states {
                    for val in vals {
                        if key.deleted.contains(v) {
                            let mut k2 = key.clone();
                            k2.deleted.remove(v);
                            table.insert(k2, val.clone());
                            continue;
                        }
                        let idx = key
                            .classes
                            .iter()
                            .position(|c| c.contains(v))
                            .expect("live bag node sits in a class");
                        let mut k2 = key.clone();
                        k2.classes[idx].remove(v);
                        let mut v2 = val.clone();
                        if k2.classes[idx].is_empty() {
                            let sealed_mask = k2.reach[idx];
                            k2.classes.remove(idx);
                            k2.reach.remove(idx);
                            let other: u32 = k2.reach.iter().fold(0, |a, m| a | m);
                            for i in 0..t {
                                let bit = 1u32 << i;
                                if sealed_mask & bit == 0 || v2.settled & bit != 0 {
                                    continue;
                                }
                                if k2.stranded & bit != 0 || other & bit != 0 {
                                    v2.settled |= bit;
                                } else {
                                    k2.stranded |= bit;
                                }
                            }
                        }
                        table.insert(k2, v2);
                    }
                }
            }
            NiceOp::IntroduceEdge(e) => {
                let (u, v) = g.endpoints(*e);
                let child = &tables[node.children[0]];
                for (key, vals) in &child.states {
                    for val in vals {
                        if inst.variant == Variant::Edge {
                            // cut branch
                            if val.spent + 1 <= budget {
                                let mut v2 = val.clone();
                                v2.spent += 1;
                                v2.witness.insert(e.0);
                                table.insert(key.clone(), v2);
                            }
                            table.insert(merge_classes(key, u, v), val.clone());
                        } else if key.deleted.contains(&u) || key.deleted.contains(&v) {
                            table.insert(key.clone(), val.clone());
                        } else {
                            table.insert(merge_classes(key, u, v), val.clone());
                        }
                    }
                }
            }
            NiceOp::Join => {
                let left = &tables[node.children[0]];
                let right = &tables[node.children[1]];
                for (kl, vls) in &left.states {
                    for (kr, vrs) in &right.states {
                        if kl.deleted != kr.deleted {
                            continue;
                        }
                        let merged = join_keys(kl, kr);
                        for vl in vls {
                            for vr in vrs {
                                let spent = vl.spent + vr.spent - kl.deleted.len();
                                if spent > budget {
                                    continue;
                                }
                                let key = merged.clone();
                                let val = StateVal {
                                    settled: vl.settled | vr.settled | (kl.stranded & kr.stranded),
                                    spent,
                                    witness: vl.witness.union(&vr.witness).copied().collect(),
                                };
                                table.insert(key, val);
                            }
                        }
                    }
                }
            }
        }
        tables.push(table);
    }

    let mut best: Option<(usize, BTreeSet<u32>)> = None;
    for (key, vals) in &tables[root].states {
        debug_assert!(key.classes.is_empty());
        for val in vals {
            if val.settled == full {
                let better = match &best {
                    None => true,
                    Some((s, w)) => (val.spent, &val.witness) < (*s, w),
                };
                if better {
                    best = Some((val.spent, val.witness.clone()));
                }
            }
        }
    }
    Ok(best.map(|(_, witness)| match inst.variant {
        Variant::Edge => CutSet::Edges(witness.into_iter().map(EdgeId).collect()),
        Variant::Node | Variant::RNode => CutSet::Nodes(witness.into_iter().map(NodeId).collect()),
    }))
}

fn merge_classes(key: &StateKey, u: NodeId, v: NodeId) -> StateKey {
    let iu = key.classes.iter().position(|c| c.contains(&u)).expect("u in a class");
    let iv = key.classes.iter().position(|c| c.contains(&v)).expect("v in a class");
    let mut k2 = key.clone();
    if iu != iv {
        let (lo, hi) = (iu.min(iv), iu.max(iv));
        let moved = k2.classes.remove(hi);
        let moved_reach = k2.reach.remove(hi);
        k2.classes[lo].extend(moved);
        k2.reach[lo] |= moved_reach;
    }
    k2
}

/// Union-find over the shared bag: classes from both sides glue wherever
/// they share a node.
fn join_keys(kl: &StateKey, kr: &StateKey) -> StateKey {
    let mut classes: Vec<BTreeSet<NodeId>> = kl.classes.clone();
    let mut reach: Vec<u32> = kl.reach.clone();
    for (rc, rr) in kr.classes.iter().zip(kr.reach.iter()) {
        let touching: Vec<usize> = (0..classes.len())
            .filter(|i| !classes[*i].is_disjoint(rc))
            .collect();
        let mut merged: BTreeSet<NodeId> = rc.clone();
        let mut mask = *rr;
        for &i in touching.iter().rev() {
            merged.extend(classes.remove(i));
            mask |= reach.remove(i);
        }
        classes.push(merged);
        reach.push(mask);
    }
    StateKey {
        deleted: kl.deleted.clone(),
        classes,
        reach,
        stranded: kl.stranded | kr.stranded,
    }
}
