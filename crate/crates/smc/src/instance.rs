//! Problem instances, cut verification, trivial preprocessing and the
//! on-disk text format.
//!
//! Format, one directive per line, `#` starts a comment:
//!
//! ```text
//! variant edge|node|rnode
//! nodes N            # nodes get ids 1..N
//! edge u v           # repeatable; parallel edges allowed
//! terms v1 v2 ...    # one line per terminal set, at least two nodes
//! k K
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::SmcError;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Variant {
    Edge,
    Node,
    RNode,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Edge => "edge",
            Variant::Node => "node",
            Variant::RNode => "rnode",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A proposed multicut: edge ids or node ids, depending on the variant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CutSet {
    Edges(BTreeSet<EdgeId>),
    Nodes(BTreeSet<NodeId>),
}

impl CutSet {
    pub fn len(&self) -> usize {
        match self {
            CutSet::Edges(s) => s.len(),
            CutSet::Nodes(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> Option<&BTreeSet<EdgeId>> {
        match self {
            CutSet::Edges(s) => Some(s),
            CutSet::Nodes(_) => None,
        }
    }

    pub fn nodes(&self) -> Option<&BTreeSet<NodeId>> {
        match self {
            CutSet::Nodes(s) => Some(s),
            CutSet::Edges(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: MultiGraph,
    pub variant: Variant,
    pub terminal_sets: Vec<BTreeSet<NodeId>>,
    pub budget: usize,
}

impl Instance {
    pub fn new(
        graph: MultiGraph,
        variant: Variant,
        terminal_sets: Vec<BTreeSet<NodeId>>,
        budget: usize,
    ) -> Result<Self, SmcError> {
        for set in &terminal_sets {
            if set.len() < 2 {
                return Err(SmcError::InvalidArgument("singleton terminal set".into()));
            }
            for v in set {
                if !graph.contains_node(*v) {
                    return Err(SmcError::InvalidArgument(format!("terminal {v} is not a node")));
                }
            }
        }
        Ok(Instance {
            graph,
            variant,
            terminal_sets,
            budget,
        })
    }

    pub fn num_sets(&self) -> usize {
        self.terminal_sets.len()
    }

    pub fn max_set_size(&self) -> usize {
        self.terminal_sets.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn terminals(&self) -> BTreeSet<NodeId> {
        self.terminal_sets.iter().flatten().copied().collect()
    }
}

/// True iff `set` has two members in different components of `graph`
/// minus the cut. Checks reachability from one fixed terminal only; a set
/// is connected exactly when all members reach the first one.
pub fn set_is_cut(graph: &MultiGraph, set: &BTreeSet<NodeId>, cut: &CutSet) -> bool {
    match cut {
        CutSet::Edges(edges) => {
            let x = *set.iter().next().expect("terminal sets are non-empty");
            let reach = graph.reachable(&BTreeSet::from([x]), edges);
            set.iter().any(|v| !reach.contains(v))
        }
        CutSet::Nodes(nodes) => {
            if set.iter().any(|v| nodes.contains(v)) {
                // a deleted terminal has no paths at all
                return true;
            }
            let g = graph.delete_nodes(nodes);
            let x = *set.iter().next().expect("terminal sets are non-empty");
            let reach = g.reachable(&BTreeSet::from([x]), &BTreeSet::new());
            set.iter().any(|v| !reach.contains(v))
        }
    }
}

/// True iff the cut has size at most `budget` and separates some pair from
/// every terminal set.
pub fn verify_cut(inst: &Instance, cut: &CutSet) -> Result<bool, SmcError> {
    match (inst.variant, cut) {
        (Variant::Edge, CutSet::Edges(edges)) => {
            for e in edges {
                if !inst.graph.contains_edge(*e) {
                    return Err(SmcError::InvalidArgument(format!("cut edge {e} is not in the graph")));
                }
            }
        }
        (Variant::Node, CutSet::Nodes(nodes)) | (Variant::RNode, CutSet::Nodes(nodes)) => {
            for v in nodes {
                if !inst.graph.contains_node(*v) {
                    return Err(SmcError::InvalidArgument(format!("cut node {v} is not in the graph")));
                }
            }
            if inst.variant == Variant::RNode {
                let terminals = inst.terminals();
                if nodes.iter().any(|v| terminals.contains(v)) {
                    return Err(SmcError::InvalidArgument(
                        "restricted-node cut may not delete terminals".into(),
                    ));
                }
            }
        }
        _ => {
            return Err(SmcError::InvalidArgument(format!(
                "cut kind does not match variant {}",
                inst.variant
            )))
        }
    }
    if cut.len() > inst.budget {
        return Ok(false);
    }
    Ok(inst.terminal_sets.iter().all(|set| set_is_cut(&inst.graph, set, cut)))
}

#[derive(Clone, Debug)]
pub enum TrivialOutcome {
    Yes,
    No,
    Reduced(Instance),
}

/// Preprocessing: drop terminal sets that are already disconnected, answer
/// node-variant instances with t <= k, and reject k = 0 with demands left.
pub fn apply_trivial_rules(inst: &Instance) -> TrivialOutcome {
    let parts = inst.graph.components();
    let mut kept = Vec::new();
    for set in &inst.terminal_sets {
        let first_block = parts.block_of(*set.iter().next().unwrap());
        if set.iter().all(|v| parts.block_of(*v) == first_block) {
            kept.push(set.clone());
        }
    }
    if kept.is_empty() {
        return TrivialOutcome::Yes;
    }
    if inst.variant == Variant::Node && kept.len() <= inst.budget {
        return TrivialOutcome::Yes;
    }
    if inst.budget == 0 {
        return TrivialOutcome::No;
    }
    TrivialOutcome::Reduced(Instance {
        graph: inst.graph.clone(),
        variant: inst.variant,
        terminal_sets: kept,
        budget: inst.budget,
    })
}

/// Pendant transformation: every terminal gets a fresh pendant neighbor
/// which replaces it in all terminal sets. Turns a node instance into an
/// equivalent restricted-node instance with the same k, t, p.
pub fn node_to_rnode(inst: &Instance) -> Result<Instance, SmcError> {
    if inst.variant != Variant::Node {
        return Err(SmcError::InvalidArgument("node_to_rnode expects a node-variant instance".into()));
    }
    let mut graph = inst.graph.clone();
    let mut pendant = std::collections::BTreeMap::new();
    for v in inst.terminals() {
        let p = graph.add_node();
        graph.add_edge(v, p);
        pendant.insert(v, p);
    }
    let terminal_sets = inst
        .terminal_sets
        .iter()
        .map(|set| set.iter().map(|v| pendant[v]).collect())
        .collect();
    Instance::new(graph, Variant::RNode, terminal_sets, inst.budget)
}

pub fn parse(text: &str) -> Result<Instance, SmcError> {
    let mut variant: Option<Variant> = None;
    let mut graph: Option<MultiGraph> = None;
    let mut node_count = 0u32;
    let mut terminal_sets: Vec<BTreeSet<NodeId>> = Vec::new();
    let mut budget: Option<usize> = None;

    let err = |line: usize, msg: &str| SmcError::Parse {
        line,
        message: msg.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap();
        match directive {
            "variant" => {
                let v = tokens.next().ok_or_else(|| err(line_no, "variant needs a value"))?;
                let v = match v {
                    "edge" => Variant::Edge,
                    "node" => Variant::Node,
                    "rnode" => Variant::RNode,
                    other => return Err(err(line_no, &format!("unknown variant '{other}'"))),
                };
                if variant.replace(v).is_some() {
                    return Err(err(line_no, "duplicate variant directive"));
                }
            }
            "nodes" => {
                let n: u32 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "nodes needs a count"))?;
                if graph.is_some() {
                    return Err(err(line_no, "duplicate nodes directive"));
                }
                node_count = n;
                graph = Some(MultiGraph::with_node_ids((1..=n).map(NodeId)));
            }
            "edge" => {
                let g = graph.as_mut().ok_or_else(|| err(line_no, "edge before nodes directive"))?;
                let u: u32 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "edge needs two endpoints"))?;
                let v: u32 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "edge needs two endpoints"))?;
                if u == 0 || v == 0 || u > node_count || v > node_count {
                    return Err(err(line_no, "edge endpoint out of range"));
                }
                g.add_edge(NodeId(u), NodeId(v));
            }
            "terms" => {
                if graph.is_none() {
                    return Err(err(line_no, "terms before nodes directive"));
                }
                let mut set = BTreeSet::new();
                for t in tokens.by_ref() {
                    let v: u32 = t.parse().map_err(|_| err(line_no, "bad terminal id"))?;
                    if v == 0 || v > node_count {
                        return Err(err(line_no, "terminal out of range"));
                    }
                    set.insert(NodeId(v));
                }
                if set.len() < 2 {
                    return Err(err(line_no, "singleton terminal set"));
                }
                terminal_sets.push(set);
            }
            "k" => {
                let k: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "k needs a value"))?;
                if budget.replace(k).is_some() {
                    return Err(err(line_no, "duplicate k directive"));
                }
            }
            other => return Err(err(line_no, &format!("unknown directive '{other}'"))),
        }
        if let Some(extra) = tokens.next() {
            if directive != "terms" {
                return Err(err(line_no, &format!("trailing token '{extra}'")));
            }
        }
    }

    let variant = variant.ok_or_else(|| err(0, "missing variant directive"))?;
    let graph = graph.ok_or_else(|| err(0, "missing nodes directive"))?;
    let budget = budget.ok_or_else(|| err(0, "missing k directive"))?;
    Instance::new(graph, variant, terminal_sets, budget)
}

/// Canonical text form: nodes are renumbered 1..N in id order, edges are
/// emitted in edge-id order.
pub fn serialize(inst: &Instance) -> String {
    let mut out = String::new();
    let nodes: Vec<NodeId> = inst.graph.nodes().collect();
    let index = |v: NodeId| nodes.iter().position(|x| *x == v).unwrap() + 1;
    out.push_str(&format!("variant {}\n", inst.variant));
    out.push_str(&format!("nodes {}\n", nodes.len()));
    for e in inst.graph.edge_ids() {
        let (u, v) = inst.graph.endpoints(e);
        out.push_str(&format!("edge {} {}\n", index(u), index(v)));
    }
    for set in &inst.terminal_sets {
        let ids: Vec<String> = set.iter().map(|v| index(*v).to_string()).collect();
        out.push_str(&format!("terms {}\n", ids.join(" ")));
    }
    out.push_str(&format!("k {}\n", inst.budget));
    out
}
