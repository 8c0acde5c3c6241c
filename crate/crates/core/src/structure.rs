//! Structural checks over the consumption/production arc graph.
//!
//! Reset and zero-test edges never take part in these checks. Nodes are
//! numbered places first, then transitions, and the topological order
//! always picks the lowest-numbered ready node.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::net::{Net, Node, PlaceId, TransitionId};
use crate::semantics::NetView;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClaimedKind {
    Plain,
    Acyclic,
    Workflow { initial: String, final_place: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WorkflowViolation {
    ProductionIntoInitial(TransitionId),
    ConsumptionFromFinal(TransitionId),
    NotOnPath(Node),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowReport {
    pub initial: PlaceId,
    pub final_place: PlaceId,
    pub violations: Vec<WorkflowViolation>,
}

impl WorkflowReport {
    pub fn is_workflow(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub acyclic: bool,
    /// Every node, each arc pointing forward. Present iff `acyclic`.
    pub topo_order: Option<Vec<Node>>,
    /// A closed walk `n0, n1, ..., n0` along arcs. Present iff not `acyclic`.
    pub cycle: Option<Vec<Node>>,
    /// Present when a workflow shape was claimed.
    pub workflow: Option<WorkflowReport>,
    pub every_transition_consumes: bool,
    /// Whether the claimed kind holds.
    pub conforms: bool,
}

impl StructureReport {
    pub fn is_workflow(&self) -> bool {
        self.workflow.as_ref().is_some_and(WorkflowReport::is_workflow)
    }

    /// Places in topological order, when acyclic.
    pub fn place_order(&self) -> Option<Vec<PlaceId>> {
        self.topo_order.as_ref().map(|order| {
            order
                .iter()
                .filter_map(|n| match n {
                    Node::Place(p) => Some(*p),
                    Node::Transition(_) => None,
                })
                .collect()
        })
    }
}

/// Adjacency over the combined node numbering.
struct Graph {
    places: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Graph {
    fn new(net: &Net) -> Self {
        let places = net.place_count();
        let n = places + net.transition_count();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (ti, t) in net.transitions().iter().enumerate() {
            let tn = places + ti;
            for (p, _) in t.pre() {
                succ[p.0].push(tn);
                pred[tn].push(p.0);
            }
            for (p, _) in t.post() {
                succ[tn].push(p.0);
                pred[p.0].push(tn);
            }
        }
        for v in succ.iter_mut().chain(pred.iter_mut()) {
            v.sort_unstable();
        }
        Graph { places, succ, pred }
    }

    fn node(&self, i: usize) -> Node {
        if i < self.places {
            Node::Place(PlaceId(i))
        } else {
            Node::Transition(TransitionId(i - self.places))
        }
    }

    fn index(&self, n: Node) -> usize {
        match n {
            Node::Place(p) => p.0,
            Node::Transition(t) => self.places + t.0,
        }
    }

    /// Kahn's algorithm; `Err` carries a cycle when one exists.
    fn topo(&self) -> Result<Vec<usize>, Vec<usize>> {
        let n = self.succ.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node keeps a leftover predecessor, so walking
        // backwards from one must revisit a node.
        let left: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
        let start = (0..n).find(|&i| left[i]).expect("leftover node exists");
        let mut seen = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        while seen[v] == usize::MAX {
            seen[v] = walk.len();
            walk.push(v);
            v = *self.pred[v]
                .iter()
                .find(|&&u| left[u])
                .expect("leftover node has leftover predecessor");
        }
        let mut cycle: Vec<usize> = walk[seen[v]..].to_vec();
        cycle.reverse();
        let min_pos = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, &x)| x)
            .map(|(i, _)| i)
            .unwrap_or(0);
        cycle.rotate_left(min_pos);
        cycle.push(cycle[0]);
        Err(cycle)
    }

    fn reach(&self, from: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.succ.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            let next = if forward { &self.succ[v] } else { &self.pred[v] };
            for &w in next {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

fn check_workflow(net: &Net, g: &Graph, i: PlaceId, f: PlaceId) -> WorkflowReport {
    let mut violations = Vec::new();
    for (ti, t) in net.transitions().iter().enumerate() {
        if t.post_weight(i).is_some() {
            violations.push(WorkflowViolation::ProductionIntoInitial(TransitionId(ti)));
        }
        if t.pre_weight(f).is_some() {
            violations.push(WorkflowViolation::ConsumptionFromFinal(TransitionId(ti)));
        }
    }
    let fwd = g.reach(g.index(Node::Place(i)), true);
    let bwd = g.reach(g.index(Node::Place(f)), false);
    for v in 0..fwd.len() {
        if !(fwd[v] && bwd[v]) {
            violations.push(WorkflowViolation::NotOnPath(g.node(v)));
        }
    }
    WorkflowReport {
        initial: i,
        final_place: f,
        violations,
    }
}

/// Checks acyclicity, the workflow shape (if claimed) and whether every
/// transition consumes something.
pub fn validate_structure<'a>(
    net: impl Into<NetView<'a>>,
    claimed: &ClaimedKind,
) -> Result<StructureReport, StructureError> {
    let net = net.into().arcs();
    let g = Graph::new(net);
    let (acyclic, topo_order, cycle) = match g.topo() {
        Ok(order) => (true, Some(order.into_iter().map(|i| g.node(i)).collect()), None),
        Err(c) => (false, None, Some(c.into_iter().map(|i| g.node(i)).collect())),
    };
    let workflow = match claimed {
        ClaimedKind::Workflow {
            initial,
            final_place,
        } => {
            let i = net
                .place_id(initial)
                .ok_or_else(|| StructureError::UnknownPlace(initial.clone()))?;
            let f = net
                .place_id(final_place)
                .ok_or_else(|| StructureError::UnknownPlace(final_place.clone()))?;
            Some(check_workflow(net, &g, i, f))
        }
        _ => None,
    };
    let every_transition_consumes = net.transitions().iter().all(|t| !t.pre().is_empty());
    let conforms = match claimed {
        ClaimedKind::Plain => true,
        ClaimedKind::Acyclic => acyclic,
        ClaimedKind::Workflow { .. } => workflow.as_ref().is_some_and(WorkflowReport::is_workflow),
    };
    Ok(StructureReport {
        acyclic,
        topo_order,
        cycle,
        workflow,
        every_transition_consumes,
        conforms,
    })
}

/// Finds an `(i, f)` pair making `net` a workflow net, trying candidate
/// places in index order.
pub fn detect_workflow(net: &Net) -> Option<(PlaceId, PlaceId)> {
    let g = Graph::new(net);
    let sources: Vec<PlaceId> = net.places().filter(|p| g.pred[p.0].is_empty()).collect();
    let sinks: Vec<PlaceId> = net.places().filter(|p| g.succ[p.0].is_empty()).collect();
    for &i in &sources {
        for &f in &sinks {
            if check_workflow(net, &g, i, f).is_workflow() {
                return Some((i, f));
            }
        }
    }
    None
}
