//! Instance graph: nodes, the reduced arc set, nearest-neighbor candidate
//! arcs and crossing pairs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::geometry::{CrossingTest, Point};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Oss,
    Wt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: Point,
}

impl Node {
    pub fn oss(id: NodeId, x: f64, y: f64) -> Self {
        Self { id, kind: NodeKind::Oss, position: Point::new(x, y) }
    }

    pub fn wt(id: NodeId, x: f64, y: f64) -> Self {
        Self { id, kind: NodeKind::Wt, position: Point::new(x, y) }
    }
}

/// A directed arc `tail -> head` (power flows from head towards tail).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub length_m: f64,
}

impl Arc {
    pub fn key(&self) -> (NodeId, NodeId) {
        (self.tail, self.head)
    }

    pub fn undirected(&self) -> EdgeKey {
        EdgeKey::new(self.tail, self.head)
    }
}

/// Unordered node pair, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub a: NodeId,
    pub b: NodeId,
}

impl EdgeKey {
    pub fn new(i: NodeId, j: NodeId) -> Self {
        if i <= j {
            Self { a: i, b: j }
        } else {
            Self { a: j, b: i }
        }
    }

    pub fn shares_endpoint(&self, other: &EdgeKey) -> bool {
        self.a == other.a || self.a == other.b || self.b == other.a || self.b == other.b
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("nodes {0} and {1} share the same position")]
    DuplicatePosition(NodeId, NodeId),
    #[error("need at least one OSS and two WTs (got {oss} OSS, {wt} WT)")]
    TooFewNodes { oss: usize, wt: usize },
    #[error("node ids must be 1..=n with OSSs first; offending id {0}")]
    BadNumbering(NodeId),
}

/// Node set plus the reduced arc set: every OSS->WT and WT->WT arc.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    nodes: Vec<Node>,
    n_oss: usize,
    arcs: Vec<Arc>,
}

/// Builds the reduced graph. Arcs are sorted by `(tail, head)`.
pub fn build_reduced_graph(nodes: &[Node]) -> Result<ReducedGraph, GraphError> {
    let n_oss = nodes.iter().filter(|n| n.kind == NodeKind::Oss).count();
    let n_wt = nodes.len() - n_oss;
    if n_oss < 1 || n_wt < 2 {
        return Err(GraphError::TooFewNodes { oss: n_oss, wt: n_wt });
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by_key(|n| n.id);
    for (idx, n) in sorted.iter().enumerate() {
        let expected_kind = if idx < n_oss { NodeKind::Oss } else { NodeKind::Wt };
        if n.id as usize != idx + 1 || n.kind != expected_kind {
            return Err(GraphError::BadNumbering(n.id));
        }
    }
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if a.position == b.position {
                return Err(GraphError::DuplicatePosition(a.id, b.id));
            }
        }
    }

    let mut arcs = Vec::with_capacity(n_oss * n_wt + n_wt * (n_wt - 1));
    for tail in &sorted {
        for head in &sorted[n_oss..] {
            if tail.id != head.id {
                arcs.push(Arc {
                    tail: tail.id,
                    head: head.id,
                    length_m: tail.position.distance(head.position),
                });
            }
        }
    }
    Ok(ReducedGraph { nodes: sorted, n_oss, arcs })
}

impl ReducedGraph {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn n_oss(&self) -> usize {
        self.n_oss
    }

    pub fn n_wt(&self) -> usize {
        self.nodes.len() - self.n_oss
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize - 1]
    }

    pub fn is_oss(&self, id: NodeId) -> bool {
        (id as usize) <= self.n_oss
    }

    pub fn oss_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        1..=self.n_oss as NodeId
    }

    pub fn wt_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (self.n_oss as NodeId + 1)..=(self.nodes.len() as NodeId)
    }
}

/// The candidate arc set for a given neighbor count, with its crossing pairs.
#[derive(Debug, Clone)]
pub struct CandidateGraph {
    base: ReducedGraph,
    pub upsilon: usize,
    arcs: Vec<Arc>,
    arc_set: HashSet<(NodeId, NodeId)>,
    pub crossing_pairs: Vec<(EdgeKey, EdgeKey)>,
}

/// Keeps all OSS->WT arcs and, for every WT, arcs to its `upsilon` nearest
/// WTs (ties by ascending id). Crossing pairs are enumerated on the result.
pub fn knn_candidates(reduced: &ReducedGraph, upsilon: usize) -> CandidateGraph {
    knn_candidates_with(reduced, upsilon, CrossingTest::default(), Execution::default())
}

pub fn knn_candidates_with(
    reduced: &ReducedGraph,
    upsilon: usize,
    test: CrossingTest,
    exec: Execution,
) -> CandidateGraph {
    let upsilon = upsilon.max(1);
    let wt_ids: Vec<NodeId> = reduced.wt_ids().collect();
    let mut arcs: Vec<Arc> = reduced
        .arcs()
        .iter()
        .filter(|a| reduced.is_oss(a.tail))
        .copied()
        .collect();

    let per_wt = exec::map_collect(exec, &wt_ids, |&i| {
        let pi = reduced.node(i).position;
        let mut near: Vec<(f64, NodeId)> = wt_ids
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| (pi.distance(reduced.node(j).position), j))
            .collect();
        near.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        near.truncate(upsilon);
        let mut out: Vec<Arc> = near
            .into_iter()
            .map(|(d, j)| Arc { tail: i, head: j, length_m: d })
            .collect();
        out.sort_by_key(|a| a.head);
        out
    });
    arcs.extend(per_wt.into_iter().flatten());
    arcs.sort_by_key(|a| (a.tail, a.head));

    let arc_set = arcs.iter().map(|a| a.key()).collect();
    let mut graph = CandidateGraph {
        base: reduced.clone(),
        upsilon,
        arcs,
        arc_set,
        crossing_pairs: Vec::new(),
    };
    graph.crossing_pairs = enumerate_crossings_with(&graph, test, exec);
    graph
}

impl CandidateGraph {
    pub fn reduced(&self) -> &ReducedGraph {
        &self.base
    }

    pub fn nodes(&self) -> &[Node] {
        self.base.nodes()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn upsilon(&self) -> usize {
        self.upsilon
    }

    pub fn contains(&self, tail: NodeId, head: NodeId) -> bool {
        self.arc_set.contains(&(tail, head))
    }

    pub fn arc_keys(&self) -> &HashSet<(NodeId, NodeId)> {
        &self.arc_set
    }

    pub fn n_oss(&self) -> usize {
        self.base.n_oss()
    }

    pub fn n_wt(&self) -> usize {
        self.base.n_wt()
    }

    pub fn is_oss(&self, id: NodeId) -> bool {
        self.base.is_oss(id)
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.base.node(id).position
    }

    /// True when the candidate set is the whole reduced arc set.
    pub fn is_complete(&self) -> bool {
        self.arcs.len() == self.base.arcs().len()
    }

    /// Distinct undirected keys of the candidate arcs, sorted.
    pub fn edge_keys(&self) -> Vec<EdgeKey> {
        let mut keys: Vec<EdgeKey> = self.arcs.iter().map(|a| a.undirected()).collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

/// Enumerates crossing pairs of undirected candidate edges. Each pair is
/// reported once, ordered `(first, second)` with `first < second`, and the
/// list is sorted.
pub fn enumerate_crossings(graph: &CandidateGraph) -> Vec<(EdgeKey, EdgeKey)> {
    enumerate_crossings_with(graph, CrossingTest::default(), Execution::default())
}

pub fn enumerate_crossings_with(
    graph: &CandidateGraph,
    test: CrossingTest,
    exec: Execution,
) -> Vec<(EdgeKey, EdgeKey)> {
    let keys = graph.edge_keys();
    let segs: Vec<(Point, Point)> =
        keys.iter().map(|k| (graph.position(k.a), graph.position(k.b))).collect();
    // Bounding boxes, padded so touching boxes are not culled.
    let pad = test.area_tol.sqrt().max(1e-9);
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|(p, q)| [p.x.min(q.x) - pad, p.x.max(q.x) + pad, p.y.min(q.y) - pad, p.y.max(q.y) + pad])
        .collect();

    let per_key = exec::map_range(exec, keys.len(), |i| {
        let mut found = Vec::new();
        let bi = boxes[i];
        for j in i + 1..keys.len() {
            let bj = boxes[j];
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            if keys[i].shares_endpoint(&keys[j]) {
                continue;
            }
            let (p1, p2) = segs[i];
            let (q1, q2) = segs[j];
            if test.segments_cross(p1, p2, q1, q2) {
                found.push((keys[i], keys[j]));
            }
        }
        found
    });
    // Keys are sorted and j > i, so the flattened list is already canonical.
    per_key.into_iter().flatten().collect()
}
