//! Independent audit of a layout, without the MILP.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::costs::CostModel;
use crate::geometry::CrossingTest;
use crate::graph::{CandidateGraph, NodeId};
use crate::model::{sigma_upper, LayoutSolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownArc { tail: NodeId, head: NodeId },
    InDegree { node: NodeId, count: usize },
    Cycle { node: NodeId },
    LoadMismatch { tail: NodeId, head: NodeId, k: u32, subtree: u32 },
    LoadAboveLimit { tail: NodeId, head: NodeId, k: u32, limit: u32 },
    CableUndersized { tail: NodeId, head: NodeId, k: u32, cable: Option<usize> },
    Crossing { first: (NodeId, NodeId), second: (NodeId, NodeId) },
    TooManyFeeders { oss: NodeId, count: usize, limit: u32 },
    SigmaMismatch { oss: NodeId, reported: u32, actual: u32 },
    SigmaAboveBound { oss: NodeId, sigma: u32, bound: u32 },
    SigmaSum { sum: u32, expected: u32 },
}

/// Audit parameters.
#[derive(Debug, Clone, Copy)]
pub struct Limits<'a> {
    pub u_max: u32,
    pub max_feeders: u32,
    pub oss_balance: f64,
    /// When present, cable ratings are checked against the arc power.
    pub costs: Option<&'a CostModel>,
}

/// Checks radiality, loads, capacities, crossings, feeders and OSS balance.
/// Returns every violation found; an empty list means the layout is sound.
pub fn validate_layout(layout: &LayoutSolution, graph: &CandidateGraph, limits: Limits<'_>) -> Vec<Violation> {
    let mut out = Vec::new();
    let reduced = graph.reduced();
    let n_wt = reduced.n_wt();
    let ids: HashSet<NodeId> = reduced.nodes().iter().map(|n| n.id).collect();

    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut indeg: HashMap<NodeId, usize> = HashMap::new();
    let mut children: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for a in &layout.arcs {
        let known = ids.contains(&a.tail) && ids.contains(&a.head) && !reduced.is_oss(a.head) && a.tail != a.head;
        if !known || !graph.contains(a.tail, a.head) {
            out.push(Violation::UnknownArc { tail: a.tail, head: a.head });
            if !known {
                continue;
            }
        }
        *indeg.entry(a.head).or_default() += 1;
        parent.insert(a.head, a.tail);
        children.entry(a.tail).or_default().push(a.head);
    }
    for j in reduced.wt_ids() {
        let count = indeg.get(&j).copied().unwrap_or(0);
        if count != 1 {
            out.push(Violation::InDegree { node: j, count });
        }
    }

    // Walk up parents; a WT that never reaches an OSS sits on a cycle.
    let mut rooted: HashMap<NodeId, bool> = HashMap::new();
    for j in reduced.wt_ids() {
        let mut path = Vec::new();
        let mut seen = HashSet::new();
        let mut cur = j;
        let ok = loop {
            if reduced.is_oss(cur) {
                break true;
            }
            if let Some(&r) = rooted.get(&cur) {
                break r;
            }
            if !seen.insert(cur) {
                break false;
            }
            path.push(cur);
            match parent.get(&cur) {
                Some(&p) => cur = p,
                None => break true,
            }
        };
        for p in path {
            rooted.insert(p, ok);
        }
        if !ok {
            out.push(Violation::Cycle { node: j });
        }
    }

    // Subtree sizes on the acyclic part.
    let mut size: HashMap<NodeId, u32> = HashMap::new();
    fn subtree(
        n: NodeId,
        children: &HashMap<NodeId, Vec<NodeId>>,
        size: &mut HashMap<NodeId, u32>,
        guard: &mut HashSet<NodeId>,
    ) -> u32 {
        if let Some(&s) = size.get(&n) {
            return s;
        }
        if !guard.insert(n) {
            return 0;
        }
        let s = 1 + children.get(&n).map_or(0, |cs| cs.iter().map(|&c| subtree(c, children, size, guard)).sum());
        size.insert(n, s);
        s
    }
    let mut guard = HashSet::new();
    for a in &layout.arcs {
        if !ids.contains(&a.head) || reduced.is_oss(a.head) {
            continue;
        }
        if rooted.get(&a.head) == Some(&false) {
            continue;
        }
        let s = subtree(a.head, &children, &mut size, &mut guard);
        if s != a.k {
            out.push(Violation::LoadMismatch { tail: a.tail, head: a.head, k: a.k, subtree: s });
        }
        let limit = if reduced.is_oss(a.tail) { limits.u_max } else { limits.u_max.saturating_sub(1) };
        if a.k > limit {
            out.push(Violation::LoadAboveLimit { tail: a.tail, head: a.head, k: a.k, limit });
        }
        if let Some(cm) = limits.costs {
            let ok = match a.cable {
                Some(t) if t < cm.cables.len() => {
                    let d = reduced.node(a.tail).position.distance(reduced.node(a.head).position);
                    cm.supports(t, a.k, d)
                }
                _ => false,
            };
            if !ok {
                out.push(Violation::CableUndersized { tail: a.tail, head: a.head, k: a.k, cable: a.cable });
            }
        }
    }

    // Geometric crossings, independent of the precomputed pair list.
    let test = CrossingTest::default();
    let known: Vec<_> = layout.arcs.iter().filter(|a| ids.contains(&a.tail) && ids.contains(&a.head)).collect();
    for (x, a) in known.iter().enumerate() {
        for b in &known[x + 1..] {
            let shared = a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head;
            if shared {
                continue;
            }
            let (p1, p2) = (reduced.node(a.tail).position, reduced.node(a.head).position);
            let (q1, q2) = (reduced.node(b.tail).position, reduced.node(b.head).position);
            if test.segments_cross(p1, p2, q1, q2) {
                out.push(Violation::Crossing { first: (a.tail, a.head), second: (b.tail, b.head) });
            }
        }
    }

    let bound = sigma_upper(n_wt, reduced.n_oss(), limits.oss_balance) as u32;
    let reported: HashMap<NodeId, u32> = layout.sigma.iter().copied().collect();
    let mut total = 0;
    for oss in reduced.oss_ids() {
        let feeders: Vec<_> = layout.arcs.iter().filter(|a| a.tail == oss).collect();
        if feeders.len() > limits.max_feeders as usize {
            out.push(Violation::TooManyFeeders { oss, count: feeders.len(), limit: limits.max_feeders });
        }
        let actual: u32 = feeders.iter().map(|a| a.k).sum();
        total += actual;
        if let Some(&r) = reported.get(&oss) {
            if r != actual {
                out.push(Violation::SigmaMismatch { oss, reported: r, actual });
            }
        }
        if actual > bound {
            out.push(Violation::SigmaAboveBound { oss, sigma: actual, bound });
        }
    }
    if total != n_wt as u32 {
        out.push(Violation::SigmaSum { sum: total, expected: n_wt as u32 });
    }
    out
}
