//! Exhaustive reference solver for tiny instances.
//!
//! Every turbine picks a parent among its incoming candidate arcs; the search
//! enumerates all such choices depth first. Pruning is limited to partial
//! infeasibility (cycles, crossings, load caps, feeders, OSS balance) and an
//! admissible cost bound, so the result is exact.

use std::collections::HashMap;

use thiserror::Error;

use crate::costs::{CostModel, CostTable};
use crate::geometry::CrossingTest;
use crate::graph::{build_reduced_graph, knn_candidates, CandidateGraph, Node, NodeId};
use crate::model::{sigma_upper, ActiveArc, LayoutSolution, ModelOptions, SolveStatus};

/// Enumeration budget on the number of turbines.
pub const ORACLE_MAX_WT: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{0} turbines exceed the exhaustive budget of {ORACLE_MAX_WT}")]
    TooLarge(usize),
    #[error("no feasible layout exists")]
    NoFeasibleLayout,
}

struct Choice {
    tail: NodeId,
    /// Position of the tail in the WT order, or `None` for an OSS.
    tail_wt: Option<usize>,
    max_k: u32,
    min_cost: f64,
    /// Coefficient and cable per load, index `k - 1`.
    price: Vec<Option<(f64, Option<usize>)>>,
}

struct Search {
    wts: Vec<NodeId>,
    oss_pos: HashMap<NodeId, usize>,
    choices: Vec<Vec<Choice>>,
    /// `conflicts[j][c]` lists `(j', c')` pairs whose segments cross arc `(j, c)`.
    conflicts: Vec<Vec<Vec<(usize, usize)>>>,
    suffix_lb: Vec<f64>,
    max_feeders: usize,
    sigma_bound: u32,
    parent: Vec<Option<usize>>,
    sub: Vec<u32>,
    feeders: Vec<usize>,
    sigma: Vec<u32>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search {
    fn tail_of(&self, j: usize) -> Option<usize> {
        self.parent[j].and_then(|c| self.choices[j][c].tail_wt)
    }

    fn dfs(&mut self, j: usize, partial: f64) {
        if let Some((b, _)) = &self.best {
            if partial + self.suffix_lb[j] >= *b - 1e-12 * b.abs() {
                return;
            }
        }
        if j == self.wts.len() {
            self.leaf();
            return;
        }
        for c in 0..self.choices[j].len() {
            if self.feasible_to_add(j, c) {
                self.apply(j, c, true);
                let cost = self.choices[j][c].min_cost;
                self.dfs(j + 1, partial + cost);
                self.apply(j, c, false);
            }
        }
    }

    fn feasible_to_add(&self, j: usize, c: usize) -> bool {
        let ch = &self.choices[j][c];
        for &(j2, c2) in &self.conflicts[j][c] {
            if j2 < j && self.parent[j2] == Some(c2) {
                return false;
            }
        }
        // Cycle: walking up from the tail must not come back to j.
        let mut cur = ch.tail_wt;
        while let Some(w) = cur {
            if w == j {
                return false;
            }
            if self.parent[w].is_none() {
                break;
            }
            cur = self.tail_of(w);
        }
        // Loads along the chain that j's subtree joins.
        let add = self.sub[j];
        if add > ch.max_k {
            return false;
        }
        let mut cur = ch.tail_wt;
        while let Some(w) = cur {
            let Some(pc) = self.parent[w] else { break };
            if self.sub[w] + add > self.choices[w][pc].max_k {
                return false;
            }
            cur = self.choices[w][pc].tail_wt;
        }
        if let Some(root) = self.root_after(j, c) {
            let o = self.oss_pos[&root];
            let carried = self.sub[j];
            if self.sigma[o] + carried > self.sigma_bound {
                return false;
            }
            if ch.tail_wt.is_none() && self.feeders[o] + 1 > self.max_feeders {
                return false;
            }
        }
        true
    }

    /// OSS reached from arc `(j, c)` through assigned parents, if any.
    fn root_after(&self, j: usize, c: usize) -> Option<NodeId> {
        let mut ch = &self.choices[j][c];
        loop {
            match ch.tail_wt {
                None => return Some(ch.tail),
                Some(w) => ch = &self.choices[w][self.parent[w]?],
            }
        }
    }

    fn apply(&mut self, j: usize, c: usize, add: bool) {
        let root = self.root_after(j, c);
        let delta = self.sub[j];
        let mut cur = self.choices[j][c].tail_wt;
        while let Some(w) = cur {
            if add {
                self.sub[w] += delta;
            } else {
                self.sub[w] -= delta;
            }
            match self.parent[w] {
                Some(pc) => cur = self.choices[w][pc].tail_wt,
                None => break,
            }
        }
        if let Some(r) = root {
            let o = self.oss_pos[&r];
            let feeder = self.choices[j][c].tail_wt.is_none() as usize;
            if add {
                self.sigma[o] += delta;
                self.feeders[o] += feeder;
            } else {
                self.sigma[o] -= delta;
                self.feeders[o] -= feeder;
            }
        }
        self.parent[j] = if add { Some(c) } else { None };
    }

    fn leaf(&mut self) {
        let mut total = 0.0;
        for j in 0..self.wts.len() {
            let ch = &self.choices[j][self.parent[j].expect("all assigned")];
            match ch.price.get(self.sub[j] as usize - 1).copied().flatten() {
                Some((cost, _)) => total += cost,
                None => return,
            }
        }
        if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
            let picks = self.parent.iter().map(|p| p.unwrap()).collect();
            self.best = Some((total, picks));
        }
    }
}

/// Minimum-cost layout over `graph` priced by `table`, by exhaustive search.
pub fn oracle_solve(graph: &CandidateGraph, table: &CostTable, opts: ModelOptions) -> Result<LayoutSolution, OracleError> {
    let reduced = graph.reduced();
    let wts: Vec<NodeId> = reduced.wt_ids().collect();
    if wts.len() > ORACLE_MAX_WT {
        return Err(OracleError::TooLarge(wts.len()));
    }
    let wt_pos: HashMap<NodeId, usize> = wts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let oss_pos: HashMap<NodeId, usize> = reduced.oss_ids().enumerate().map(|(i, o)| (o, i)).collect();

    let mut choices: Vec<Vec<Choice>> = (0..wts.len()).map(|_| Vec::new()).collect();
    for a in graph.arcs() {
        let j = wt_pos[&a.head];
        let price: Vec<_> = (1..=table.u_max)
            .map(|k| table.get(a.tail, a.head, k).map(|e| (e.coefficient, e.cable)))
            .collect();
        let Some(max_k) = (1..=table.u_max).rev().find(|&k| price[k as usize - 1].is_some()) else { continue };
        let min_cost = price.iter().flatten().map(|p| p.0).fold(f64::INFINITY, f64::min);
        choices[j].push(Choice { tail: a.tail, tail_wt: wt_pos.get(&a.tail).copied(), max_k, min_cost, price });
    }
    if choices.iter().any(Vec::is_empty) {
        return Err(OracleError::NoFeasibleLayout);
    }

    let test = CrossingTest::default();
    let seg = |j: usize, c: &Choice| (reduced.node(c.tail).position, reduced.node(wts[j]).position, c.tail, wts[j]);
    let mut conflicts: Vec<Vec<Vec<(usize, usize)>>> =
        choices.iter().map(|cs| vec![Vec::new(); cs.len()]).collect();
    if opts.crossings {
        for j in 0..wts.len() {
            for (c, ch) in choices[j].iter().enumerate() {
                let (p1, p2, a, b) = seg(j, ch);
                for j2 in 0..wts.len() {
                    if j2 == j {
                        continue;
                    }
                    for (c2, ch2) in choices[j2].iter().enumerate() {
                        let (q1, q2, u, v) = seg(j2, ch2);
                        if a == u || a == v || b == u || b == v {
                            continue;
                        }
                        if test.segments_cross(p1, p2, q1, q2) {
                            conflicts[j][c].push((j2, c2));
                        }
                    }
                }
            }
        }
    }

    let mut suffix_lb = vec![0.0; wts.len() + 1];
    for j in (0..wts.len()).rev() {
        let lb = choices[j].iter().map(|c| c.min_cost).fold(f64::INFINITY, f64::min);
        suffix_lb[j] = suffix_lb[j + 1] + lb;
    }

    let n_oss = reduced.n_oss();
    let mut s = Search {
        wts: wts.clone(),
        oss_pos,
        choices,
        conflicts,
        suffix_lb,
        max_feeders: opts.max_feeders as usize,
        sigma_bound: sigma_upper(wts.len(), n_oss, opts.oss_balance) as u32,
        parent: vec![None; wts.len()],
        sub: vec![1; wts.len()],
        feeders: vec![0; n_oss],
        sigma: vec![0; n_oss],
        best: None,
    };
    s.dfs(0, 0.0);
    let (objective, picks) = s.best.take().ok_or(OracleError::NoFeasibleLayout)?;

    // Rebuild loads from the chosen parents.
    let parent_of = |j: usize| s.choices[j][picks[j]].tail_wt;
    let mut load = vec![0u32; wts.len()];
    for j in 0..wts.len() {
        let mut cur = Some(j);
        while let Some(w) = cur {
            load[w] += 1;
            cur = parent_of(w);
        }
    }
    let mut arcs = Vec::new();
    let mut sigma: HashMap<NodeId, u32> = reduced.oss_ids().map(|o| (o, 0)).collect();
    for j in 0..wts.len() {
        let ch = &s.choices[j][picks[j]];
        let (cost, cable) = ch.price[load[j] as usize - 1].expect("checked at the leaf");
        arcs.push(ActiveArc { tail: ch.tail, head: wts[j], k: load[j], cable, cost });
        if ch.tail_wt.is_none() {
            *sigma.get_mut(&ch.tail).unwrap() += load[j];
        }
    }
    let mut sigma: Vec<_> = sigma.into_iter().collect();
    sigma.sort_unstable();
    Ok(LayoutSolution { arcs, sigma, objective, best_bound: Some(objective), status: SolveStatus::Optimal })
}

/// Oracle over the full reduced graph of `nodes`.
pub fn oracle_solve_instance(nodes: &[Node], costs: &CostModel, opts: ModelOptions) -> Result<LayoutSolution, OracleError> {
    let reduced = build_reduced_graph(nodes).map_err(|_| OracleError::NoFeasibleLayout)?;
    let n_wt = reduced.n_wt();
    if n_wt > ORACLE_MAX_WT {
        return Err(OracleError::TooLarge(n_wt));
    }
    let graph = knn_candidates(&reduced, n_wt.saturating_sub(1).max(1));
    let table = crate::costs::build_cost_table(&graph, costs, false);
    oracle_solve(&graph, &table, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::ObjectiveMode;
    use crate::electrical::{CableType, LineModel, SystemParams};
    use crate::validate::{validate_layout, Limits};

    fn costs(caps: &[(u32, f64)], mode: ObjectiveMode) -> CostModel {
        let sys = SystemParams {
            nominal_voltage_v: 33e3,
            turbine_power_w: 3e6,
            lifetime_years: 1,
            discount_rate: 0.0,
            energy_price_per_mwh: 0.0,
        };
        let cables = caps.iter().enumerate().map(|(i, &(u, c))| CableType::simple(&format!("c{i}"), u, c)).collect();
        CostModel::new(cables, sys, LineModel::default(), mode, None, 1e6).unwrap()
    }

    #[test]
    fn chain_on_a_line() {
        let nodes = [Node::oss(1, 0.0, 0.0), Node::wt(2, 1000.0, 0.0), Node::wt(3, 2000.0, 0.0)];
        let sol = oracle_solve_instance(&nodes, &costs(&[(2, 1.0)], ObjectiveMode::L), ModelOptions::default()).unwrap();
        let mut arcs = sol.arc_keys();
        arcs.sort();
        assert_eq!(arcs, vec![(1, 2), (2, 3)]);
        assert!((sol.objective - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn unit_capacity_forces_a_star() {
        let nodes = [Node::oss(1, 0.0, 0.0), Node::wt(2, 1000.0, 0.0), Node::wt(3, 2000.0, 0.0)];
        let sol = oracle_solve_instance(&nodes, &costs(&[(1, 1.0)], ObjectiveMode::L), ModelOptions::default()).unwrap();
        let mut arcs = sol.arc_keys();
        arcs.sort();
        assert_eq!(arcs, vec![(1, 2), (1, 3)]);
        assert_eq!(sol.sigma, vec![(1, 2)]);
    }

    #[test]
    fn feeder_limit_can_make_it_infeasible() {
        let nodes = [Node::oss(1, 0.0, 0.0), Node::wt(2, 1000.0, 0.0), Node::wt(3, 0.0, 1000.0)];
        let opts = ModelOptions { max_feeders: 1, ..Default::default() };
        assert_eq!(
            oracle_solve_instance(&nodes, &costs(&[(1, 1.0)], ObjectiveMode::I), opts).unwrap_err(),
            OracleError::NoFeasibleLayout
        );
    }

    #[test]
    fn too_large() {
        let mut nodes = vec![Node::oss(1, 0.0, 0.0)];
        nodes.extend((0..10).map(|i| Node::wt(i + 2, 100.0 * (i + 1) as f64, 7.0 * i as f64)));
        assert_eq!(
            oracle_solve_instance(&nodes, &costs(&[(3, 1.0)], ObjectiveMode::I), ModelOptions::default()).unwrap_err(),
            OracleError::TooLarge(10)
        );
    }

    #[test]
    fn result_validates() {
        let nodes = [
            Node::oss(1, 0.0, 0.0),
            Node::wt(2, 1000.0, 200.0),
            Node::wt(3, 1800.0, -300.0),
            Node::wt(4, 900.0, 1200.0),
            Node::wt(5, -700.0, 800.0),
            Node::wt(6, 2500.0, 600.0),
        ];
        let cm = costs(&[(2, 0.3), (4, 0.5)], ObjectiveMode::I);
        let opts = ModelOptions { max_feeders: 2, ..Default::default() };
        let sol = oracle_solve_instance(&nodes, &cm, opts).unwrap();
        let graph = knn_candidates(&build_reduced_graph(&nodes).unwrap(), 4);
        let v = validate_layout(
            &sol,
            &graph,
            Limits { u_max: 4, max_feeders: 2, oss_balance: 1.0, costs: Some(&cm) },
        );
        assert!(v.is_empty(), "{v:?}");
        let sum: f64 = sol.arcs.iter().map(|a| a.cost).sum();
        assert!((sum - sol.objective).abs() < 1e-12);
    }
}
