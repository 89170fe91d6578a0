#![allow(dead_code)]

use owf_core::costs::{CostModel, ObjectiveMode};
use owf_core::electrical::{CableType, LineModel, SystemParams};
use owf_core::graph::{build_reduced_graph, knn_candidates, CandidateGraph, Node};
use owf_core::model::{build_model, extract_solution, LayoutSolution, ModelOptions};
use owf_core::solver::{Backend, HighsBackend, SolveOptions};
use owf_core::validate::{validate_layout, Limits, Violation};
use owf_core::{build_cost_table, SolveStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sys() -> SystemParams {
    SystemParams {
        nominal_voltage_v: 33e3,
        turbine_power_w: 3e6,
        lifetime_years: 25,
        discount_rate: 0.0,
        energy_price_per_mwh: 0.0,
    }
}

pub fn cost_model(caps: [(u32, f64); 2]) -> CostModel {
    let cables = caps.iter().enumerate().map(|(i, &(u, c))| CableType::simple(&format!("c{i}"), u, c)).collect();
    CostModel::new(cables, sys(), LineModel::default(), ObjectiveMode::I, None, 1.0).unwrap()
}

/// A small random farm: one OSS at the origin and `n_wt` turbines in a 4 km box.
pub struct SmallCase {
    pub nodes: Vec<Node>,
    pub costs: CostModel,
    pub opts: ModelOptions,
}

pub fn small_case(seed: u64, n_wt: usize, phi: u32, caps: [(u32, f64); 2]) -> SmallCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![Node::oss(1, 0.0, 0.0)];
    for i in 0..n_wt {
        nodes.push(Node::wt(i as u32 + 2, rng.random_range(-2000.0..2000.0), rng.random_range(-2000.0..2000.0)));
    }
    SmallCase {
        nodes,
        costs: cost_model(caps),
        opts: ModelOptions { max_feeders: phi, ..Default::default() },
    }
}

pub fn full_graph(nodes: &[Node]) -> CandidateGraph {
    let reduced = build_reduced_graph(nodes).unwrap();
    let n = reduced.n_wt();
    knn_candidates(&reduced, n.saturating_sub(1).max(1))
}

pub fn limits<'a>(costs: &'a CostModel, opts: &ModelOptions) -> Limits<'a> {
    Limits { u_max: costs.u_max(), max_feeders: opts.max_feeders, oss_balance: opts.oss_balance, costs: Some(costs) }
}

/// Solves to proven optimality with HiGHS and audits the result.
/// `None` means infeasible.
pub fn solve_exact(graph: &CandidateGraph, costs: &CostModel, opts: ModelOptions) -> Result<Option<LayoutSolution>, String> {
    let table = build_cost_table(graph, costs, false);
    let model = build_model(graph, &table, opts).map_err(|e| e.to_string())?;
    let res = HighsBackend
        .solve(&model, &SolveOptions { target_gap: 0.0, ..Default::default() })
        .map_err(|e| e.to_string())?;
    if res.status == SolveStatus::Infeasible {
        return Ok(None);
    }
    let values = res.values.ok_or("no incumbent")?;
    let sol = extract_solution(&model, &values, &table, res.objective, res.best_bound, res.status)
        .map_err(|e| e.to_string())?;
    let v = audit(&sol, graph, costs, &opts);
    if !v.is_empty() {
        return Err(format!("audit failed: {v:?}"));
    }
    Ok(Some(sol))
}

pub fn audit(sol: &LayoutSolution, graph: &CandidateGraph, costs: &CostModel, opts: &ModelOptions) -> Vec<Violation> {
    validate_layout(sol, graph, limits(costs, opts))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}
