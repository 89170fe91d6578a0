//! Solver-agnostic MILP over a candidate graph and cost table.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::CostTable;
use crate::graph::{CandidateGraph, NodeId};

/// Integrality tolerance on binary/integer columns.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Relative tolerance between a recomputed and a reported objective.
pub const OBJECTIVE_TOL: f64 = 1e-6;
/// Absolute tolerance on row activities when auditing an assignment.
const ROW_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    /// Σσ = n_w (merged with the per-OSS load row when there is one OSS).
    Connectivity,
    /// Load leaving an OSS equals its σ.
    OssLoad,
    Feeders,
    InDegree,
    LoadBalance,
    Link,
    Crossing,
    ValidInequality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub family: RowFamily,
    pub sense: Sense,
    pub rhs: f64,
    pub terms: Vec<(usize, f64)>,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(c, a)| a * values[c]).sum()
    }

    fn satisfied(&self, act: f64) -> bool {
        match self.sense {
            Sense::Le => act <= self.rhs + ROW_TOL,
            Sense::Ge => act >= self.rhs - ROW_TOL,
            Sense::Eq => (act - self.rhs).abs() <= ROW_TOL,
        }
    }
}

/// What a column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Arc { tail: NodeId, head: NodeId },
    Load { tail: NodeId, head: NodeId, k: u32 },
    Sigma { oss: NodeId },
    /// Column of a hand-assembled problem.
    Other,
}

/// Minimization MILP with index maps back to the layout domain.
#[derive(Debug, Clone)]
pub struct MilpProblem {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub roles: Vec<VarRole>,
    x_index: HashMap<(NodeId, NodeId), usize>,
    y_index: HashMap<(NodeId, NodeId, u32), usize>,
    sigma_index: Vec<(NodeId, usize)>,
}

impl MilpProblem {
    /// A problem with no layout meaning, e.g. for exercising a backend.
    pub fn from_parts(name: &str, columns: Vec<Column>, rows: Vec<Row>) -> Self {
        let roles = vec![VarRole::Other; columns.len()];
        Self {
            name: name.to_string(),
            columns,
            rows,
            roles,
            x_index: HashMap::new(),
            y_index: HashMap::new(),
            sigma_index: Vec::new(),
        }
    }

    pub fn x(&self, tail: NodeId, head: NodeId) -> Option<usize> {
        self.x_index.get(&(tail, head)).copied()
    }

    pub fn y(&self, tail: NodeId, head: NodeId, k: u32) -> Option<usize> {
        self.y_index.get(&(tail, head, k)).copied()
    }

    pub fn sigma(&self) -> &[(NodeId, usize)] {
        &self.sigma_index
    }

    pub fn count_x(&self) -> usize {
        self.x_index.len()
    }

    pub fn count_y(&self) -> usize {
        self.y_index.len()
    }

    pub fn count_rows(&self, family: RowFamily) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.columns.iter().zip(values).map(|(c, v)| c.cost * v).sum()
    }

    pub fn column_index(&self) -> HashMap<&str, usize> {
        self.columns.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    /// Maximum feeders per OSS.
    pub max_feeders: u32,
    /// OSS loading symmetry coefficient, in `[1, n_o]`.
    pub oss_balance: f64,
    pub valid_inequalities: bool,
    pub crossings: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { max_feeders: 10, oss_balance: 1.0, valid_inequalities: true, crossings: true }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("cost table is empty")]
    EmptyCostTable,
    #[error("turbine {0} has no incoming candidate arc")]
    IsolatedTurbine(NodeId),
    #[error("previous layout arc {tail}->{head} (k={k}) has no variable in this model")]
    StartNotEmbeddable { tail: NodeId, head: NodeId, k: u32 },
    #[error("column {name} = {value} is not integral")]
    FractionalAssignment { name: String, value: f64 },
    #[error("row {name} violated: activity {activity} {sense} {rhs}")]
    RowViolated { name: String, activity: f64, sense: Sense, rhs: f64 },
    #[error("objective mismatch: recomputed {recomputed}, solver reported {reported}")]
    ObjectiveMismatch { recomputed: f64, reported: f64 },
    #[error("assignment has {got} values for {expected} columns")]
    AssignmentLength { got: usize, expected: usize },
}

/// Upper bound on σ_i: `η·ceil(n_w/n_o)`, floored to an integer.
pub fn sigma_upper(n_wt: usize, n_oss: usize, eta: f64) -> f64 {
    (eta * n_wt.div_ceil(n_oss) as f64 + 1e-9).floor()
}

/// Assembles the MILP. Column order: x (graph arc order), y (table order), σ.
pub fn build_model(graph: &CandidateGraph, table: &CostTable, opts: ModelOptions) -> Result<MilpProblem, ModelError> {
    if table.is_empty() {
        return Err(ModelError::EmptyCostTable);
    }
    let n_oss = graph.n_oss();
    let n_wt = graph.n_wt();
    let u_max = table.u_max;

    let mut columns = Vec::new();
    let mut roles = Vec::new();
    let mut x_index = HashMap::new();
    for a in graph.arcs() {
        x_index.insert((a.tail, a.head), columns.len());
        columns.push(Column {
            name: format!("x_{}_{}", a.tail, a.head),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            cost: 0.0,
        });
        roles.push(VarRole::Arc { tail: a.tail, head: a.head });
    }

    let mut y_index = HashMap::new();
    // Per node: incoming and outgoing (column, k, tail/head) lists.
    let mut incoming: HashMap<NodeId, Vec<(usize, u32)>> = HashMap::new();
    let mut outgoing: HashMap<NodeId, Vec<(usize, u32, NodeId)>> = HashMap::new();
    let mut per_arc: HashMap<(NodeId, NodeId), Vec<usize>> = HashMap::new();
    for e in table.entries() {
        if !graph.contains(e.tail, e.head) {
            continue;
        }
        let col = columns.len();
        y_index.insert((e.tail, e.head, e.k), col);
        columns.push(Column {
            name: format!("y_{}_{}_{}", e.tail, e.head, e.k),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
            cost: e.coefficient,
        });
        roles.push(VarRole::Load { tail: e.tail, head: e.head, k: e.k });
        incoming.entry(e.head).or_default().push((col, e.k));
        outgoing.entry(e.tail).or_default().push((col, e.k, e.head));
        per_arc.entry((e.tail, e.head)).or_default().push(col);
    }
    if y_index.is_empty() {
        return Err(ModelError::EmptyCostTable);
    }
    for j in graph.reduced().wt_ids() {
        if !incoming.contains_key(&j) {
            return Err(ModelError::IsolatedTurbine(j));
        }
    }

    let sigma_ub = sigma_upper(n_wt, n_oss, opts.oss_balance);
    let mut sigma_index = Vec::new();
    for i in graph.reduced().oss_ids() {
        sigma_index.push((i, columns.len()));
        let lower = if n_oss == 1 { n_wt as f64 } else { 0.0 };
        columns.push(Column { name: format!("s_{i}"), kind: VarKind::Integer, lower, upper: sigma_ub, cost: 0.0 });
        roles.push(VarRole::Sigma { oss: i });
    }

    let mut rows = Vec::new();
    let empty_out: Vec<(usize, u32, NodeId)> = Vec::new();
    let out_of = |i: NodeId| outgoing.get(&i).unwrap_or(&empty_out);

    if n_oss == 1 {
        // σ is pinned to n_w by its bounds, so one row carries both conditions.
        let (oss, s) = sigma_index[0];
        let mut terms: Vec<(usize, f64)> = out_of(oss).iter().map(|&(c, k, _)| (c, k as f64)).collect();
        terms.push((s, -1.0));
        rows.push(Row { name: "conn".into(), family: RowFamily::Connectivity, sense: Sense::Eq, rhs: 0.0, terms });
    } else {
        let terms = sigma_index.iter().map(|&(_, s)| (s, 1.0)).collect();
        rows.push(Row {
            name: "conn".into(),
            family: RowFamily::Connectivity,
            sense: Sense::Eq,
            rhs: n_wt as f64,
            terms,
        });
        for &(oss, s) in &sigma_index {
            let mut terms: Vec<(usize, f64)> = out_of(oss).iter().map(|&(c, k, _)| (c, k as f64)).collect();
            terms.push((s, -1.0));
            rows.push(Row {
                name: format!("oss_{oss}"),
                family: RowFamily::OssLoad,
                sense: Sense::Eq,
                rhs: 0.0,
                terms,
            });
        }
    }

    for &(oss, _) in &sigma_index {
        let terms = out_of(oss).iter().map(|&(c, _, _)| (c, 1.0)).collect();
        rows.push(Row {
            name: format!("feed_{oss}"),
            family: RowFamily::Feeders,
            sense: Sense::Le,
            rhs: opts.max_feeders as f64,
            terms,
        });
    }

    for j in graph.reduced().wt_ids() {
        let terms = incoming[&j].iter().map(|&(c, _)| (c, 1.0)).collect();
        rows.push(Row { name: format!("in_{j}"), family: RowFamily::InDegree, sense: Sense::Eq, rhs: 1.0, terms });
    }

    for j in graph.reduced().wt_ids() {
        let mut terms: Vec<(usize, f64)> = incoming[&j].iter().map(|&(c, k)| (c, k as f64)).collect();
        terms.extend(out_of(j).iter().map(|&(c, k, _)| (c, -(k as f64))));
        rows.push(Row { name: format!("flow_{j}"), family: RowFamily::LoadBalance, sense: Sense::Eq, rhs: 1.0, terms });
    }

    for a in graph.arcs() {
        let Some(ys) = per_arc.get(&(a.tail, a.head)) else { continue };
        let mut terms: Vec<(usize, f64)> = ys.iter().map(|&c| (c, 1.0)).collect();
        terms.push((x_index[&(a.tail, a.head)], -1.0));
        rows.push(Row {
            name: format!("link_{}_{}", a.tail, a.head),
            family: RowFamily::Link,
            sense: Sense::Le,
            rhs: 0.0,
            terms,
        });
    }

    if opts.crossings {
        for (n, (e, f)) in graph.crossing_pairs.iter().enumerate() {
            let terms: Vec<(usize, f64)> = [(e.a, e.b), (e.b, e.a), (f.a, f.b), (f.b, f.a)]
                .iter()
                .filter_map(|key| x_index.get(key).map(|&c| (c, 1.0)))
                .collect();
            if terms.len() < 2 {
                continue;
            }
            rows.push(Row {
                name: format!("cross_{}", n + 1),
                family: RowFamily::Crossing,
                sense: Sense::Le,
                rhs: 1.0,
                terms,
            });
        }
    }

    if opts.valid_inequalities {
        for v in 2..u_max {
            for j in graph.reduced().wt_ids() {
                let out: Vec<(usize, f64)> = out_of(j)
                    .iter()
                    .filter(|&&(_, k, head)| k >= v && !graph.is_oss(head))
                    .map(|&(c, _, _)| (c, 1.0))
                    .collect();
                if out.is_empty() {
                    continue;
                }
                let mut terms: Vec<(usize, f64)> = incoming[&j]
                    .iter()
                    .filter(|&&(_, k)| k > v)
                    .map(|&(c, k)| (c, -(((k - 1) / v) as f64)))
                    .collect();
                terms.extend(out);
                rows.push(Row {
                    name: format!("valid_{v}_{j}"),
                    family: RowFamily::ValidInequality,
                    sense: Sense::Le,
                    rhs: 0.0,
                    terms,
                });
            }
        }
    }

    Ok(MilpProblem {
        name: format!("owf_u{}", graph.upsilon),
        columns,
        rows,
        roles,
        x_index,
        y_index,
        sigma_index,
    })
}

/// One energized arc of a layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveArc {
    pub tail: NodeId,
    pub head: NodeId,
    /// Turbines downstream of `tail` through this arc, head included.
    pub k: u32,
    pub cable: Option<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    GapReached,
    Feasible,
    Infeasible,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutSolution {
    pub arcs: Vec<ActiveArc>,
    /// `(oss id, turbines connected)`.
    pub sigma: Vec<(NodeId, u32)>,
    pub objective: f64,
    pub best_bound: Option<f64>,
    pub status: SolveStatus,
}

impl LayoutSolution {
    /// Directed arcs carrying load.
    pub fn arc_keys(&self) -> Vec<(NodeId, NodeId)> {
        self.arcs.iter().map(|a| (a.tail, a.head)).collect()
    }

    /// Relative gap `(τ − κ)/τ`.
    pub fn gap(&self) -> Option<f64> {
        self.best_bound.map(|k| relative_gap(self.objective, k))
    }
}

/// `(τ − κ)/τ`, zero when both vanish.
pub fn relative_gap(tau: f64, kappa: f64) -> f64 {
    if tau.abs() <= f64::EPSILON {
        if (tau - kappa).abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((tau - kappa) / tau).max(0.0)
    }
}

/// Start vector reproducing `previous` in `model`.
pub fn warm_start(model: &MilpProblem, previous: &LayoutSolution) -> Result<Vec<f64>, ModelError> {
    let mut start = vec![0.0; model.columns.len()];
    for a in &previous.arcs {
        let not_embeddable = || ModelError::StartNotEmbeddable { tail: a.tail, head: a.head, k: a.k };
        let x = model.x(a.tail, a.head).ok_or_else(not_embeddable)?;
        let y = model.y(a.tail, a.head, a.k).ok_or_else(not_embeddable)?;
        start[x] = 1.0;
        start[y] = 1.0;
    }
    let mut sigma: HashMap<NodeId, f64> = HashMap::new();
    for a in &previous.arcs {
        if let Some(&(oss, _)) = model.sigma().iter().find(|(o, _)| *o == a.tail) {
            *sigma.entry(oss).or_default() += a.k as f64;
        }
    }
    for &(oss, col) in model.sigma() {
        start[col] = sigma.get(&oss).copied().unwrap_or(0.0);
    }
    Ok(start)
}

/// Decodes an integral assignment, auditing integrality, every row and the
/// reported objective.
pub fn extract_solution(
    model: &MilpProblem,
    values: &[f64],
    table: &CostTable,
    reported_objective: Option<f64>,
    best_bound: Option<f64>,
    status: SolveStatus,
) -> Result<LayoutSolution, ModelError> {
    if values.len() != model.columns.len() {
        return Err(ModelError::AssignmentLength { got: values.len(), expected: model.columns.len() });
    }
    for (c, &v) in model.columns.iter().zip(values) {
        if c.kind != VarKind::Continuous && (v - v.round()).abs() > INTEGRALITY_TOL {
            return Err(ModelError::FractionalAssignment { name: c.name.clone(), value: v });
        }
    }
    let rounded: Vec<f64> = model
        .columns
        .iter()
        .zip(values)
        .map(|(c, &v)| if c.kind == VarKind::Continuous { v } else { v.round() })
        .collect();
    for r in &model.rows {
        let act = r.activity(&rounded);
        if !r.satisfied(act) {
            return Err(ModelError::RowViolated { name: r.name.clone(), activity: act, sense: r.sense, rhs: r.rhs });
        }
    }

    let mut arcs = Vec::new();
    let mut sigma = Vec::new();
    for (role, &v) in model.roles.iter().zip(&rounded) {
        match *role {
            VarRole::Load { tail, head, k } if v > 0.5 => {
                let entry = table.get(tail, head, k).expect("model columns come from the table");
                arcs.push(ActiveArc { tail, head, k, cable: entry.cable, cost: entry.coefficient });
            }
            VarRole::Sigma { oss } => sigma.push((oss, v as u32)),
            _ => {}
        }
    }
    let recomputed: f64 = arcs.iter().map(|a| a.cost).sum();
    if let Some(reported) = reported_objective {
        let scale = recomputed.abs().max(reported.abs());
        if (recomputed - reported).abs() > OBJECTIVE_TOL * scale + 1e-9 {
            return Err(ModelError::ObjectiveMismatch { recomputed, reported });
        }
    }
    Ok(LayoutSolution { arcs, sigma, objective: recomputed, best_bound, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{build_cost_table, CostModel, ObjectiveMode};
    use crate::electrical::{CableType, LineModel, SystemParams};
    use crate::graph::{build_reduced_graph, knn_candidates, Node};

    fn sys() -> SystemParams {
        SystemParams {
            nominal_voltage_v: 33e3,
            turbine_power_w: 3e6,
            lifetime_years: 1,
            discount_rate: 0.0,
            energy_price_per_mwh: 0.0,
        }
    }

    fn cost_model(caps: &[u32]) -> CostModel {
        let cables = caps
            .iter()
            .enumerate()
            .map(|(i, &u)| CableType::simple(&format!("c{i}"), u, 0.3 + 0.1 * i as f64))
            .collect();
        CostModel::new(cables, sys(), LineModel::default(), ObjectiveMode::I, None, 1e6).unwrap()
    }

    fn three_wt() -> CandidateGraph {
        let nodes = vec![
            Node::oss(1, 0.0, 0.0),
            Node::wt(2, 1000.0, 0.0),
            Node::wt(3, 2000.0, 50.0),
            Node::wt(4, 3000.0, -30.0),
        ];
        knn_candidates(&build_reduced_graph(&nodes).unwrap(), 2)
    }

    #[test]
    fn small_model_counts() {
        let g = three_wt();
        let cm = cost_model(&[1, 2]);
        let t = build_cost_table(&g, &cm, false);
        let m = build_model(&g, &t, ModelOptions::default()).unwrap();
        assert_eq!(m.count_x(), 9);
        assert!(m.count_y() <= 12);
        assert_eq!(m.sigma().len(), 1);
        let core = [
            RowFamily::Connectivity,
            RowFamily::OssLoad,
            RowFamily::Feeders,
            RowFamily::InDegree,
            RowFamily::LoadBalance,
        ];
        let n: usize = core.iter().map(|f| m.count_rows(*f)).sum();
        assert_eq!(n, 8);
        // U = 2: the range 2..U-1 is empty.
        assert_eq!(m.count_rows(RowFamily::ValidInequality), 0);
        let bound = 1 + 3 * 1 * 3 + 2 * 2 * 3;
        assert!(m.columns.len() <= bound);
    }

    #[test]
    fn one_crossing_row_for_convex_quad() {
        let nodes = vec![
            Node::oss(1, 0.0, 0.0),
            Node::wt(2, 1000.0, 0.0),
            Node::wt(3, 1000.0, 1000.0),
            Node::wt(4, 0.0, 1000.0),
        ];
        let g = knn_candidates(&build_reduced_graph(&nodes).unwrap(), 2);
        let t = build_cost_table(&g, &cost_model(&[3]), false);
        let m = build_model(&g, &t, ModelOptions::default()).unwrap();
        let rows: Vec<_> = m.rows.iter().filter(|r| r.family == RowFamily::Crossing).collect();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].terms.len() <= 4 && rows[0].terms.len() >= 2);
    }

    #[test]
    fn empty_table_and_isolated_turbine() {
        let g = three_wt();
        let cm = cost_model(&[2]);
        let empty = CostTable::from_entries(ObjectiveMode::I, 2, false, vec![]);
        assert_eq!(build_model(&g, &empty, ModelOptions::default()).unwrap_err(), ModelError::EmptyCostTable);
        let t = build_cost_table(&g, &cm, false);
        let without_4: Vec<_> = t.entries().iter().filter(|e| e.head != 4).copied().collect();
        let t = CostTable::from_entries(ObjectiveMode::I, 2, false, without_4);
        assert_eq!(build_model(&g, &t, ModelOptions::default()).unwrap_err(), ModelError::IsolatedTurbine(4));
    }

    fn chain(m: &MilpProblem) -> Vec<f64> {
        let layout = LayoutSolution {
            arcs: vec![
                ActiveArc { tail: 1, head: 2, k: 3, cable: None, cost: 0.0 },
                ActiveArc { tail: 2, head: 3, k: 2, cable: None, cost: 0.0 },
                ActiveArc { tail: 3, head: 4, k: 1, cable: None, cost: 0.0 },
            ],
            sigma: vec![(1, 3)],
            objective: 0.0,
            best_bound: None,
            status: SolveStatus::Feasible,
        };
        warm_start(m, &layout).unwrap()
    }

    #[test]
    fn chain_extracts_with_summed_costs() {
        let g = three_wt();
        let t = build_cost_table(&g, &cost_model(&[1, 3]), false);
        let m = build_model(&g, &t, ModelOptions::default()).unwrap();
        let start = chain(&m);
        let expected = t.get(1, 2, 3).unwrap().coefficient
            + t.get(2, 3, 2).unwrap().coefficient
            + t.get(3, 4, 1).unwrap().coefficient;
        let sol = extract_solution(&m, &start, &t, Some(m.objective_value(&start)), None, SolveStatus::Optimal).unwrap();
        assert_eq!(sol.arcs.len(), 3);
        assert!((sol.objective - expected).abs() < 1e-12);
        assert_eq!(sol.sigma, vec![(1, 3)]);
        // Identity: the start of a layout evaluates to its own objective.
        assert!((m.objective_value(&warm_start(&m, &sol).unwrap()) - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn extraction_audits() {
        let g = three_wt();
        let t = build_cost_table(&g, &cost_model(&[1, 3]), false);
        let m = build_model(&g, &t, ModelOptions::default()).unwrap();
        let zeros = vec![0.0; m.columns.len()];
        assert!(matches!(
            extract_solution(&m, &zeros, &t, None, None, SolveStatus::Feasible),
            Err(ModelError::RowViolated { .. })
        ));
        let mut start = chain(&m);
        start[m.x(2, 3).unwrap()] = 0.0;
        match extract_solution(&m, &start, &t, None, None, SolveStatus::Feasible) {
            Err(ModelError::RowViolated { name, .. }) => assert_eq!(name, "link_2_3"),
            other => panic!("{other:?}"),
        }
        let mut frac = chain(&m);
        frac[m.x(1, 2).unwrap()] = 0.5;
        assert!(matches!(
            extract_solution(&m, &frac, &t, None, None, SolveStatus::Feasible),
            Err(ModelError::FractionalAssignment { .. })
        ));
        let ok = chain(&m);
        assert!(matches!(
            extract_solution(&m, &ok, &t, Some(123.0), None, SolveStatus::Feasible),
            Err(ModelError::ObjectiveMismatch { .. })
        ));
    }

    #[test]
    fn corrupted_start_is_rejected() {
        let g = three_wt();
        let t = build_cost_table(&g, &cost_model(&[1, 3]), false);
        let m = build_model(&g, &t, ModelOptions::default()).unwrap();
        let bad = LayoutSolution {
            arcs: vec![ActiveArc { tail: 4, head: 9, k: 1, cable: None, cost: 0.0 }],
            sigma: vec![],
            objective: 0.0,
            best_bound: None,
            status: SolveStatus::Feasible,
        };
        assert_eq!(warm_start(&m, &bad).unwrap_err(), ModelError::StartNotEmbeddable { tail: 4, head: 9, k: 1 });
    }

    #[test]
    fn gap_convention() {
        assert!((relative_gap(72.84, 44.93 * 0.995) - 0.386_25).abs() < 1e-4);
        assert_eq!(relative_gap(10.0, 10.0), 0.0);
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
    }
}
