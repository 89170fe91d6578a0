//! The iterative search: a feasibility phase on zero-cost models, then an
//! optimization phase growing the candidate neighbourhood until the optimum
//! stops using arcs outside the previous candidate set.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::{build_cost_table_with, CostModel, CostTable};
use crate::exec::Execution;
use crate::graph::{knn_candidates_with, CandidateGraph, NodeId, ReducedGraph};
use crate::geometry::CrossingTest;
use crate::model::{
    build_model, extract_solution, relative_gap, warm_start, LayoutSolution, ModelError, ModelOptions, SolveStatus,
};
use crate::solver::{Backend, SolveOptions, SolverError};
use crate::validate::{validate_layout, Limits, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmParams {
    pub upsilon_f_min: usize,
    pub upsilon_f_step: usize,
    pub upsilon_f_max: usize,
    pub upsilon_o_min: usize,
    pub upsilon_o_step: usize,
    pub upsilon_o_max: usize,
    pub target_gap: f64,
    /// Per-solve limit, seconds.
    pub time_limit_s: Option<f64>,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        Self {
            upsilon_f_min: 5,
            upsilon_f_step: 1,
            upsilon_f_max: 15,
            upsilon_o_min: 15,
            upsilon_o_step: 5,
            upsilon_o_max: 50,
            target_gap: 0.005,
            time_limit_s: None,
        }
    }
}

impl AlgorithmParams {
    pub fn check(&self) -> Result<(), String> {
        if self.upsilon_f_step == 0 || self.upsilon_o_step == 0 {
            return Err("upsilon steps must be at least 1".into());
        }
        if self.upsilon_f_min == 0 || self.upsilon_o_min == 0 {
            return Err("upsilon minimums must be at least 1".into());
        }
        if self.upsilon_f_min > self.upsilon_f_max || self.upsilon_o_min > self.upsilon_o_max {
            return Err("upsilon minimum exceeds maximum".into());
        }
        if !(self.target_gap >= 0.0) {
            return Err("target gap must be non-negative".into());
        }
        if matches!(self.time_limit_s, Some(t) if !(t > 0.0)) {
            return Err("time limit must be positive".into());
        }
        Ok(())
    }
}

/// Neighbour counts visited by a loop, capped at saturation (`n_w − 1`).
pub fn schedule(min: usize, step: usize, max: usize, n_wt: usize) -> Vec<usize> {
    let cap = n_wt.saturating_sub(1).max(1);
    let mut out = Vec::new();
    let mut u = min;
    while u <= max {
        let v = u.min(cap);
        if out.last() != Some(&v) {
            out.push(v);
        }
        if v == cap {
            break;
        }
        u += step;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Feasibility,
    Optimization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub phase: Phase,
    /// 1-based iteration counter within the phase.
    pub k: usize,
    pub upsilon: usize,
    /// Pre-processing time (candidates, crossings, costs, model), seconds.
    pub ct1_s: f64,
    /// Solve time, seconds.
    pub ct2_s: f64,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub gap: Option<f64>,
    pub recalculated_gap: Option<f64>,
    pub status: Option<SolveStatus>,
    pub gap_unmet: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub records: Vec<IterationRecord>,
}

/// `(τ_i − κ_last)/τ_i` for every entry.
pub fn recalc_gaps(taus: &[f64], kappa_last: f64) -> Vec<f64> {
    taus.iter().map(|&t| relative_gap(t, kappa_last)).collect()
}

impl IterationLog {
    /// Fills the recalculated gaps of the optimization rows against the
    /// bound of the last optimization iteration.
    pub fn recalc_gaps(&mut self) -> Result<(), DriverError> {
        let kappa = self
            .records
            .iter()
            .rev()
            .find(|r| r.phase == Phase::Optimization)
            .and_then(|r| r.best_bound)
            .ok_or(DriverError::MissingBound)?;
        for r in self.records.iter_mut().filter(|r| r.phase == Phase::Optimization) {
            r.recalculated_gap = r.objective.map(|t| relative_gap(t, kappa));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "phase,k,upsilon,ct1_s,ct2_s,objective,gap_pct,recalculated_gap_pct,status,gap_unmet")?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let pct = |v: Option<f64>| v.map(|x| format!("{:.4}", 100.0 * x)).unwrap_or_default();
        for r in &self.records {
            let phase = match r.phase {
                Phase::Feasibility => "feasibility",
                Phase::Optimization => "optimization",
            };
            let status = r.status.map(crate::solver::status_name).unwrap_or("");
            writeln!(
                w,
                "{phase},{},{},{:.3},{:.3},{},{},{},{status},{}",
                r.k,
                r.upsilon,
                r.ct1_s,
                r.ct2_s,
                opt(r.objective),
                pct(r.gap),
                pct(r.recalculated_gap),
                r.gap_unmet
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Active arcs stayed inside the previous candidate set.
    Containment,
    /// The candidate set already held every arc of the reduced graph.
    Complete,
    /// Reached the largest neighbour count without either.
    BudgetExhausted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Outcome {
    pub best: LayoutSolution,
    pub log: IterationLog,
    pub termination: Termination,
    /// Terminated by containment or completeness with the last gap met.
    pub certified: bool,
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("no feasible layout for upsilon up to {upsilon_max} (feeder limit {max_feeders}, largest capacity {u_max})")]
    FeasibilityExhausted { upsilon_max: usize, max_feeders: u32, u_max: u32 },
    #[error("optimization found no layout at upsilon {0}")]
    NoIncumbent(usize),
    #[error("final iteration has no best bound")]
    MissingBound,
    #[error("layout failed validation: {0:?}")]
    InvalidLayout(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

pub struct Driver<'a> {
    pub reduced: &'a ReducedGraph,
    pub costs: &'a CostModel,
    pub model: ModelOptions,
    pub params: AlgorithmParams,
    pub backend: &'a dyn Backend,
    pub exec: Execution,
    pub seed: u32,
}

struct Prepared {
    graph: CandidateGraph,
    table: CostTable,
    ct1: Duration,
}

impl Driver<'_> {
    fn prepare(&self, upsilon: usize, zero_costs: bool) -> Prepared {
        let t0 = Instant::now();
        let graph = knn_candidates_with(self.reduced, upsilon, CrossingTest::default(), self.exec);
        let table = build_cost_table_with(&graph, self.costs, zero_costs, self.exec);
        Prepared { graph, table, ct1: t0.elapsed() }
    }

    fn solve_options(&self, first_feasible: bool, start: Option<Vec<f64>>) -> SolveOptions {
        SolveOptions {
            target_gap: self.params.target_gap,
            time_limit: self.params.time_limit_s.map(Duration::from_secs_f64),
            stop_at_first_feasible: first_feasible,
            threads: 1,
            seed: self.seed,
            warm_start: start,
        }
    }

    fn limits(&self, with_costs: bool) -> Limits<'_> {
        Limits {
            u_max: self.costs.u_max(),
            max_feeders: self.model.max_feeders,
            oss_balance: self.model.oss_balance,
            costs: with_costs.then_some(self.costs),
        }
    }

    /// Real-cost value of a layout, re-deriving cables per arc.
    pub fn evaluate(&self, layout: &LayoutSolution) -> Option<f64> {
        layout
            .arcs
            .iter()
            .map(|a| {
                let d = self.reduced.node(a.tail).position.distance(self.reduced.node(a.head).position);
                self.costs.select_cable(a.k, d).ok().map(|(_, c)| c)
            })
            .sum()
    }

    /// First feasible layout over growing zero-cost models.
    pub fn run_feasibility(&self, log: &mut IterationLog) -> Result<(LayoutSolution, usize), DriverError> {
        self.params.check().map_err(DriverError::Params)?;
        let n_wt = self.reduced.n_wt();
        let ups = schedule(self.params.upsilon_f_min, self.params.upsilon_f_step, self.params.upsilon_f_max, n_wt);
        for (i, &u) in ups.iter().enumerate() {
            let p = self.prepare(u, true);
            let t1 = Instant::now();
            let model = match build_model(&p.graph, &p.table, self.model) {
                Ok(m) => m,
                Err(ModelError::IsolatedTurbine(j)) => {
                    warn!("feasibility upsilon={u}: turbine {j} unreachable");
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let ct1 = p.ct1 + t1.elapsed();
            let res = self.backend.solve(&model, &self.solve_options(true, None))?;
            let mut rec = IterationRecord {
                phase: Phase::Feasibility,
                k: i + 1,
                upsilon: u,
                ct1_s: ct1.as_secs_f64(),
                ct2_s: res.wall_time.as_secs_f64(),
                objective: None,
                best_bound: None,
                gap: None,
                recalculated_gap: None,
                status: Some(res.status),
                gap_unmet: false,
            };
            let Some(values) = res.values.as_deref() else {
                info!("feasibility upsilon={u}: {:?}", res.status);
                log.records.push(rec);
                continue;
            };
            let sol = extract_solution(&model, values, &p.table, None, None, SolveStatus::Feasible)?;
            let v = validate_layout(&sol, &p.graph, self.limits(false));
            if !v.is_empty() {
                return Err(DriverError::InvalidLayout(v));
            }
            rec.objective = self.evaluate(&sol);
            info!("feasibility upsilon={u}: feasible, cost {:?}", rec.objective);
            log.records.push(rec);
            return Ok((sol, u));
        }
        Err(DriverError::FeasibilityExhausted {
            upsilon_max: *ups.last().unwrap_or(&self.params.upsilon_f_max),
            max_feeders: self.model.max_feeders,
            u_max: self.costs.u_max(),
        })
    }

    /// Optimization loop warm-started from `initial`.
    pub fn run_optimization(
        &self,
        initial: &LayoutSolution,
        log: &mut IterationLog,
    ) -> Result<(LayoutSolution, Termination), DriverError> {
        let n_wt = self.reduced.n_wt();
        let ups = schedule(self.params.upsilon_o_min, self.params.upsilon_o_step, self.params.upsilon_o_max, n_wt);
        let mut incumbent = initial.clone();
        let mut best: Option<LayoutSolution> = None;
        let mut prev_arcs: Option<HashSet<(NodeId, NodeId)>> = None;
        for (i, &u) in ups.iter().enumerate() {
            let p = self.prepare(u, false);
            let t1 = Instant::now();
            let model = build_model(&p.graph, &p.table, self.model)?;
            let start = match warm_start(&model, &incumbent) {
                Ok(s) => Some(s),
                Err(e) => {
                    warn!("optimization upsilon={u}: starting cold ({e})");
                    None
                }
            };
            let ct1 = p.ct1 + t1.elapsed();
            let res = self.backend.solve(&model, &self.solve_options(false, start))?;
            let values = res.values.as_deref().ok_or(DriverError::NoIncumbent(u))?;
            let status = match res.status {
                SolveStatus::Infeasible => return Err(DriverError::NoIncumbent(u)),
                s => s,
            };
            let sol = extract_solution(&model, values, &p.table, res.objective, res.best_bound, status)?;
            let v = validate_layout(&sol, &p.graph, self.limits(true));
            if !v.is_empty() {
                return Err(DriverError::InvalidLayout(v));
            }
            let gap = sol.gap();
            let gap_unmet = !matches!(status, SolveStatus::Optimal | SolveStatus::GapReached);
            if let Some(b) = &best {
                if sol.objective > b.objective + 1e-9 * b.objective.abs() {
                    warn!("objective rose from {} to {} at upsilon={u}", b.objective, sol.objective);
                }
            }
            info!("optimization upsilon={u}: {:?} objective {} gap {:?}", status, sol.objective, gap);
            log.records.push(IterationRecord {
                phase: Phase::Optimization,
                k: i + 1,
                upsilon: u,
                ct1_s: ct1.as_secs_f64(),
                ct2_s: res.wall_time.as_secs_f64(),
                objective: Some(sol.objective),
                best_bound: sol.best_bound,
                gap,
                recalculated_gap: None,
                status: Some(status),
                gap_unmet,
            });

            let active: Vec<(NodeId, NodeId)> = sol.arc_keys();
            let contained = prev_arcs.as_ref().is_some_and(|prev| active.iter().all(|a| prev.contains(a)));
            let complete = p.graph.is_complete();
            incumbent = sol.clone();
            best = Some(sol);
            if contained {
                return Ok((best.unwrap(), Termination::Containment));
            }
            if complete {
                return Ok((best.unwrap(), Termination::Complete));
            }
            prev_arcs = Some(p.graph.arc_keys().clone());
        }
        let best = best.ok_or(DriverError::NoIncumbent(self.params.upsilon_o_min))?;
        Ok((best, Termination::BudgetExhausted))
    }

    /// Both phases and the gap recalculation.
    pub fn run(&self) -> Result<Outcome, DriverError> {
        if self.params.upsilon_o_min < self.params.upsilon_f_max {
            warn!(
                "upsilon_o_min ({}) is below upsilon_f_max ({})",
                self.params.upsilon_o_min, self.params.upsilon_f_max
            );
        }
        let mut log = IterationLog::default();
        let (initial, _) = self.run_feasibility(&mut log)?;
        let (best, termination) = self.run_optimization(&initial, &mut log)?;
        log.recalc_gaps()?;
        let last_met = log.records.last().is_some_and(|r| !r.gap_unmet);
        let certified = termination != Termination::BudgetExhausted && last_met;
        Ok(Outcome { best, log, termination, certified })
    }
}
