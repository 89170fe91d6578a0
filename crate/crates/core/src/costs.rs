//! Per-arc cable selection and the objective coefficient table.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electrical::{
    self, capacity_set, losses_with_constants, CableType, ElectricalError, LineConstants, LineModel,
    SystemParams, WindSeries,
};
use crate::exec::{self, Execution};
use crate::graph::{CandidateGraph, NodeId};

/// Relative slack on `S ≤ S_r` so that an exact-capacity load is not lost to rounding.
const POWER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// Total length, m.
    L,
    /// Length plus discounted losses.
    LP,
    /// Initial investment.
    I,
    /// Investment plus discounted losses.
    IP,
}

impl ObjectiveMode {
    pub fn needs_losses(self) -> bool {
        matches!(self, ObjectiveMode::LP | ObjectiveMode::IP)
    }

    pub fn uses_length(self) -> bool {
        matches!(self, ObjectiveMode::L | ObjectiveMode::LP)
    }
}

impl std::str::FromStr for ObjectiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" => Ok(Self::L),
            "LP" => Ok(Self::LP),
            "I" => Ok(Self::I),
            "IP" => Ok(Self::IP),
            other => Err(format!("unknown objective `{other}` (expected L, LP, I or IP)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error(transparent)]
    Electrical(#[from] ElectricalError),
    #[error("objective {0:?} needs a wind power series")]
    MissingSeries(ObjectiveMode),
    #[error("no cable can carry {k} turbines over {length_m:.1} m")]
    NoFeasibleCable { k: u32, length_m: f64 },
}

/// Everything needed to price an `(arc, k)` pair.
#[derive(Debug, Clone)]
pub struct CostModel {
    pub cables: Vec<CableType>,
    pub capacities: Vec<u32>,
    pub sys: SystemParams,
    pub line: LineModel,
    pub mode: ObjectiveMode,
    series: Option<WindSeries>,
    rated_power: Vec<f64>,
    cost_per_km: Vec<f64>,
    /// `(distinct-year index, c_e/(1+r)^μ / currency_scale)` for μ = 1..=m.
    discount: Vec<(usize, f64)>,
}

impl CostModel {
    /// `currency_scale` is the number of energy-price currency units per table
    /// unit (1e6 when cable costs are in M€ and the energy price in €/MWh).
    pub fn new(
        cables: Vec<CableType>,
        sys: SystemParams,
        line: LineModel,
        mode: ObjectiveMode,
        series: Option<WindSeries>,
        currency_scale: f64,
    ) -> Result<Self, CostError> {
        let capacities = capacity_set(&cables, &sys)?;
        let rated_power = cables.iter().map(|c| c.rated_power(&sys)).collect::<Result<Vec<_>, _>>()?;
        let cost_per_km = cables.iter().map(|c| c.cost_per_km(&sys)).collect::<Result<Vec<_>, _>>()?;
        let mut discount = Vec::new();
        if mode.needs_losses() {
            let s = series.as_ref().ok_or(CostError::MissingSeries(mode))?;
            for mu in 1..=sys.lifetime_years as usize {
                let factor = sys.energy_price_per_mwh / (1.0 + sys.discount_rate).powi(mu as i32) / currency_scale;
                discount.push((s.year_index(mu)?, factor));
            }
        }
        Ok(Self { cables, capacities, sys, line, mode, series, rated_power, cost_per_km, discount })
    }

    /// Largest capacity U.
    pub fn u_max(&self) -> u32 {
        *self.capacities.last().expect("capacity set is non-empty")
    }

    /// Maximum admissible load on an arc leaving `tail`.
    pub fn load_cap(&self, tail_is_oss: bool) -> u32 {
        if tail_is_oss {
            self.u_max()
        } else {
            self.u_max() - 1
        }
    }

    pub fn rated_power(&self, t: usize) -> f64 {
        self.rated_power[t]
    }

    pub fn series(&self) -> Option<&WindSeries> {
        self.series.as_ref()
    }

    /// Whether cable `t` carries `k` turbines over `length_m`.
    pub fn supports(&self, t: usize, k: u32, length_m: f64) -> bool {
        let s = electrical::arc_power(k, &self.cables[t], length_m, &self.sys, self.line);
        s <= self.rated_power[t] * (1.0 + POWER_SLACK)
    }

    /// Discounted loss cost over the lifetime, evaluated year by year.
    pub fn discounted_losses(&self, t: usize, k: u32, length_m: f64) -> f64 {
        let Some(series) = &self.series else { return 0.0 };
        let consts = LineConstants::new(&self.cables[t], length_m, &self.sys, self.line);
        let per_year: Vec<f64> = series
            .years()
            .iter()
            .map(|hours| losses_with_constants(&consts, k, &self.cables[t], length_m / 1000.0, hours))
            .collect();
        self.discount_sum(&per_year)
    }

    fn discount_sum(&self, per_year: &[f64]) -> f64 {
        self.discount.iter().map(|&(y, f)| per_year[y] * f).sum()
    }

    fn fixed_cost(&self, t: usize, length_m: f64) -> f64 {
        if self.mode.uses_length() {
            length_m
        } else {
            self.cost_per_km[t] * length_m / 1000.0
        }
    }

    /// Cost of using cable `t` on an arc of `length_m` with load `k`.
    pub fn cable_cost(&self, t: usize, k: u32, length_m: f64) -> f64 {
        let fixed = self.fixed_cost(t, length_m);
        if self.mode.needs_losses() {
            fixed + self.discounted_losses(t, k, length_m)
        } else {
            fixed
        }
    }

    /// Cheapest feasible cable for `k` turbines over `length_m`. Equal costs
    /// resolve to the lower index.
    pub fn select_cable(&self, k: u32, length_m: f64) -> Result<(usize, f64), CostError> {
        let mut best: Option<(usize, f64)> = None;
        for t in 0..self.cables.len() {
            if !self.supports(t, k, length_m) {
                continue;
            }
            let c = self.cable_cost(t, k, length_m);
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((t, c));
            }
        }
        best.ok_or(CostError::NoFeasibleCable { k, length_m })
    }

    /// Prices every load `1..=kmax` on one arc length, sharing line constants
    /// and per-year losses across loads. Agrees bit for bit with
    /// [`Self::select_cable`].
    fn price_arc(&self, length_m: f64, kmax: u32) -> Vec<Option<(usize, f64)>> {
        let n_t = self.cables.len();
        let consts: Vec<LineConstants> = self
            .cables
            .iter()
            .map(|c| LineConstants::new(c, length_m, &self.sys, self.line))
            .collect();
        (1..=kmax)
            .map(|k| {
                let mut best: Option<(usize, f64)> = None;
                for t in 0..n_t {
                    let s = electrical::arc_power(k, &self.cables[t], length_m, &self.sys, self.line);
                    if s > self.rated_power[t] * (1.0 + POWER_SLACK) {
                        continue;
                    }
                    let mut c = self.fixed_cost(t, length_m);
                    if self.mode.needs_losses() {
                        let series = self.series.as_ref().expect("checked at construction");
                        let per_year: Vec<f64> = series
                            .years()
                            .iter()
                            .map(|h| losses_with_constants(&consts[t], k, &self.cables[t], length_m / 1000.0, h))
                            .collect();
                        c += self.discount_sum(&per_year);
                    }
                    if best.is_none_or(|(_, b)| c < b) {
                        best = Some((t, c));
                    }
                }
                best
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub tail: NodeId,
    pub head: NodeId,
    pub k: u32,
    /// Selected cable index; `None` in a zero-cost (feasibility) table.
    pub cable: Option<usize>,
    pub coefficient: f64,
}

/// Objective coefficients for every priced `(arc, k)` of one candidate graph.
#[derive(Debug, Clone)]
pub struct CostTable {
    pub mode: ObjectiveMode,
    pub u_max: u32,
    pub zero_costs: bool,
    entries: Vec<CostEntry>,
    index: HashMap<(NodeId, NodeId, u32), usize>,
}

impl CostTable {
    pub fn from_entries(mode: ObjectiveMode, u_max: u32, zero_costs: bool, mut entries: Vec<CostEntry>) -> Self {
        entries.sort_by_key(|e| (e.tail, e.head, e.k));
        let index = entries.iter().enumerate().map(|(n, e)| ((e.tail, e.head, e.k), n)).collect();
        Self { mode, u_max, zero_costs, entries, index }
    }

    pub fn entries(&self) -> &[CostEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, tail: NodeId, head: NodeId, k: u32) -> Option<&CostEntry> {
        self.index.get(&(tail, head, k)).map(|&n| &self.entries[n])
    }

    /// CSV with columns `i,j,k,t,coefficient`; `t` is empty when no cable was selected.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "i,j,k,t,coefficient")?;
        for e in &self.entries {
            let t = e.cable.map(|t| t.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", e.tail, e.head, e.k, t, e.coefficient)?;
        }
        Ok(())
    }
}

/// Builds the table on `graph`. With `zero_costs` every `(arc, k ≤ f(tail))`
/// gets coefficient 0 and no electrical evaluation is done.
pub fn build_cost_table(graph: &CandidateGraph, model: &CostModel, zero_costs: bool) -> CostTable {
    build_cost_table_with(graph, model, zero_costs, Execution::default())
}

pub fn build_cost_table_with(
    graph: &CandidateGraph,
    model: &CostModel,
    zero_costs: bool,
    exec: Execution,
) -> CostTable {
    let u_max = model.u_max();
    if zero_costs {
        let entries = graph
            .arcs()
            .iter()
            .flat_map(|a| {
                let cap = model.load_cap(graph.is_oss(a.tail));
                (1..=cap).map(move |k| CostEntry { tail: a.tail, head: a.head, k, cable: None, coefficient: 0.0 })
            })
            .collect();
        return CostTable::from_entries(model.mode, u_max, true, entries);
    }

    // Arcs sharing a length (both directions, regular grids) share pricing.
    let mut lengths: Vec<u64> = graph.arcs().iter().map(|a| a.length_m.to_bits()).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let priced = exec::map_collect(exec, &lengths, |&bits| model.price_arc(f64::from_bits(bits), u_max));
    let by_length: HashMap<u64, &Vec<Option<(usize, f64)>>> = lengths.iter().copied().zip(priced.iter()).collect();

    let mut entries = Vec::new();
    for a in graph.arcs() {
        let prices = by_length[&a.length_m.to_bits()];
        let cap = model.load_cap(graph.is_oss(a.tail));
        for k in 1..=cap {
            if let Some((t, c)) = prices[k as usize - 1] {
                entries.push(CostEntry { tail: a.tail, head: a.head, k, cable: Some(t), coefficient: c });
            }
        }
    }
    CostTable::from_entries(model.mode, u_max, false, entries)
}
