//! Solver contract and backends.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::model::{MilpProblem, SolveStatus};

pub mod external;
pub mod highs;
pub mod oracle;

pub use external::ExternalBackend;
pub use highs::HighsBackend;
pub use oracle::{oracle_solve, OracleError};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative gap `(τ − κ)/τ` at which to stop.
    pub target_gap: f64,
    pub time_limit: Option<Duration>,
    pub stop_at_first_feasible: bool,
    /// Informational; backends may run single-threaded regardless.
    pub threads: usize,
    pub seed: u32,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            target_gap: 0.005,
            time_limit: None,
            stop_at_first_feasible: false,
            threads: 1,
            seed: 0,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// One value per model column; absent when no incumbent exists.
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub wall_time: Duration,
    pub nodes: Option<u64>,
}

impl SolveResult {
    pub fn has_incumbent(&self) -> bool {
        self.values.is_some()
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("solver backend failed: {0}")]
    BackendError(String),
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, SolverError>;
}

/// Maps a terminating solver state to our status vocabulary.
pub(crate) fn classify(
    has_solution: bool,
    proven_optimal: bool,
    objective: Option<f64>,
    bound: Option<f64>,
    opts: &SolveOptions,
) -> SolveStatus {
    if opts.stop_at_first_feasible && has_solution {
        return SolveStatus::Feasible;
    }
    if proven_optimal {
        let gap = match (objective, bound) {
            (Some(t), Some(k)) => crate::model::relative_gap(t, k),
            _ => 0.0,
        };
        return if gap <= 1e-9 { SolveStatus::Optimal } else { SolveStatus::GapReached };
    }
    SolveStatus::Feasible
}

/// Text form shared by the external backend and `owf solve-mps`:
/// `name=value` per line, `#` comments, reserved `_status`, `_objective`,
/// `_bound` keys. Missing variables are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionFile {
    pub status: Option<SolveStatus>,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub values: HashMap<String, f64>,
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::GapReached => "gap_reached",
        SolveStatus::Feasible => "feasible",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::TimeLimit => "time_limit",
    }
}

fn parse_status(s: &str) -> Option<SolveStatus> {
    Some(match s.to_ascii_lowercase().as_str() {
        "optimal" => SolveStatus::Optimal,
        "gap_reached" => SolveStatus::GapReached,
        "feasible" => SolveStatus::Feasible,
        "infeasible" => SolveStatus::Infeasible,
        "time_limit" => SolveStatus::TimeLimit,
        _ => return None,
    })
}

impl SolutionFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut out = SolutionFile::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected name=value", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            let number = || v.parse::<f64>().map_err(|_| format!("line {}: bad number `{v}`", n + 1));
            match k {
                "_status" => out.status = Some(parse_status(v).ok_or_else(|| format!("unknown status `{v}`"))?),
                "_objective" => out.objective = Some(number()?),
                "_bound" => out.bound = Some(number()?),
                _ => {
                    out.values.insert(k.to_string(), number()?);
                }
            }
        }
        Ok(out)
    }

    /// Writes header keys and the non-zero values in the given order.
    pub fn render<'a>(&self, order: impl IntoIterator<Item = &'a str>) -> String {
        let mut s = String::new();
        if let Some(st) = self.status {
            let _ = writeln!(s, "_status={}", status_name(st));
        }
        if let Some(o) = self.objective {
            let _ = writeln!(s, "_objective={o}");
        }
        if let Some(b) = self.bound {
            let _ = writeln!(s, "_bound={b}");
        }
        for name in order {
            if let Some(&v) = self.values.get(name) {
                if v != 0.0 {
                    let _ = writeln!(s, "{name}={v}");
                }
            }
        }
        s
    }

    /// Dense assignment in model column order.
    pub fn to_values(&self, model: &MilpProblem) -> Result<Vec<f64>, String> {
        let idx = model.column_index();
        for name in self.values.keys() {
            if !idx.contains_key(name.as_str()) {
                return Err(format!("solution names unknown variable `{name}`"));
            }
        }
        Ok(model.columns.iter().map(|c| self.values.get(&c.name).copied().unwrap_or(0.0)).collect())
    }
}
