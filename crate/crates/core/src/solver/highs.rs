//! In-process HiGHS through its C API.

use std::ffi::{c_void, CStr, CString};
use std::os::raw::{c_char, c_int};
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use highs_sys::*;

use super::{classify, Backend, SolutionFile, SolveOptions, SolveResult, SolverError};
use crate::model::{MilpProblem, Sense, SolveStatus, VarKind};

// HiGHS shares a process-wide task scheduler between instances; solves are
// serialized to keep it in a known state.
static HIGHS_LOCK: Mutex<()> = Mutex::new(());

const STATUS_ERROR: c_int = -1;

struct Handle(*mut c_void);

impl Handle {
    fn new() -> Result<Self, SolverError> {
        let p = unsafe { Highs_create() };
        if p.is_null() {
            return Err(SolverError::BackendUnavailable("Highs_create returned null".into()));
        }
        Ok(Self(p))
    }

    fn check(&self, code: c_int, what: &str) -> Result<(), SolverError> {
        if code == STATUS_ERROR {
            Err(SolverError::BackendError(format!("{what} failed")))
        } else {
            Ok(())
        }
    }

    fn set_bool(&self, name: &str, v: bool) -> Result<(), SolverError> {
        let c = CString::new(name).unwrap();
        self.check(unsafe { Highs_setBoolOptionValue(self.0, c.as_ptr(), v as c_int) }, name)
    }

    fn set_int(&self, name: &str, v: c_int) -> Result<(), SolverError> {
        let c = CString::new(name).unwrap();
        self.check(unsafe { Highs_setIntOptionValue(self.0, c.as_ptr(), v) }, name)
    }

    fn set_double(&self, name: &str, v: f64) -> Result<(), SolverError> {
        let c = CString::new(name).unwrap();
        self.check(unsafe { Highs_setDoubleOptionValue(self.0, c.as_ptr(), v) }, name)
    }

    fn double_info(&self, name: &str) -> Option<f64> {
        let c = CString::new(name).unwrap();
        let mut v = 0.0;
        let code = unsafe { Highs_getDoubleInfoValue(self.0, c.as_ptr(), &mut v) };
        (code != STATUS_ERROR).then_some(v)
    }

    fn int_info(&self, name: &str) -> Option<c_int> {
        let c = CString::new(name).unwrap();
        let mut v = 0;
        let code = unsafe { Highs_getIntInfoValue(self.0, c.as_ptr(), &mut v) };
        (code != STATUS_ERROR).then_some(v)
    }

    fn int64_info(&self, name: &str) -> Option<i64> {
        let c = CString::new(name).unwrap();
        let mut v = 0;
        let code = unsafe { Highs_getInt64InfoValue(self.0, c.as_ptr(), &mut v) };
        (code != STATUS_ERROR).then_some(v)
    }

    fn apply(&self, opts: &SolveOptions) -> Result<(), SolverError> {
        self.set_bool("output_flag", false)?;
        self.set_double("mip_rel_gap", opts.target_gap)?;
        self.set_int("random_seed", opts.seed as c_int)?;
        if let Some(t) = opts.time_limit {
            self.set_double("time_limit", t.as_secs_f64())?;
        }
        if opts.stop_at_first_feasible {
            self.set_int("mip_max_improving_sols", 1)?;
        }
        Ok(())
    }

    fn run(&self, num_col: usize, opts: &SolveOptions, start: Instant) -> Result<SolveResult, SolverError> {
        self.check(unsafe { Highs_run(self.0) }, "Highs_run")?;
        let status = unsafe { Highs_getModelStatus(self.0) };
        // 2 = feasible primal solution available.
        let has_solution = self.int_info("primal_solution_status") == Some(2);
        let mut values = None;
        let mut objective = None;
        if has_solution {
            let mut col = vec![0.0; num_col];
            let mut col_dual = vec![0.0; num_col];
            let num_row = unsafe { Highs_getNumRow(self.0) } as usize;
            let mut row = vec![0.0; num_row];
            let mut row_dual = vec![0.0; num_row];
            self.check(
                unsafe {
                    Highs_getSolution(
                        self.0,
                        col.as_mut_ptr(),
                        col_dual.as_mut_ptr(),
                        row.as_mut_ptr(),
                        row_dual.as_mut_ptr(),
                    )
                },
                "Highs_getSolution",
            )?;
            values = Some(col);
            objective = self.double_info("objective_function_value");
        }
        let bound = self.double_info("mip_dual_bound").filter(|b| b.is_finite());
        let nodes = self.int64_info("mip_node_count").and_then(|n| u64::try_from(n).ok());
        let status = match status {
            s if s == kHighsModelStatusInfeasible as c_int => SolveStatus::Infeasible,
            // All columns are bounded, so "unbounded or infeasible" is infeasible.
            s if s == kHighsModelStatusUnboundedOrInfeasible as c_int => SolveStatus::Infeasible,
            s if s == kHighsModelStatusOptimal as c_int => classify(has_solution, true, objective, bound, opts),
            s if s == kHighsModelStatusSolutionLimit as c_int && has_solution => SolveStatus::Feasible,
            s if s == kHighsModelStatusTimeLimit as c_int => SolveStatus::TimeLimit,
            s if (s == kHighsModelStatusInterrupt as c_int || s == kHighsModelStatusIterationLimit as c_int)
                && has_solution =>
            {
                classify(has_solution, false, objective, bound, opts)
            }
            s if s == kHighsModelStatusModelEmpty as c_int => SolveStatus::Optimal,
            s => return Err(SolverError::BackendError(format!("HiGHS model status {s}"))),
        };
        if status == SolveStatus::Infeasible {
            values = None;
            objective = None;
        }
        Ok(SolveResult { status, values, objective, best_bound: bound, wall_time: start.elapsed(), nodes })
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.0) }
    }
}

/// Default backend: HiGHS branch-and-cut, linked statically.
#[derive(Debug, Default, Clone, Copy)]
pub struct HighsBackend;

impl Backend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
        let start = Instant::now();
        let n = model.columns.len();
        let cost: Vec<f64> = model.columns.iter().map(|c| c.cost).collect();
        let lower: Vec<f64> = model.columns.iter().map(|c| c.lower).collect();
        let upper: Vec<f64> = model.columns.iter().map(|c| c.upper).collect();
        let integrality: Vec<c_int> =
            model.columns.iter().map(|c| (c.kind != VarKind::Continuous) as c_int).collect();
        let mut row_lower = Vec::with_capacity(model.rows.len());
        let mut row_upper = Vec::with_capacity(model.rows.len());
        let mut a_start = Vec::with_capacity(model.rows.len());
        let mut a_index = Vec::new();
        let mut a_value = Vec::new();
        for r in &model.rows {
            let (lo, up) = match r.sense {
                Sense::Le => (f64::NEG_INFINITY, r.rhs),
                Sense::Ge => (r.rhs, f64::INFINITY),
                Sense::Eq => (r.rhs, r.rhs),
            };
            row_lower.push(lo);
            row_upper.push(up);
            a_start.push(a_index.len() as c_int);
            for &(c, v) in &r.terms {
                a_index.push(c as c_int);
                a_value.push(v);
            }
        }

        let _guard = HIGHS_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        let h = Handle::new()?;
        h.apply(opts)?;
        let code = unsafe {
            Highs_passMip(
                h.0,
                n as c_int,
                model.rows.len() as c_int,
                a_index.len() as c_int,
                kHighsMatrixFormatRowwise as c_int,
                kHighsObjSenseMinimize as c_int,
                0.0,
                cost.as_ptr(),
                lower.as_ptr(),
                upper.as_ptr(),
                row_lower.as_ptr(),
                row_upper.as_ptr(),
                a_start.as_ptr(),
                a_index.as_ptr(),
                a_value.as_ptr(),
                integrality.as_ptr(),
            )
        };
        h.check(code, "Highs_passMip")?;
        if let Some(ws) = &opts.warm_start {
            if ws.len() != n {
                return Err(SolverError::BackendError(format!("warm start has {} values for {n} columns", ws.len())));
            }
            let code = unsafe {
                Highs_setSolution(h.0, ws.as_ptr(), std::ptr::null(), std::ptr::null(), std::ptr::null())
            };
            h.check(code, "Highs_setSolution")?;
        }
        h.run(n, opts, start)
    }
}

/// Solves an MPS file and writes a solution file; `start` is an optional
/// solution file used as a MIP start. Backs the `solve-mps` subcommand.
pub fn solve_mps_file(
    mps: &Path,
    out: &Path,
    start_file: Option<&Path>,
    opts: &SolveOptions,
) -> Result<SolveStatus, SolverError> {
    let t0 = Instant::now();
    let path = CString::new(mps.to_string_lossy().as_bytes())
        .map_err(|_| SolverError::BackendError("path contains NUL".into()))?;
    let _guard = HIGHS_LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let h = Handle::new()?;
    h.apply(opts)?;
    h.check(unsafe { Highs_readModel(h.0, path.as_ptr()) }, "Highs_readModel")?;
    let n = unsafe { Highs_getNumCol(h.0) } as usize;
    let mut names = Vec::with_capacity(n);
    let mut buf = vec![0 as c_char; kHighsMaximumStringLength as usize];
    for i in 0..n {
        h.check(unsafe { Highs_getColName(h.0, i as c_int, buf.as_mut_ptr()) }, "Highs_getColName")?;
        names.push(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned());
    }
    if let Some(sf) = start_file {
        let text = std::fs::read_to_string(sf).map_err(|e| SolverError::BackendError(e.to_string()))?;
        let start = SolutionFile::parse(&text).map_err(SolverError::BackendError)?;
        let values: Vec<f64> = names.iter().map(|nm| start.values.get(nm).copied().unwrap_or(0.0)).collect();
        let code =
            unsafe { Highs_setSolution(h.0, values.as_ptr(), std::ptr::null(), std::ptr::null(), std::ptr::null()) };
        h.check(code, "Highs_setSolution")?;
    }
    let res = h.run(n, opts, t0)?;
    let mut file = SolutionFile { status: Some(res.status), objective: res.objective, bound: res.best_bound, ..Default::default() };
    if let Some(v) = &res.values {
        file.values = names.iter().cloned().zip(v.iter().copied()).collect();
    }
    std::fs::write(out, file.render(names.iter().map(String::as_str)))
        .map_err(|e| SolverError::BackendError(e.to_string()))?;
    Ok(res.status)
}
