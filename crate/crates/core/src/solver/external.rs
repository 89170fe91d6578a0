//! Any MILP solver reachable as a command: MPS file out, solution file in.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use super::{Backend, SolutionFile, SolveOptions, SolveResult, SolverError};
use crate::model::{MilpProblem, SolveStatus};
use crate::mps::write_mps;

/// Environment variable overriding the solver command.
pub const SOLVER_CMD_ENV: &str = "OWF_SOLVER_CMD";

/// Runs `program args...` with the placeholders `{mps}`, `{sol}`, `{start}`,
/// `{gap}` and `{time}` substituted. When no argument mentions `{mps}`, the
/// MPS and solution paths are appended in that order.
///
/// The command must write a [`SolutionFile`]. Its `_status` line is trusted
/// for infeasibility; without one, a file with values counts as feasible.
#[derive(Debug, Clone)]
pub struct ExternalBackend {
    pub program: String,
    pub args: Vec<String>,
}

impl ExternalBackend {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self { program: program.into(), args }
    }

    /// Whitespace-split command line, e.g. from [`SOLVER_CMD_ENV`].
    pub fn from_command_line(cmd: &str) -> Option<Self> {
        let mut parts = cmd.split_whitespace().map(String::from);
        let program = parts.next()?;
        Some(Self { program, args: parts.collect() })
    }

    fn command(&self, mps: &Path, sol: &Path, start: Option<&Path>, opts: &SolveOptions) -> Command {
        let gap = opts.target_gap.to_string();
        let time = opts.time_limit.map_or_else(|| "inf".to_string(), |t| t.as_secs_f64().to_string());
        let start_s = start.map(|p| p.display().to_string()).unwrap_or_default();
        let mut cmd = Command::new(&self.program);
        let mut has_mps = false;
        for a in &self.args {
            if a.contains("{mps}") {
                has_mps = true;
            }
            // A start-only argument is dropped when there is no start.
            if a.contains("{start}") && start.is_none() {
                continue;
            }
            cmd.arg(
                a.replace("{mps}", &mps.display().to_string())
                    .replace("{sol}", &sol.display().to_string())
                    .replace("{start}", &start_s)
                    .replace("{gap}", &gap)
                    .replace("{time}", &time),
            );
        }
        if !has_mps {
            cmd.arg(mps).arg(sol);
        }
        cmd
    }
}

fn io_err(e: std::io::Error) -> SolverError {
    SolverError::BackendError(e.to_string())
}

impl Backend for ExternalBackend {
    fn name(&self) -> &str {
        &self.program
    }

    fn solve(&self, model: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
        let t0 = Instant::now();
        let dir = tempfile::tempdir().map_err(io_err)?;
        let mps = dir.path().join("model.mps");
        let sol = dir.path().join("model.sol");
        write_mps(model, std::io::BufWriter::new(std::fs::File::create(&mps).map_err(io_err)?)).map_err(io_err)?;
        let start = match &opts.warm_start {
            Some(ws) => {
                let path = dir.path().join("start.sol");
                let file = SolutionFile {
                    values: model.columns.iter().map(|c| c.name.clone()).zip(ws.iter().copied()).collect(),
                    ..Default::default()
                };
                std::fs::write(&path, file.render(model.columns.iter().map(|c| c.name.as_str()))).map_err(io_err)?;
                Some(path)
            }
            None => None,
        };

        let output = self
            .command(&mps, &sol, start.as_deref(), opts)
            .output()
            .map_err(|e| SolverError::BackendUnavailable(format!("{}: {e}", self.program)))?;
        if !output.status.success() {
            return Err(SolverError::BackendError(format!(
                "{} exited with {}: {}",
                self.program,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = std::fs::read_to_string(&sol)
            .map_err(|e| SolverError::BackendError(format!("reading solution file: {e}")))?;
        let file = SolutionFile::parse(&text).map_err(SolverError::BackendError)?;
        let status = file.status.unwrap_or(if file.values.is_empty() {
            SolveStatus::Infeasible
        } else {
            SolveStatus::Feasible
        });
        let values = if status == SolveStatus::Infeasible || (status == SolveStatus::TimeLimit && file.values.is_empty()) {
            None
        } else {
            Some(file.to_values(model).map_err(SolverError::BackendError)?)
        };
        let objective = values.as_ref().map(|v| file.objective.unwrap_or_else(|| model.objective_value(v)));
        Ok(SolveResult { status, values, objective, best_bound: file.bound, wall_time: t0.elapsed(), nodes: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn placeholders_substituted() {
        let b = ExternalBackend::new("solver", vec!["--gap={gap}".into(), "{mps}".into(), "-o".into(), "{sol}".into(), "--start={start}".into(), "--t={time}".into()]);
        let opts = SolveOptions { target_gap: 0.01, time_limit: Some(Duration::from_secs(5)), ..Default::default() };
        let cmd = b.command(Path::new("/a.mps"), Path::new("/a.sol"), None, &opts);
        let args: Vec<_> = cmd.get_args().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(args, ["--gap=0.01", "/a.mps", "-o", "/a.sol", "--t=5"]);
    }

    #[test]
    fn paths_appended_without_placeholders() {
        let b = ExternalBackend::from_command_line("solver --quiet").unwrap();
        let cmd = b.command(Path::new("m"), Path::new("s"), None, &SolveOptions::default());
        let args: Vec<_> = cmd.get_args().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(args, ["--quiet", "m", "s"]);
    }

    #[test]
    fn missing_program_is_unavailable() {
        let b = ExternalBackend::new("/nonexistent/solver-binary", vec![]);
        let m = MilpProblem::from_parts("empty", vec![], vec![]);
        assert!(matches!(b.solve(&m, &SolveOptions::default()), Err(SolverError::BackendUnavailable(_))));
    }
}
