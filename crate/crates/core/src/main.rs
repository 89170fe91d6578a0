use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::info;

use owf_core::costs::build_cost_table_with;
use owf_core::driver::{Driver, DriverError};
use owf_core::graph::knn_candidates_with;
use owf_core::io::{self, FarmInstance, InputError, LayoutFile, SynthParams};
use owf_core::model::{build_model, ModelError};
use owf_core::mps::write_mps;
use owf_core::solver::external::SOLVER_CMD_ENV;
use owf_core::solver::highs::solve_mps_file;
use owf_core::solver::{Backend, ExternalBackend, HighsBackend, SolveOptions};
use owf_core::validate::{validate_layout, Limits};
use owf_core::{Execution, geometry::CrossingTest};

const EXIT_FAILURE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_GAP_UNMET: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "owf", version, about = "Offshore wind farm cable layout optimization")]
struct Cli {
    /// Run pre-processing loops on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// External solver command; HiGHS in-process when absent.
    #[arg(long, env = SOLVER_CMD_ENV)]
    solver_cmd: Option<String>,
    /// Extra arguments for the external solver ({mps}, {sol}, {start}, {gap}, {time} are substituted).
    #[arg(long, allow_hyphen_values = true, num_args = 1..)]
    solver_args: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u32,
}

impl SolverArgs {
    fn backend(&self) -> Box<dyn Backend> {
        match &self.solver_cmd {
            Some(cmd) => {
                let mut b = ExternalBackend::from_command_line(cmd).unwrap_or_else(|| ExternalBackend::new(cmd, vec![]));
                b.args.extend(self.solver_args.iter().cloned());
                Box::new(b)
            }
            None => Box::new(HighsBackend),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full search and write layout, iteration log and drawing.
    Solve {
        instance: PathBuf,
        /// Hourly per-turbine power CSV, overriding the instance setting.
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run only the feasibility phase.
    Feasibility {
        instance: PathBuf,
        #[arg(long, default_value = "feasible.json")]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Build the cost table for one candidate set.
    Costs {
        instance: PathBuf,
        #[arg(long)]
        dump_costs: PathBuf,
        /// Neighbour count; the full graph when absent.
        #[arg(long)]
        upsilon: Option<usize>,
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Audit a layout file against an instance.
    Verify { instance: PathBuf, layout: PathBuf },
    /// Generate a synthetic grid instance.
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1000.0)]
        spacing: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        n_oss: usize,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the MILP for one candidate set as MPS.
    ExportMps {
        instance: PathBuf,
        #[arg(long)]
        upsilon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Zero objective, as in the feasibility phase.
        #[arg(long)]
        zero_costs: bool,
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Solve an MPS file with HiGHS and write a name=value solution file.
    SolveMps {
        mps: PathBuf,
        sol: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        gap: f64,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        first_feasible: bool,
        #[arg(long)]
        start: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Driver(DriverError::FeasibilityExhausted { .. }) => EXIT_INFEASIBLE,
            CliError::Driver(DriverError::InvalidLayout(_)) => EXIT_INFEASIBLE,
            CliError::Driver(DriverError::Params(_)) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_FAILURE,
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| InputError::Io { path: path.into(), source: e }.into())
}

fn load(instance: &Path, series: Option<&Path>) -> Result<(FarmInstance, owf_core::CostModel), CliError> {
    let farm = io::parse_instance(instance)?;
    let series = match series {
        Some(p) => Some(io::parse_wind_series(p, farm.sys.turbine_power_w)?),
        None => farm.load_series()?,
    };
    let costs = farm.cost_model(series).map_err(|e| InputError::Schema { pointer: "/cables".into(), message: e.to_string() })?;
    Ok((farm, costs))
}

fn limits<'a>(farm: &FarmInstance, costs: &'a owf_core::CostModel) -> Limits<'a> {
    Limits { u_max: costs.u_max(), max_feeders: farm.max_feeders, oss_balance: farm.oss_balance, costs: Some(costs) }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Solve { instance, series, out, solver } => {
            let (farm, costs) = load(&instance, series.as_deref())?;
            let reduced = farm.reduced_graph();
            let backend = solver.backend();
            let driver = Driver {
                reduced: &reduced,
                costs: &costs,
                model: farm.model_options(),
                params: farm.params,
                backend: backend.as_ref(),
                exec,
                seed: solver.seed,
            };
            let outcome = driver.run()?;
            fs::create_dir_all(&out).map_err(|e| InputError::Io { path: out.clone(), source: e })?;
            let graph = knn_candidates_with(&reduced, reduced.n_wt().saturating_sub(1).max(1), CrossingTest::default(), exec);
            let violations = validate_layout(&outcome.best, &graph, limits(&farm, &costs));
            let file = LayoutFile { instance: farm.name.clone(), layout: outcome.best.clone(), validate: violations };
            file.write(&out.join("layout.json"))?;
            let mut csv = Vec::new();
            outcome.log.write_csv(&mut csv).map_err(other)?;
            write_file(&out.join("iterations.csv"), csv)?;
            write_file(&out.join("iterations.json"), serde_json::to_string_pretty(&outcome.log).map_err(other)?)?;
            io::render_svg(Some(&outcome.best), &farm, &out.join("layout.svg"))?;
            println!(
                "objective {} ({:?}, certified: {})",
                outcome.best.objective, outcome.termination, outcome.certified
            );
            if !file.validate.is_empty() {
                return Ok(EXIT_INFEASIBLE);
            }
            Ok(if outcome.certified { 0 } else { EXIT_GAP_UNMET })
        }
        Command::Feasibility { instance, out, solver } => {
            let (farm, costs) = load(&instance, None)?;
            let reduced = farm.reduced_graph();
            let backend = solver.backend();
            let driver = Driver {
                reduced: &reduced,
                costs: &costs,
                model: farm.model_options(),
                params: farm.params,
                backend: backend.as_ref(),
                exec,
                seed: solver.seed,
            };
            let mut log = owf_core::IterationLog::default();
            let (layout, upsilon) = driver.run_feasibility(&mut log)?;
            info!("feasible at upsilon {upsilon}");
            let graph = knn_candidates_with(&reduced, upsilon, CrossingTest::default(), exec);
            let mut lim = limits(&farm, &costs);
            lim.costs = None;
            let validate = validate_layout(&layout, &graph, lim);
            LayoutFile { instance: farm.name.clone(), layout, validate }.write(&out)?;
            println!("feasible at upsilon {upsilon}; written to {}", out.display());
            Ok(0)
        }
        Command::Costs { instance, dump_costs, upsilon, series } => {
            let (farm, costs) = load(&instance, series.as_deref())?;
            let reduced = farm.reduced_graph();
            let u = upsilon.unwrap_or(reduced.n_wt().saturating_sub(1).max(1));
            let graph = knn_candidates_with(&reduced, u, CrossingTest::default(), exec);
            let table = build_cost_table_with(&graph, &costs, false, exec);
            let f = fs::File::create(&dump_costs).map_err(|e| InputError::Io { path: dump_costs.clone(), source: e })?;
            table.write_csv(std::io::BufWriter::new(f)).map_err(other)?;
            println!("{} entries written to {}", table.len(), dump_costs.display());
            Ok(0)
        }
        Command::Verify { instance, layout } => {
            let (farm, costs) = load(&instance, None)?;
            let file = io::read_layout(&layout)?;
            let reduced = farm.reduced_graph();
            let graph = knn_candidates_with(&reduced, reduced.n_wt().saturating_sub(1).max(1), CrossingTest::default(), exec);
            let violations = validate_layout(&file.layout, &graph, limits(&farm, &costs));
            if violations.is_empty() {
                println!("ok: {} arcs, objective {}", file.layout.arcs.len(), file.layout.objective);
                Ok(0)
            } else {
                for v in &violations {
                    println!("{}", serde_json::to_string(v).map_err(other)?);
                }
                Ok(EXIT_INFEASIBLE)
            }
        }
        Command::Gen { rows, cols, spacing, seed, n_oss, jitter, out } => {
            if rows * cols < 2 || n_oss == 0 {
                return Err(InputError::Schema { pointer: "/nodes".into(), message: "need rows·cols ≥ 2 and at least one OSS".into() }.into());
            }
            let farm = io::gen_synthetic(SynthParams { rows, cols, spacing_m: spacing, n_oss, seed, jitter_m: jitter });
            let text = serde_json::to_string_pretty(&farm.to_json()).map_err(other)?;
            match out {
                Some(p) => write_file(&p, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::ExportMps { instance, upsilon, out, zero_costs, series } => {
            let (farm, costs) = load(&instance, series.as_deref())?;
            let reduced = farm.reduced_graph();
            let graph = knn_candidates_with(&reduced, upsilon, CrossingTest::default(), exec);
            let table = build_cost_table_with(&graph, &costs, zero_costs, exec);
            let model = match build_model(&graph, &table, farm.model_options()) {
                Ok(m) => m,
                Err(e @ ModelError::IsolatedTurbine(_)) => return Err(CliError::Infeasible(e.to_string())),
                Err(e) => return Err(other(e)),
            };
            match out {
                Some(p) => {
                    let f = fs::File::create(&p).map_err(|e| InputError::Io { path: p.clone(), source: e })?;
                    write_mps(&model, std::io::BufWriter::new(f)).map_err(other)?;
                }
                None => write_mps(&model, std::io::stdout().lock()).map_err(other)?,
            }
            Ok(0)
        }
        Command::SolveMps { mps, sol, gap, time_limit, first_feasible, start } => {
            let opts = SolveOptions {
                target_gap: gap,
                time_limit: time_limit.map(Duration::from_secs_f64),
                stop_at_first_feasible: first_feasible,
                ..Default::default()
            };
            let status = solve_mps_file(&mps, &sol, start.as_deref(), &opts).map_err(other)?;
            println!("{}", owf_core::solver::status_name(status));
            Ok(if status == owf_core::SolveStatus::Infeasible { EXIT_INFEASIBLE } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
