//! Radial cable layouts for offshore wind farm collection systems.
//!
//! Pipeline: [`graph`] builds candidate arcs and crossing pairs,
//! [`costs`] prices every `(arc, load)` pair with the [`electrical`] model,
//! [`model`] assembles the MILP, a [`solver`] backend solves it, and
//! [`driver`] grows the candidate set until the optimum stops changing
//! neighbourhood. [`validate`] audits any layout independently.

pub mod costs;
pub mod driver;
pub mod electrical;
pub mod exec;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod model;
pub mod mps;
pub mod solver;
pub mod validate;

pub use costs::{build_cost_table, CostModel, CostTable, ObjectiveMode};
pub use driver::{AlgorithmParams, Driver, IterationLog, Outcome, Termination};
pub use exec::Execution;
pub use graph::{build_reduced_graph, knn_candidates, CandidateGraph, Node, NodeId};
pub use model::{build_model, LayoutSolution, ModelOptions, SolveStatus};
pub use solver::{Backend, ExternalBackend, HighsBackend, SolveOptions};
pub use validate::{validate_layout, Limits, Violation};
