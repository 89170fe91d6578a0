mod common;

use owf_core::driver::{DriverError, Phase};
use owf_core::graph::{build_reduced_graph, knn_candidates};
use owf_core::io::synth::{gen_synthetic, SynthParams};
use owf_core::model::{build_model, warm_start};
use owf_core::validate::{validate_layout, Limits};
use owf_core::{build_cost_table, AlgorithmParams, Driver, Execution, HighsBackend, IterationLog, Termination};

use common::{audit, limits, small_case, solve_exact};

fn params(f: (usize, usize, usize), o: (usize, usize, usize)) -> AlgorithmParams {
    AlgorithmParams {
        upsilon_f_min: f.0,
        upsilon_f_step: f.1,
        upsilon_f_max: f.2,
        upsilon_o_min: o.0,
        upsilon_o_step: o.1,
        upsilon_o_max: o.2,
        ..AlgorithmParams::default()
    }
}

#[test]
fn one_feeder_cannot_carry_the_farm() {
    let c = small_case(3, 6, 1, [(2, 0.3), (4, 0.5)]);
    let reduced = build_reduced_graph(&c.nodes).unwrap();
    let driver = Driver {
        reduced: &reduced,
        costs: &c.costs,
        model: c.opts,
        params: params((1, 1, 5), (2, 1, 5)),
        backend: &HighsBackend,
        exec: Execution::Sequential,
        seed: 0,
    };
    let mut log = IterationLog::default();
    assert!(matches!(driver.run_feasibility(&mut log), Err(DriverError::FeasibilityExhausted { .. })));
    assert!(!log.records.is_empty());
}

#[test]
fn saturated_feasibility_schedule_runs_once() {
    let c = small_case(4, 6, 3, [(2, 0.3), (4, 0.5)]);
    let reduced = build_reduced_graph(&c.nodes).unwrap();
    let driver = Driver {
        reduced: &reduced,
        costs: &c.costs,
        model: c.opts,
        params: params((5, 1, 9), (5, 1, 9)),
        backend: &HighsBackend,
        exec: Execution::Sequential,
        seed: 0,
    };
    let mut log = IterationLog::default();
    let (sol, u) = driver.run_feasibility(&mut log).unwrap();
    assert_eq!(u, 5);
    assert_eq!(log.records.len(), 1);
    // Zero-cost layouts carry no cable choice, so ratings are not audited.
    let lim = Limits { costs: None, ..limits(&c.costs, &c.opts) };
    assert_eq!(validate_layout(&sol, &knn_candidates(&reduced, u), lim), vec![]);
}

#[test]
fn small_farm_matches_full_optimum() {
    let c = small_case(21, 7, 3, [(2, 0.3), (4, 0.5)]);
    let reduced = build_reduced_graph(&c.nodes).unwrap();
    let driver = Driver {
        reduced: &reduced,
        costs: &c.costs,
        model: c.opts,
        params: AlgorithmParams { target_gap: 0.0, ..params((2, 1, 6), (3, 1, 6)) },
        backend: &HighsBackend,
        exec: Execution::Parallel,
        seed: 0,
    };
    let out = driver.run().unwrap();
    let full = knn_candidates(&reduced, 6);
    assert!(audit(&out.best, &full, &c.costs, &c.opts).is_empty());
    let best = solve_exact(&full, &c.costs, c.opts).unwrap().unwrap();
    assert!(out.best.objective >= best.objective - 1e-9);
    if out.termination == Termination::Complete {
        assert!((out.best.objective - best.objective).abs() <= 1e-6 * best.objective);
    }
    let objs: Vec<f64> = out.log.records.iter().filter(|r| r.phase == Phase::Optimization).filter_map(|r| r.objective).collect();
    assert!(objs.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{objs:?}");
    assert!(out.log.records.iter().filter(|r| r.phase == Phase::Optimization).all(|r| r.recalculated_gap.is_some()));
}

#[test]
fn grid_warm_start_embeds_from_15_to_20() {
    let farm = gen_synthetic(SynthParams { rows: 4, cols: 6, spacing_m: 800.0, n_oss: 1, seed: 9, jitter_m: 60.0 });
    let costs = farm.cost_model(None).unwrap();
    let reduced = farm.reduced_graph();
    let g15 = knn_candidates(&reduced, 15);
    let g20 = knn_candidates(&reduced, 20);
    assert!(g15.arc_keys().is_subset(g20.arc_keys()));
    let sol = solve_exact(&g15, &costs, farm.model_options()).unwrap().unwrap();
    let table = build_cost_table(&g20, &costs, false);
    let model = build_model(&g20, &table, farm.model_options()).unwrap();
    let start = warm_start(&model, &sol).unwrap();
    assert!((model.objective_value(&start) - sol.objective).abs() <= 1e-9 * sol.objective);
}

#[test]
fn rejects_bad_schedule() {
    let c = small_case(1, 4, 3, [(2, 0.3), (4, 0.5)]);
    let reduced = build_reduced_graph(&c.nodes).unwrap();
    let driver = Driver {
        reduced: &reduced,
        costs: &c.costs,
        model: c.opts,
        params: params((3, 0, 5), (3, 1, 5)),
        backend: &HighsBackend,
        exec: Execution::Sequential,
        seed: 0,
    };
    assert!(matches!(driver.run(), Err(DriverError::Params(_))));
}
