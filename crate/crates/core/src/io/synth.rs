//! Synthetic grid farms and wind series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Weibull};

use super::{Currency, FarmInstance};
use crate::costs::ObjectiveMode;
use crate::driver::AlgorithmParams;
use crate::electrical::{CableType, LineModel, SystemParams, WindSeries};
use crate::graph::Node;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub rows: usize,
    pub cols: usize,
    pub spacing_m: f64,
    pub n_oss: usize,
    pub seed: u64,
    /// Each coordinate is shifted uniformly within `±jitter_m`.
    pub jitter_m: f64,
}

/// A grid farm with a 33 kV, 3 MW, two-cable skeleton.
///
/// Turbines are numbered row by row with x varying fastest. OSSs sit one
/// spacing outside the grid at the midpoints of the bottom, top, left and
/// right edges, in that order, moving further out on each further lap.
pub fn gen_synthetic(p: SynthParams) -> FarmInstance {
    assert!(p.rows * p.cols >= 2, "need at least two turbines");
    assert!(p.n_oss >= 1, "need at least one OSS");
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let s = p.spacing_m;
    let w = (p.cols - 1) as f64 * s;
    let h = (p.rows - 1) as f64 * s;
    let mut nodes = Vec::with_capacity(p.n_oss + p.rows * p.cols);
    for o in 0..p.n_oss {
        let lap = (o / 4 + 1) as f64 * s;
        let (x, y) = match o % 4 {
            0 => (w / 2.0, -lap),
            1 => (w / 2.0, h + lap),
            2 => (-lap, h / 2.0),
            _ => (w + lap, h / 2.0),
        };
        nodes.push(Node::oss(o as u32 + 1, x, y));
    }
    let mut id = p.n_oss as u32 + 1;
    for r in 0..p.rows {
        for c in 0..p.cols {
            let (mut x, mut y) = (c as f64 * s, r as f64 * s);
            if p.jitter_m > 0.0 {
                x += rng.random_range(-p.jitter_m..=p.jitter_m);
                y += rng.random_range(-p.jitter_m..=p.jitter_m);
            }
            nodes.push(Node::wt(id, x, y));
            id += 1;
        }
    }
    FarmInstance {
        name: format!("grid_{}x{}_s{}", p.rows, p.cols, p.seed),
        nodes,
        sys: SystemParams {
            nominal_voltage_v: 33e3,
            turbine_power_w: 3e6,
            lifetime_years: 25,
            discount_rate: 0.0,
            energy_price_per_mwh: 0.0,
        },
        cables: vec![CableType::simple("c7", 7, 0.44), CableType::simple("c10", 10, 0.62)],
        params: AlgorithmParams::default(),
        mode: ObjectiveMode::I,
        max_feeders: 10,
        oss_balance: 1.0,
        line: LineModel::default(),
        currency: Currency::Meur,
        series: None,
    }
}

/// Hourly turbine output from Weibull wind speeds through a generic power
/// curve (cut-in 3 m/s, rated 12 m/s, cut-out 25 m/s), `years` distinct years.
pub fn synthetic_series(seed: u64, rated_w: f64, years: usize, scale_ms: f64, shape: f64) -> WindSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Weibull::new(scale_ms, shape).expect("positive Weibull parameters");
    let curve = |v: f64| -> f64 {
        if !(3.0..25.0).contains(&v) {
            0.0
        } else if v >= 12.0 {
            rated_w
        } else {
            rated_w * (v.powi(3) - 27.0) / (1728.0 - 27.0)
        }
    };
    let data = (0..years.max(1))
        .map(|_| (0..super::series::HOURS_PER_YEAR).map(|_| curve(dist.sample(&mut rng))).collect())
        .collect();
    WindSeries::per_year(data)
}
