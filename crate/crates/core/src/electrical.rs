//! Cable capacity, the distributed-parameter line model and annual losses.
//!
//! Conventions: voltages are line-to-line volts, powers watts (or VA),
//! per-length cable parameters are per km, arc lengths are meters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Ratios within this distance of an integer are snapped before flooring.
const CAPACITY_SNAP: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ElectricalError {
    #[error("cable `{0}` cannot carry a single turbine")]
    ZeroCapacity(String),
    #[error("cable capacities must be strictly increasing in list order: {0:?}")]
    NonIncreasingCapacities(Vec<u32>),
    #[error("cable `{name}`: capacity override {given} disagrees with rated current ({computed})")]
    CapacityMismatch { name: String, given: u32, computed: u32 },
    #[error("cable `{0}` needs either a rated current or a capacity")]
    MissingRating(String),
    #[error("zero shunt admittance on a line of positive length: characteristic impedance undefined")]
    InvalidCableModel,
    #[error("wind series does not cover year {year} ({available} year(s) available)")]
    SeriesLengthMismatch { year: usize, available: usize },
    #[error("empty cable list")]
    NoCables,
}

/// Capital cost of a cable per km, either given directly or via the
/// exponential regression on rated power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capex {
    PerKm(f64),
    Regression { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CableType {
    pub name: String,
    /// Steady-state rated current, A.
    pub rated_current_a: Option<f64>,
    /// Direct capacity in turbines; must agree with the rated current if both are set.
    pub capacity_override: Option<u32>,
    pub series_impedance_per_km: Complex64,
    pub shunt_admittance_per_km: Complex64,
    pub ac_resistance_per_km: f64,
    pub screen_loss_factor: f64,
    pub armour_loss_factor: f64,
    pub dielectric_loss_w_per_m: f64,
    pub capex: Capex,
    pub install_per_km: f64,
}

impl CableType {
    /// A cable described only by capacity and cost, with no shunt branch.
    pub fn simple(name: &str, capacity: u32, cost_per_km: f64) -> Self {
        Self {
            name: name.to_string(),
            rated_current_a: None,
            capacity_override: Some(capacity),
            series_impedance_per_km: Complex64::new(0.0, 0.0),
            shunt_admittance_per_km: Complex64::new(0.0, 0.0),
            ac_resistance_per_km: 0.0,
            screen_loss_factor: 0.0,
            armour_loss_factor: 0.0,
            dielectric_loss_w_per_m: 0.0,
            capex: Capex::PerKm(cost_per_km),
            install_per_km: 0.0,
        }
    }

    /// Rated apparent power S_r = √3·V_n·I_t, VA. With only a capacity
    /// override, the largest power consistent with it is taken: u·P_n.
    pub fn rated_power(&self, sys: &SystemParams) -> Result<f64, ElectricalError> {
        match (self.rated_current_a, self.capacity_override) {
            (Some(i), _) => Ok(SQRT3 * sys.nominal_voltage_v * i),
            (None, Some(u)) => Ok(u as f64 * sys.turbine_power_w),
            (None, None) => Err(ElectricalError::MissingRating(self.name.clone())),
        }
    }

    /// Capital plus installation cost per km.
    pub fn cost_per_km(&self, sys: &SystemParams) -> Result<f64, ElectricalError> {
        let capex = match self.capex {
            Capex::PerKm(c) => c,
            Capex::Regression { a, b, c } => capex_regression(a, b, c, self.rated_power(sys)?),
        };
        Ok(capex + self.install_per_km)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub nominal_voltage_v: f64,
    pub turbine_power_w: f64,
    pub lifetime_years: u32,
    pub discount_rate: f64,
    pub energy_price_per_mwh: f64,
}

/// Sign in front of the charging-current term of the sending-end current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargingSign {
    /// `I = I_r cosh(γd) − (V/Z_c) sinh(γd)`.
    #[default]
    Minus,
    /// Conventional two-port relation, `+` before the sinh term.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LineModel {
    /// Drop the hyperbolic terms entirely: `I = flow/(√3·V_n)`.
    pub neglect_shunt: bool,
    pub charging_sign: ChargingSign,
}

/// Capacity in turbines, `floor(S_r / P_n)`.
pub fn cable_capacity(cable: &CableType, sys: &SystemParams) -> Result<u32, ElectricalError> {
    let computed = match cable.rated_current_a {
        Some(_) => {
            let ratio = cable.rated_power(sys)? / sys.turbine_power_w;
            (ratio + CAPACITY_SNAP).floor() as u32
        }
        None => cable
            .capacity_override
            .ok_or_else(|| ElectricalError::MissingRating(cable.name.clone()))?,
    };
    if let Some(given) = cable.capacity_override {
        if given != computed {
            return Err(ElectricalError::CapacityMismatch {
                name: cable.name.clone(),
                given,
                computed,
            });
        }
    }
    if computed == 0 {
        return Err(ElectricalError::ZeroCapacity(cable.name.clone()));
    }
    Ok(computed)
}

/// Capacities in cable-list order; must be strictly increasing.
pub fn capacity_set(cables: &[CableType], sys: &SystemParams) -> Result<Vec<u32>, ElectricalError> {
    if cables.is_empty() {
        return Err(ElectricalError::NoCables);
    }
    let caps = cables
        .iter()
        .map(|c| cable_capacity(c, sys))
        .collect::<Result<Vec<_>, _>>()?;
    if caps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ElectricalError::NonIncreasingCapacities(caps));
    }
    Ok(caps)
}

/// `a + b·exp((c·S_r/1e8)²)`, cost per km.
pub fn capex_regression(a: f64, b: f64, c: f64, rated_power_va: f64) -> f64 {
    let e = c * rated_power_va / 1e8;
    a + b * (e * e).exp()
}

/// Per-(cable, length) constants of the sending-end current,
/// `I(flow) = flow·coef + charging`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineConstants {
    pub flow_coef: Complex64,
    pub charging: Complex64,
}

impl LineConstants {
    /// Builds the constants. A cable with zero shunt admittance is evaluated in
    /// its exact zero-shunt limit (`cosh → 1`, `(V/Z_c)·sinh → 0`).
    pub fn new(cable: &CableType, length_m: f64, sys: &SystemParams, model: LineModel) -> Self {
        Self::with_unit(
            cable.series_impedance_per_km,
            cable.shunt_admittance_per_km,
            length_m / 1000.0,
            sys.nominal_voltage_v,
            model,
        )
    }

    fn with_unit(z: Complex64, y: Complex64, length: f64, v: f64, model: LineModel) -> Self {
        let base = Complex64::new(1.0 / (SQRT3 * v), 0.0);
        if model.neglect_shunt || length == 0.0 || y == Complex64::new(0.0, 0.0) {
            return Self { flow_coef: base, charging: Complex64::new(0.0, 0.0) };
        }
        let gamma_d = (z * y).sqrt() * length;
        let zc = (z / y).sqrt();
        let charging = gamma_d.sinh() * v / zc;
        let charging = match model.charging_sign {
            ChargingSign::Minus => -charging,
            ChargingSign::Plus => charging,
        };
        Self { flow_coef: gamma_d.cosh() * base, charging }
    }

    #[inline]
    pub fn current(&self, flow_w: f64) -> Complex64 {
        self.flow_coef * flow_w + self.charging
    }
}

/// Sending-end phasor current for a given power flow, A.
pub fn arc_current(
    flow_w: f64,
    cable: &CableType,
    length_m: f64,
    sys: &SystemParams,
    model: LineModel,
) -> Result<Complex64, ElectricalError> {
    if !model.neglect_shunt && length_m > 0.0 && cable.shunt_admittance_per_km == Complex64::new(0.0, 0.0) {
        return Err(ElectricalError::InvalidCableModel);
    }
    Ok(LineConstants::new(cable, length_m, sys, model).current(flow_w))
}

/// Worst-case apparent power of an arc carrying `k` turbines at rated power, VA.
pub fn arc_power(k: u32, cable: &CableType, length_m: f64, sys: &SystemParams, model: LineModel) -> f64 {
    let consts = LineConstants::new(cable, length_m, sys, model);
    SQRT3 * sys.nominal_voltage_v * consts.current(k as f64 * sys.turbine_power_w).norm()
}

/// Hourly per-turbine power, W, one vector per distinct year.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSeries {
    years: Vec<Vec<f64>>,
}

impl WindSeries {
    /// A single representative year, replicated over the lifetime.
    pub fn single_year(hourly_power_w: Vec<f64>) -> Self {
        Self { years: vec![hourly_power_w] }
    }

    pub fn per_year(years: Vec<Vec<f64>>) -> Self {
        Self { years }
    }

    pub fn distinct_years(&self) -> usize {
        self.years.len()
    }

    pub fn years(&self) -> &[Vec<f64>] {
        &self.years
    }

    /// Index into [`Self::years`] for operational year `mu` (1-based).
    pub fn year_index(&self, mu: usize) -> Result<usize, ElectricalError> {
        match self.years.len() {
            1 if mu >= 1 => Ok(0),
            n if mu >= 1 && mu <= n => Ok(mu - 1),
            n => Err(ElectricalError::SeriesLengthMismatch { year: mu, available: n }),
        }
    }

    pub fn year(&self, mu: usize) -> Result<&[f64], ElectricalError> {
        Ok(&self.years[self.year_index(mu)?])
    }

    pub fn capacity_factor(&self, rated_w: f64) -> f64 {
        let (sum, n) = self
            .years
            .iter()
            .flatten()
            .fold((0.0, 0usize), |(s, n), p| (s + p, n + 1));
        sum / (n as f64 * rated_w)
    }
}

/// Ohmic and dielectric losses of one year, MWh, with 1 h slots.
pub fn annual_losses(
    k: u32,
    cable: &CableType,
    length_m: f64,
    sys: &SystemParams,
    model: LineModel,
    series: &WindSeries,
    year: usize,
) -> Result<f64, ElectricalError> {
    let consts = LineConstants::new(cable, length_m, sys, model);
    Ok(losses_with_constants(&consts, k, cable, length_m / 1000.0, series.year(year)?))
}

/// Losses for precomputed line constants. `length_km` multiplies the per-km
/// resistance; the dielectric term uses W/m and converts internally.
pub(crate) fn losses_with_constants(
    consts: &LineConstants,
    k: u32,
    cable: &CableType,
    length_km: f64,
    hours: &[f64],
) -> f64 {
    let ohmic_factor = 3.0 * (1.0 + cable.screen_loss_factor + cable.armour_loss_factor);
    let resistance = cable.ac_resistance_per_km * length_km;
    let k = k as f64;
    let sum_sq: f64 = hours.iter().map(|&p| consts.current(k * p).norm_sqr()).sum();
    let ohmic_wh = ohmic_factor * resistance * sum_sq;
    let dielectric_wh = 3.0 * hours.len() as f64 * cable.dielectric_loss_w_per_m * length_km * 1000.0;
    (ohmic_wh + dielectric_wh) / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sys(v: f64, pn: f64) -> SystemParams {
        SystemParams {
            nominal_voltage_v: v,
            turbine_power_w: pn,
            lifetime_years: 30,
            discount_rate: 0.05,
            energy_price_per_mwh: 40.0,
        }
    }

    fn rated(name: &str, amps: f64) -> CableType {
        CableType { rated_current_a: Some(amps), capacity_override: None, ..CableType::simple(name, 1, 0.3) }
    }

    pub(crate) fn xlpe_240() -> CableType {
        CableType {
            name: "240".into(),
            rated_current_a: Some(470.0),
            capacity_override: None,
            series_impedance_per_km: Complex64::new(0.0754, 0.119),
            shunt_admittance_per_km: Complex64::new(0.0, 7.54e-5),
            ac_resistance_per_km: 0.0754,
            screen_loss_factor: 0.05,
            armour_loss_factor: 0.1,
            dielectric_loss_w_per_m: 0.011,
            capex: Capex::PerKm(0.3),
            install_per_km: 0.06,
        }
    }

    #[test]
    fn capacity_from_rated_current() {
        let s = sys(33e3, 3.6e6);
        let c = rated("a", 300.0);
        // √3·33e3·300 = 17.147 MVA; /3.6 MW = 4.76.
        assert_relative_eq!(c.rated_power(&s).unwrap(), 17_147_302.99, max_relative = 1e-9);
        assert_eq!(cable_capacity(&c, &s).unwrap(), 4);
    }

    #[test]
    fn capacity_boundary_and_zero() {
        let s = sys(33e3, 3.6e6);
        let exact = rated("b", 3.6e6 / (SQRT3 * 33e3));
        assert_eq!(cable_capacity(&exact, &s).unwrap(), 1);
        let tiny = rated("c", 10.0);
        assert_eq!(cable_capacity(&tiny, &s), Err(ElectricalError::ZeroCapacity("c".into())));
    }

    #[test]
    fn capacity_override_must_agree() {
        let s = sys(33e3, 3.6e6);
        let mut c = rated("d", 300.0);
        c.capacity_override = Some(4);
        assert_eq!(cable_capacity(&c, &s).unwrap(), 4);
        c.capacity_override = Some(5);
        assert!(matches!(cable_capacity(&c, &s), Err(ElectricalError::CapacityMismatch { .. })));
    }

    #[test]
    fn capacity_sets() {
        let s = sys(33e3, 3.0e6);
        let th = [CableType::simple("4", 7, 0.44), CableType::simple("5", 10, 0.62)];
        let u = capacity_set(&th, &s).unwrap();
        assert_eq!(u, vec![7, 10]);
        assert_eq!(*u.iter().max().unwrap(), 10);
        let wds = [
            CableType::simple("1", 7, 0.36),
            CableType::simple("2", 10, 0.58),
            CableType::simple("3", 13, 0.90),
        ];
        assert_eq!(capacity_set(&wds, &s).unwrap(), vec![7, 10, 13]);
        assert_eq!(capacity_set(&[CableType::simple("x", 5, 1.0)], &s).unwrap(), vec![5]);
        let dup = [CableType::simple("a", 7, 0.4), CableType::simple("b", 7, 0.5)];
        assert_eq!(capacity_set(&dup, &s), Err(ElectricalError::NonIncreasingCapacities(vec![7, 7])));
    }

    #[test]
    fn capacity_bracket_invariant() {
        let s = sys(33e3, 3.6e6);
        for amps in (100..2000).step_by(37) {
            let c = rated("r", amps as f64);
            if let Ok(u) = cable_capacity(&c, &s) {
                let sr = c.rated_power(&s).unwrap();
                assert!(u as f64 * s.turbine_power_w <= sr * (1.0 + 1e-12));
                assert!(sr < (u + 1) as f64 * s.turbine_power_w);
            }
        }
    }

    #[test]
    fn regression_cost() {
        assert_eq!(capex_regression(0.4, 0.0, 3.0, 2e7), 0.4);
        assert_eq!(capex_regression(0.4, 0.2, 0.0, 2e7), 0.4 + 0.2);
        // 0.1 + 0.2·e^{0.36}
        assert_relative_eq!(capex_regression(0.1, 0.2, 3.0, 20e6), 0.1 + 0.2 * 0.36f64.exp(), max_relative = 1e-12);
        assert!((capex_regression(0.1, 0.2, 3.0, 20e6) - 0.38666).abs() < 1e-5);
    }

    #[test]
    fn zero_length_current_is_nominal() {
        let s = sys(33e3, 3.6e6);
        let c = xlpe_240();
        let i = arc_current(5.0 * 3.6e6, &c, 0.0, &s, LineModel::default()).unwrap();
        assert_eq!(i, Complex64::new(5.0 * 3.6e6 / (SQRT3 * 33e3), 0.0));
        let s3 = sys(33e3, 3e6);
        assert_relative_eq!(arc_power(3, &c, 0.0, &s3, LineModel::default()), 9e6, max_relative = 1e-15);
    }

    #[test]
    fn zero_flow_is_charging_current() {
        let s = sys(33e3, 3.6e6);
        let c = xlpe_240();
        let d_km = 2.0;
        let i = arc_current(0.0, &c, d_km * 1000.0, &s, LineModel::default()).unwrap();
        let z = c.series_impedance_per_km;
        let y = c.shunt_admittance_per_km;
        let expected = (33e3 / (z / y).sqrt() * ((z * y).sqrt() * d_km).sinh()).norm();
        assert_relative_eq!(i.norm(), expected, max_relative = 1e-12);
    }

    #[test]
    fn zero_shunt_handling() {
        let s = sys(33e3, 3.0e6);
        let c = CableType::simple("l", 10, 0.5);
        assert_eq!(arc_current(1e6, &c, 100.0, &s, LineModel::default()), Err(ElectricalError::InvalidCableModel));
        for d in [0.0, 10.0, 5000.0] {
            assert_relative_eq!(arc_power(4, &c, d, &s, LineModel::default()), 12e6, max_relative = 1e-15);
        }
        let neglect = LineModel { neglect_shunt: true, ..Default::default() };
        assert!(arc_current(1e6, &c, 100.0, &s, neglect).is_ok());
    }

    #[test]
    fn power_non_decreasing_in_load() {
        let s = sys(33e3, 3.6e6);
        let c = xlpe_240();
        for sign in [ChargingSign::Minus, ChargingSign::Plus] {
            let model = LineModel { neglect_shunt: false, charging_sign: sign };
            for d in [500.0, 2000.0, 8000.0] {
                let ps: Vec<f64> = (1..=13).map(|k| arc_power(k, &c, d, &s, model)).collect();
                assert!(ps.windows(2).all(|w| w[0] <= w[1]), "{ps:?}");
            }
        }
    }

    #[test]
    fn no_dissipation_means_no_losses() {
        let s = sys(33e3, 3.6e6);
        let mut c = xlpe_240();
        c.ac_resistance_per_km = 0.0;
        c.dielectric_loss_w_per_m = 0.0;
        let series = WindSeries::single_year(vec![2e6; 8760]);
        assert_eq!(annual_losses(5, &c, 3000.0, &s, LineModel::default(), &series, 1).unwrap(), 0.0);
    }

    #[test]
    fn zero_flow_losses_closed_form() {
        let s = sys(33e3, 3.6e6);
        let c = xlpe_240();
        let series = WindSeries::single_year(vec![0.0; 8760]);
        let d = 2500.0;
        let model = LineModel::default();
        let got = annual_losses(3, &c, d, &s, model, &series, 1).unwrap();
        let ich = arc_current(0.0, &c, d, &s, model).unwrap().norm();
        let ohmic = 3.0 * 1.15 * 8760.0 * 0.0754 * 2.5 * ich * ich;
        let dielectric = 3.0 * 8760.0 * 0.011 * d;
        assert_relative_eq!(got, (ohmic + dielectric) / 1e6, max_relative = 1e-12);
    }

    #[test]
    fn full_power_zero_shunt_closed_form() {
        let s = sys(33e3, 3.6e6);
        let mut c = xlpe_240();
        c.shunt_admittance_per_km = Complex64::new(0.0, 0.0);
        let series = WindSeries::single_year(vec![3.6e6; 8760]);
        let (k, d) = (4u32, 1800.0);
        let got = annual_losses(k, &c, d, &s, LineModel::default(), &series, 7).unwrap();
        let i = k as f64 * 3.6e6 / (SQRT3 * 33e3);
        let expected = 3.0 * 1.15 * 8760.0 * 0.0754 * 1.8 * i * i + 3.0 * 8760.0 * 0.011 * d;
        assert_relative_eq!(got, expected / 1e6, max_relative = 1e-12);
    }

    #[test]
    fn losses_additive_and_linear_in_resistance() {
        let s = sys(33e3, 3.6e6);
        let mut c = xlpe_240();
        c.shunt_admittance_per_km = Complex64::new(0.0, 0.0);
        c.dielectric_loss_w_per_m = 0.0;
        let hours: Vec<f64> = (0..100).map(|h| (h as f64 * 0.37).sin().abs() * 3.6e6).collect();
        let consts = LineConstants::new(&c, 1500.0, &s, LineModel::default());
        let whole = losses_with_constants(&consts, 3, &c, 1.5, &hours);
        let parts = losses_with_constants(&consts, 3, &c, 1.5, &hours[..37])
            + losses_with_constants(&consts, 3, &c, 1.5, &hours[37..]);
        assert_relative_eq!(whole, parts, max_relative = 1e-12);
        let mut c2 = c.clone();
        c2.ac_resistance_per_km *= 2.5;
        assert_relative_eq!(losses_with_constants(&consts, 3, &c2, 1.5, &hours), 2.5 * whole, max_relative = 1e-12);
    }

    #[test]
    fn dimensional_round_trip() {
        // Per-km parameters with km lengths vs per-m parameters with m lengths.
        let c = xlpe_240();
        let v = 33e3;
        let model = LineModel::default();
        let d_km = 3.2;
        let km = LineConstants::with_unit(c.series_impedance_per_km, c.shunt_admittance_per_km, d_km, v, model);
        let m = LineConstants::with_unit(
            c.series_impedance_per_km / 1000.0,
            c.shunt_admittance_per_km / 1000.0,
            d_km * 1000.0,
            v,
            model,
        );
        for flow in [0.0, 1e6, 2.5e7] {
            assert_relative_eq!(km.current(flow).norm(), m.current(flow).norm(), max_relative = 1e-9);
        }
    }

    #[test]
    fn series_years() {
        let one = WindSeries::single_year(vec![1.0; 4]);
        assert_eq!(one.year_index(30).unwrap(), 0);
        let two = WindSeries::per_year(vec![vec![1.0; 4], vec![2.0; 4]]);
        assert_eq!(two.year_index(2).unwrap(), 1);
        assert!(matches!(two.year(3), Err(ElectricalError::SeriesLengthMismatch { .. })));
        assert_relative_eq!(two.capacity_factor(4.0), 0.375);
    }
}
