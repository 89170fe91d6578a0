//! JSON farm instances with unit-suffixed keys.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::InputError;
use crate::costs::{CostError, CostModel, ObjectiveMode};
use crate::driver::AlgorithmParams;
use crate::electrical::{capacity_set, CableType, Capex, ChargingSign, LineModel, SystemParams, WindSeries};
use crate::graph::{build_reduced_graph, Node, NodeKind, ReducedGraph};
use crate::model::ModelOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Currency {
    Eur,
    Meur,
}

impl Currency {
    /// Euros per unit.
    pub fn scale(self) -> f64 {
        match self {
            Currency::Eur => 1.0,
            Currency::Meur => 1e6,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Currency::Eur => "EUR",
            Currency::Meur => "MEUR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesSource {
    /// CSV path, relative paths resolved against the instance file.
    File(PathBuf),
    /// Every hour at this fraction of rated turbine power.
    ConstantCapacityFactor(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarmInstance {
    pub name: String,
    pub nodes: Vec<Node>,
    pub sys: SystemParams,
    pub cables: Vec<CableType>,
    pub params: AlgorithmParams,
    pub mode: ObjectiveMode,
    pub max_feeders: u32,
    pub oss_balance: f64,
    pub line: LineModel,
    pub currency: Currency,
    pub series: Option<SeriesSource>,
}

impl FarmInstance {
    pub fn reduced_graph(&self) -> ReducedGraph {
        build_reduced_graph(&self.nodes).expect("validated at parse")
    }

    pub fn model_options(&self) -> ModelOptions {
        ModelOptions { max_feeders: self.max_feeders, oss_balance: self.oss_balance, ..Default::default() }
    }

    pub fn n_oss(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Oss).count()
    }

    pub fn n_wt(&self) -> usize {
        self.nodes.len() - self.n_oss()
    }

    /// Loads the configured series, if any.
    pub fn load_series(&self) -> Result<Option<WindSeries>, InputError> {
        Ok(match &self.series {
            None => None,
            Some(SeriesSource::File(p)) => Some(super::parse_wind_series(p, self.sys.turbine_power_w)?),
            Some(SeriesSource::ConstantCapacityFactor(cf)) => {
                Some(WindSeries::single_year(vec![cf * self.sys.turbine_power_w; 8760]))
            }
        })
    }

    /// Cost model with the given series (or the configured one when `None`).
    pub fn cost_model(&self, series: Option<WindSeries>) -> Result<CostModel, CostError> {
        CostModel::new(self.cables.clone(), self.sys, self.line, self.mode, series, self.currency.scale())
    }

    pub fn to_json(&self) -> Value {
        let cur = self.currency.suffix();
        let cables: Vec<Value> = self
            .cables
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), json!(c.name));
                if let Some(i) = c.rated_current_a {
                    m.insert("rated_current_A".into(), json!(i));
                }
                if let Some(u) = c.capacity_override {
                    m.insert("capacity_wt".into(), json!(u));
                }
                let z = c.series_impedance_per_km;
                let y = c.shunt_admittance_per_km;
                m.insert("series_impedance_ohm_per_km".into(), json!([z.re, z.im]));
                m.insert("shunt_admittance_S_per_km".into(), json!([y.re, y.im]));
                m.insert("ac_resistance_ohm_per_km".into(), json!(c.ac_resistance_per_km));
                m.insert("screen_loss_factor".into(), json!(c.screen_loss_factor));
                m.insert("armour_loss_factor".into(), json!(c.armour_loss_factor));
                m.insert("dielectric_loss_W_per_m".into(), json!(c.dielectric_loss_w_per_m));
                match c.capex {
                    Capex::PerKm(v) => {
                        m.insert(format!("capex_{cur}_per_km"), json!(v));
                    }
                    Capex::Regression { a, b, c } => {
                        m.insert(format!("capex_regression_{cur}_per_km"), json!({"a": a, "b": b, "c": c}));
                    }
                }
                m.insert(format!("install_{cur}_per_km"), json!(c.install_per_km));
                Value::Object(m)
            })
            .collect();
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let kind = if n.kind == NodeKind::Oss { "oss" } else { "wt" };
                json!({"id": n.id, "kind": kind, "x_m": n.position.x, "y_m": n.position.y})
            })
            .collect();
        let p = &self.params;
        let mut algorithm = json!({
            "upsilon_f": [p.upsilon_f_min, p.upsilon_f_step, p.upsilon_f_max],
            "upsilon_o": [p.upsilon_o_min, p.upsilon_o_step, p.upsilon_o_max],
            "target_gap": p.target_gap,
        });
        if let Some(t) = p.time_limit_s {
            algorithm["time_limit_s"] = json!(t);
        }
        let mut v = json!({
            "name": self.name,
            "objective": format!("{:?}", self.mode),
            "system": {
                "nominal_voltage_kV": self.sys.nominal_voltage_v / 1e3,
                "turbine_power_MW": self.sys.turbine_power_w / 1e6,
                "lifetime_years": self.sys.lifetime_years,
                "discount_rate": self.sys.discount_rate,
                "energy_price_EUR_per_MWh": self.sys.energy_price_per_mwh,
            },
            "max_feeders": self.max_feeders,
            "oss_balance": self.oss_balance,
            "line_model": {
                "neglect_shunt": self.line.neglect_shunt,
                "charging_sign": match self.line.charging_sign { ChargingSign::Minus => "minus", ChargingSign::Plus => "plus" },
            },
            "algorithm": algorithm,
            "cables": cables,
            "nodes": nodes,
        });
        match &self.series {
            Some(SeriesSource::File(p)) => v["wind_series"] = json!({"path": p.display().to_string()}),
            Some(SeriesSource::ConstantCapacityFactor(cf)) => v["wind_series"] = json!({"constant_capacity_factor": cf}),
            None => {}
        }
        v
    }
}

/// Typed access to one JSON object, tracking its pointer for errors.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    ptr: String,
}

/// Unit-bearing keys and the base name a unit-less variant would use.
const UNIT_BASES: &[(&str, &str)] = &[
    ("nominal_voltage_kV", "nominal_voltage"),
    ("turbine_power_MW", "turbine_power"),
    ("energy_price_EUR_per_MWh", "energy_price"),
    ("rated_current_A", "rated_current"),
    ("series_impedance_ohm_per_km", "series_impedance"),
    ("shunt_admittance_S_per_km", "shunt_admittance"),
    ("ac_resistance_ohm_per_km", "ac_resistance"),
    ("dielectric_loss_W_per_m", "dielectric_loss"),
    ("x_m", "x"),
    ("y_m", "y"),
    ("time_limit_s", "time_limit"),
];

impl<'a> Obj<'a> {
    fn new(v: &'a Value, ptr: String) -> Result<Self, InputError> {
        let map = v.as_object().ok_or_else(|| InputError::schema(&ptr, "expected an object"))?;
        Ok(Self { map, ptr })
    }

    fn at(&self, key: &str) -> String {
        format!("{}/{key}", self.ptr)
    }

    /// A key with a unit suffix; a bare or differently-suffixed variant is a unit error.
    fn unit_check(&self, key: &str) -> Result<(), InputError> {
        if self.map.contains_key(key) {
            return Ok(());
        }
        if let Some(&(_, base)) = UNIT_BASES.iter().find(|(k, _)| *k == key) {
            let found = self.map.keys().find(|k| {
                k.as_str() == base || (k.starts_with(&format!("{base}_")) && k.len() > base.len() + 1)
            });
            if let Some(found) = found {
                return Err(InputError::Unit { pointer: self.at(found), found: found.clone(), expected: key.into() });
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<Option<&'a Value>, InputError> {
        self.unit_check(key)?;
        Ok(self.map.get(key).filter(|v| !v.is_null()))
    }

    fn req(&self, key: &str) -> Result<&'a Value, InputError> {
        self.get(key)?.ok_or_else(|| InputError::schema(self.at(key), "missing required field"))
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>, InputError> {
        self.get(key)?
            .map(|v| v.as_f64().ok_or_else(|| InputError::schema(self.at(key), "expected a number")))
            .transpose()
    }

    fn f64(&self, key: &str) -> Result<f64, InputError> {
        self.f64_opt(key)?.ok_or_else(|| InputError::schema(self.at(key), "missing required field"))
    }

    fn u64_opt(&self, key: &str) -> Result<Option<u64>, InputError> {
        self.get(key)?
            .map(|v| v.as_u64().ok_or_else(|| InputError::schema(self.at(key), "expected a non-negative integer")))
            .transpose()
    }

    fn str_opt(&self, key: &str) -> Result<Option<&'a str>, InputError> {
        self.get(key)?
            .map(|v| v.as_str().ok_or_else(|| InputError::schema(self.at(key), "expected a string")))
            .transpose()
    }

    fn bool_opt(&self, key: &str) -> Result<Option<bool>, InputError> {
        self.get(key)?
            .map(|v| v.as_bool().ok_or_else(|| InputError::schema(self.at(key), "expected a boolean")))
            .transpose()
    }

    fn complex_opt(&self, key: &str) -> Result<Option<Complex64>, InputError> {
        let Some(v) = self.get(key)? else { return Ok(None) };
        let bad = || InputError::schema(self.at(key), "expected [re, im]");
        let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
        Ok(Some(Complex64::new(arr[0].as_f64().ok_or_else(bad)?, arr[1].as_f64().ok_or_else(bad)?)))
    }

    fn obj_opt(&self, key: &str) -> Result<Option<Obj<'a>>, InputError> {
        self.get(key)?.map(|v| Obj::new(v, self.at(key))).transpose()
    }

    fn triple(&self, key: &str, default: [usize; 3]) -> Result<[usize; 3], InputError> {
        let Some(v) = self.get(key)? else { return Ok(default) };
        let bad = || InputError::schema(self.at(key), "expected [min, step, max]");
        let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
        let mut out = [0; 3];
        for (o, x) in out.iter_mut().zip(arr) {
            *o = x.as_u64().ok_or_else(bad)? as usize;
        }
        Ok(out)
    }
}

/// Detects the currency from the cost keys of the first cable.
fn currency_of(cable: &Obj<'_>) -> Result<Currency, InputError> {
    for cur in [Currency::Meur, Currency::Eur] {
        let s = cur.suffix();
        if cable.map.contains_key(&format!("capex_{s}_per_km")) || cable.map.contains_key(&format!("capex_regression_{s}_per_km")) {
            return Ok(cur);
        }
    }
    match cable.map.keys().find(|k| k.starts_with("capex")) {
        Some(k) => Err(InputError::Unit {
            pointer: cable.at(k),
            found: k.clone(),
            expected: "capex_MEUR_per_km or capex_EUR_per_km".into(),
        }),
        None => Err(InputError::schema(cable.at("capex_MEUR_per_km"), "missing cable cost")),
    }
}

fn parse_cable(c: &Obj<'_>, cur: Currency) -> Result<CableType, InputError> {
    let s = cur.suffix();
    let name = c.str_opt("name")?.unwrap_or("").to_string();
    let rated_current_a = c.f64_opt("rated_current_A")?;
    let capacity_override = c.u64_opt("capacity_wt")?.map(|u| u as u32);
    if rated_current_a.is_none() && capacity_override.is_none() {
        return Err(InputError::schema(c.at("rated_current_A"), "need rated_current_A or capacity_wt"));
    }
    let capex_key = format!("capex_{s}_per_km");
    let reg_key = format!("capex_regression_{s}_per_km");
    let capex = if let Some(v) = c.f64_opt(&capex_key)? {
        Capex::PerKm(v)
    } else if let Some(r) = c.obj_opt(&reg_key)? {
        Capex::Regression { a: r.f64("a")?, b: r.f64("b")?, c: r.f64("c")? }
    } else {
        // Either a different currency than the first cable, or no usable cost key.
        let other = currency_of(c)?;
        return Err(InputError::Unit {
            pointer: c.at(&format!("capex_{}_per_km", other.suffix())),
            found: other.suffix().into(),
            expected: s.into(),
        });
    };
    let install_key = format!("install_{s}_per_km");
    if !c.map.contains_key(&install_key) {
        if let Some(k) = c.map.keys().find(|k| k.starts_with("install")) {
            return Err(InputError::Unit { pointer: c.at(k), found: k.clone(), expected: install_key });
        }
    }
    Ok(CableType {
        name,
        rated_current_a,
        capacity_override,
        series_impedance_per_km: c.complex_opt("series_impedance_ohm_per_km")?.unwrap_or_default(),
        shunt_admittance_per_km: c.complex_opt("shunt_admittance_S_per_km")?.unwrap_or_default(),
        ac_resistance_per_km: c.f64_opt("ac_resistance_ohm_per_km")?.unwrap_or(0.0),
        screen_loss_factor: c.f64_opt("screen_loss_factor")?.unwrap_or(0.0),
        armour_loss_factor: c.f64_opt("armour_loss_factor")?.unwrap_or(0.0),
        dielectric_loss_w_per_m: c.f64_opt("dielectric_loss_W_per_m")?.unwrap_or(0.0),
        capex,
        install_per_km: c.f64_opt(&install_key)?.unwrap_or(0.0),
    })
}

/// Parses and validates an instance; relative series paths resolve against `base_dir`.
pub fn parse_instance_str(text: &str, base_dir: &Path) -> Result<FarmInstance, InputError> {
    let root: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    let top = Obj::new(&root, String::new())?;

    let name = top.str_opt("name")?.unwrap_or("farm").to_string();
    let mode = match top.str_opt("objective")? {
        Some(s) => s.parse::<ObjectiveMode>().map_err(|e| InputError::schema("/objective", e))?,
        None => ObjectiveMode::I,
    };

    let sys_o = Obj::new(top.req("system")?, "/system".into())?;
    let sys = SystemParams {
        nominal_voltage_v: sys_o.f64("nominal_voltage_kV")? * 1e3,
        turbine_power_w: sys_o.f64("turbine_power_MW")? * 1e6,
        lifetime_years: sys_o.u64_opt("lifetime_years")?.unwrap_or(1) as u32,
        discount_rate: sys_o.f64_opt("discount_rate")?.unwrap_or(0.0),
        energy_price_per_mwh: sys_o.f64_opt("energy_price_EUR_per_MWh")?.unwrap_or(0.0),
    };
    if !(sys.nominal_voltage_v > 0.0) || !(sys.turbine_power_w > 0.0) {
        return Err(InputError::schema("/system", "voltage and turbine power must be positive"));
    }

    let cables_v = top.req("cables")?.as_array().ok_or_else(|| InputError::schema("/cables", "expected an array"))?;
    if cables_v.is_empty() {
        return Err(InputError::schema("/cables", "at least one cable is required"));
    }
    let first = Obj::new(&cables_v[0], "/cables/0".into())?;
    let currency = currency_of(&first)?;
    let cables = cables_v
        .iter()
        .enumerate()
        .map(|(i, v)| parse_cable(&Obj::new(v, format!("/cables/{i}"))?, currency))
        .collect::<Result<Vec<_>, _>>()?;
    capacity_set(&cables, &sys).map_err(|e| InputError::schema("/cables", e.to_string()))?;

    let nodes_v = top.req("nodes")?.as_array().ok_or_else(|| InputError::schema("/nodes", "expected an array"))?;
    let mut nodes = Vec::with_capacity(nodes_v.len());
    let mut seen = std::collections::HashSet::new();
    for (i, v) in nodes_v.iter().enumerate() {
        let o = Obj::new(v, format!("/nodes/{i}"))?;
        let id = o.u64_opt("id")?.ok_or_else(|| InputError::schema(o.at("id"), "missing required field"))? as u32;
        if !seen.insert(id) {
            return Err(InputError::schema(o.at("id"), format!("duplicate node id {id}")));
        }
        let kind = match o.str_opt("kind")? {
            Some("oss") => NodeKind::Oss,
            Some("wt") => NodeKind::Wt,
            _ => return Err(InputError::schema(o.at("kind"), "expected \"oss\" or \"wt\"")),
        };
        let (x, y) = (o.f64("x_m")?, o.f64("y_m")?);
        nodes.push(Node { id, kind, position: crate::geometry::Point::new(x, y) });
    }
    nodes.sort_by_key(|n| n.id);
    if !nodes.iter().any(|n| n.kind == NodeKind::Oss) {
        return Err(InputError::schema("/nodes", "at least one OSS is required"));
    }
    build_reduced_graph(&nodes).map_err(|e| InputError::schema("/nodes", e.to_string()))?;
    let n_oss = nodes.iter().filter(|n| n.kind == NodeKind::Oss).count();

    let max_feeders = top.u64_opt("max_feeders")?.unwrap_or(10) as u32;
    if max_feeders == 0 {
        return Err(InputError::schema("/max_feeders", "must be at least 1"));
    }
    let oss_balance = top.f64_opt("oss_balance")?.unwrap_or(1.0);
    if !(1.0..=n_oss as f64).contains(&oss_balance) {
        return Err(InputError::schema("/oss_balance", format!("must lie in [1, {n_oss}]")));
    }

    let mut line = LineModel::default();
    if let Some(l) = top.obj_opt("line_model")? {
        line.neglect_shunt = l.bool_opt("neglect_shunt")?.unwrap_or(false);
        line.charging_sign = match l.str_opt("charging_sign")? {
            None | Some("minus") => ChargingSign::Minus,
            Some("plus") => ChargingSign::Plus,
            Some(_) => return Err(InputError::schema(l.at("charging_sign"), "expected \"minus\" or \"plus\"")),
        };
    }

    let mut params = AlgorithmParams::default();
    if let Some(a) = top.obj_opt("algorithm")? {
        let d = params;
        let [f0, f1, f2] = a.triple("upsilon_f", [d.upsilon_f_min, d.upsilon_f_step, d.upsilon_f_max])?;
        let [o0, o1, o2] = a.triple("upsilon_o", [d.upsilon_o_min, d.upsilon_o_step, d.upsilon_o_max])?;
        params = AlgorithmParams {
            upsilon_f_min: f0,
            upsilon_f_step: f1,
            upsilon_f_max: f2,
            upsilon_o_min: o0,
            upsilon_o_step: o1,
            upsilon_o_max: o2,
            target_gap: a.f64_opt("target_gap")?.unwrap_or(d.target_gap),
            time_limit_s: a.f64_opt("time_limit_s")?,
        };
        params.check().map_err(|e| InputError::schema("/algorithm", e))?;
    }

    let series = match top.obj_opt("wind_series")? {
        None => None,
        Some(s) => {
            if let Some(p) = s.str_opt("path")? {
                let p = Path::new(p);
                Some(SeriesSource::File(if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) }))
            } else if let Some(cf) = s.f64_opt("constant_capacity_factor")? {
                if !(0.0..=1.0).contains(&cf) {
                    return Err(InputError::schema(s.at("constant_capacity_factor"), "must lie in [0, 1]"));
                }
                Some(SeriesSource::ConstantCapacityFactor(cf))
            } else {
                return Err(InputError::schema("/wind_series", "expected `path` or `constant_capacity_factor`"));
            }
        }
    };
    if mode.needs_losses() && series.is_none() {
        return Err(InputError::schema("/wind_series", format!("objective {mode:?} needs a wind series")));
    }

    Ok(FarmInstance { name, nodes, sys, cables, params, mode, max_feeders, oss_balance, line, currency, series })
}

pub fn parse_instance(path: &Path) -> Result<FarmInstance, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    parse_instance_str(&text, path.parent().unwrap_or(Path::new(".")))
}
