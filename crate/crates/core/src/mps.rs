//! Fixed-field MPS export.
//!
//! Names never contain spaces, so the output is also valid free MPS.
//! Numbers use the shortest round-trip decimal form, which keeps the bytes
//! stable across platforms.

use std::io::{self, Write};

use crate::model::{MilpProblem, Sense, VarKind};

const OBJ: &str = "obj";

fn field(name: &str) -> String {
    format!("{name:<8}")
}

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Writes `model` as a minimization problem.
pub fn write_mps<W: Write>(model: &MilpProblem, mut w: W) -> io::Result<()> {
    writeln!(w, "NAME          {}", model.name)?;
    writeln!(w, "ROWS")?;
    writeln!(w, " N  {OBJ}")?;
    for r in &model.rows {
        let s = match r.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        writeln!(w, " {s}  {}", r.name)?;
    }

    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.columns.len()];
    for (ri, r) in model.rows.iter().enumerate() {
        for &(c, a) in &r.terms {
            by_col[c].push((ri, a));
        }
    }

    writeln!(w, "COLUMNS")?;
    let mut in_int = false;
    let mut marker = 0;
    for (ci, c) in model.columns.iter().enumerate() {
        let int = c.kind != VarKind::Continuous;
        if int != in_int {
            let tag = if int { "'INTORG'" } else { "'INTEND'" };
            writeln!(w, "    M{marker:<7}  'MARKER'                 {tag}")?;
            marker += 1;
            in_int = int;
        }
        let name = field(&c.name);
        writeln!(w, "    {name}  {}  {}", field(OBJ), num(c.cost))?;
        for &(ri, a) in &by_col[ci] {
            writeln!(w, "    {name}  {}  {}", field(&model.rows[ri].name), num(a))?;
        }
    }
    if in_int {
        writeln!(w, "    M{marker:<7}  'MARKER'                 'INTEND'")?;
    }

    writeln!(w, "RHS")?;
    for r in model.rows.iter().filter(|r| r.rhs != 0.0) {
        writeln!(w, "    RHS       {}  {}", field(&r.name), num(r.rhs))?;
    }

    writeln!(w, "BOUNDS")?;
    for c in &model.columns {
        let name = field(&c.name);
        match c.kind {
            VarKind::Binary => writeln!(w, " BV BND       {name}")?,
            VarKind::Integer | VarKind::Continuous => {
                let (lo, up) = if c.kind == VarKind::Integer { ("LI", "UI") } else { ("LO", "UP") };
                if c.lower != 0.0 {
                    writeln!(w, " {lo} BND       {name}  {}", num(c.lower))?;
                }
                if c.upper.is_finite() {
                    writeln!(w, " {up} BND       {name}  {}", num(c.upper))?;
                } else {
                    writeln!(w, " PL BND       {name}")?;
                }
            }
        }
    }
    writeln!(w, "ENDATA")
}

pub fn to_mps_string(model: &MilpProblem) -> String {
    let mut buf = Vec::new();
    write_mps(model, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("MPS output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{build_cost_table, CostModel, ObjectiveMode};
    use crate::electrical::{CableType, LineModel, SystemParams};
    use crate::graph::{build_reduced_graph, knn_candidates, Node};
    use crate::model::{build_model, ModelOptions};

    fn model() -> MilpProblem {
        let nodes = vec![Node::oss(1, 0.0, 0.0), Node::wt(2, 1000.0, 0.0), Node::wt(3, 0.0, 1500.0)];
        let g = knn_candidates(&build_reduced_graph(&nodes).unwrap(), 1);
        let sys = SystemParams {
            nominal_voltage_v: 33e3,
            turbine_power_w: 3e6,
            lifetime_years: 1,
            discount_rate: 0.0,
            energy_price_per_mwh: 0.0,
        };
        let cm = CostModel::new(
            vec![CableType::simple("a", 1, 0.25), CableType::simple("b", 2, 0.5)],
            sys,
            LineModel::default(),
            ObjectiveMode::I,
            None,
            1e6,
        )
        .unwrap();
        build_model(&g, &build_cost_table(&g, &cm, false), ModelOptions::default()).unwrap()
    }

    #[test]
    fn sections_and_markers() {
        let m = model();
        let s = to_mps_string(&m);
        let order: Vec<_> = ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.matches("'INTORG'").count(), 1);
        assert_eq!(s.matches("'INTEND'").count(), 1);
        assert_eq!(s.matches(" BV BND").count(), m.count_x() + m.count_y());
        assert!(s.contains(" LI BND       s_1       2\n"));
        assert!(s.contains("y_1_2_1   obj       0.25\n"));
    }

    #[test]
    fn byte_stable() {
        assert_eq!(to_mps_string(&model()), to_mps_string(&model()));
    }

    #[test]
    fn numbers() {
        assert_eq!(num(-1.0), "-1");
        assert_eq!(num(0.375), "0.375");
        assert_eq!(num(1e-7), "0.0000001");
    }
}
