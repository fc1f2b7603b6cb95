use crate::error::{Error, Result};

use super::verify::TOLERANCE;
use super::{MipInstance, Relation, Sense, VarKind};

/// Outcome of exhaustive 0/1 enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Best objective value, `None` if no assignment is feasible.
    pub optimum: Option<f64>,
    /// First optimal assignment in enumeration order (variable order,
    /// 0 before 1).
    pub best: Option<Vec<f64>>,
    pub feasible: u64,
    /// Feasible assignments within `1e-9` of the optimum.
    pub optimal: u64,
}

struct Row {
    relation: Relation,
    rhs: f64,
    fixed: f64,
    neg_left: f64,
    pos_left: f64,
}

impl Row {
    fn possible(&self) -> bool {
        let lo = self.fixed + self.neg_left;
        let hi = self.fixed + self.pos_left;
        match self.relation {
            Relation::Le => lo <= self.rhs + TOLERANCE,
            Relation::Ge => hi >= self.rhs - TOLERANCE,
            Relation::Eq => lo <= self.rhs + TOLERANCE && hi >= self.rhs - TOLERANCE,
        }
    }
}

/// Enumerates every 0/1 assignment of an all-binary linear instance.
///
/// Partial assignments that can no longer satisfy some constraint are cut
/// off, so the cost tracks the number of feasible assignments rather than
/// `2^n`; every feasible assignment is still visited.
pub fn brute_force_optimum(inst: &MipInstance) -> Result<BruteForceResult> {
    if !inst.is_linear() {
        return Err(Error::Unsupported("enumeration needs a linear instance".into()));
    }
    if let Some(v) = inst.variables.iter().find(|v| v.kind != VarKind::Binary) {
        return Err(Error::Unsupported(format!(
            "enumeration needs all-binary variables; `{}` is not binary",
            v.name
        )));
    }
    let n = inst.variables.len();
    let mut incidence: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rows: Vec<Row> = inst
        .constraints
        .iter()
        .enumerate()
        .map(|(r, c)| {
            let mut row = Row {
                relation: c.relation,
                rhs: c.rhs,
                fixed: 0.0,
                neg_left: 0.0,
                pos_left: 0.0,
            };
            for &(k, i) in &c.terms {
                incidence[i].push((r, k));
                if k < 0.0 {
                    row.neg_left += k;
                } else {
                    row.pos_left += k;
                }
            }
            row
        })
        .collect();
    let sign = match inst.objective.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut out = BruteForceResult {
        optimum: None,
        best: None,
        feasible: 0,
        optimal: 0,
    };
    if rows.iter().all(Row::possible) {
        let mut values = vec![0.0; n];
        search(inst, &incidence, &mut rows, &mut values, 0, sign, &mut out);
    }
    Ok(out)
}

fn search(
    inst: &MipInstance,
    incidence: &[Vec<(usize, f64)>],
    rows: &mut [Row],
    values: &mut [f64],
    depth: usize,
    sign: f64,
    out: &mut BruteForceResult,
) {
    if depth == values.len() {
        out.feasible += 1;
        let obj = inst.objective_value(values);
        match out.optimum {
            Some(best) if sign * (obj - best) > 1e-9 => {}
            Some(best) if (obj - best).abs() <= 1e-9 => {
                out.optimal += 1;
                return;
            }
            Some(_) => return,
            None => {}
        }
        out.optimum = Some(obj);
        out.best = Some(values.to_vec());
        out.optimal = 1;
        return;
    }
    for x in [0.0, 1.0] {
        values[depth] = x;
        let mut ok = true;
        for &(r, k) in &incidence[depth] {
            let row = &mut rows[r];
            if k < 0.0 {
                row.neg_left -= k;
            } else {
                row.pos_left -= k;
            }
            row.fixed += k * x;
            ok &= row.possible();
        }
        if ok {
            search(inst, incidence, rows, values, depth + 1, sign, out);
        }
        for &(r, k) in &incidence[depth] {
            let row = &mut rows[r];
            if k < 0.0 {
                row.neg_left += k;
            } else {
                row.pos_left += k;
            }
            row.fixed -= k * x;
        }
    }
    values[depth] = 0.0;
}
