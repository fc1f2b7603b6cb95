use crate::bigraph::{BipartiteGraph, Selection};
use crate::error::{Error, Result};
use crate::quasidef::is_gamma_quasi_biclique;
use crate::ratio::Rational;

use super::solver::Assignment;
use super::{Constraint, MipInstance, Relation, SolverStatus, VarKind};

/// Absolute tolerance for constraint and bound checks.
pub const TOLERANCE: f64 = 1e-6;

pub(crate) fn activity(c: &Constraint, values: &[f64]) -> f64 {
    let linear: f64 = c.terms.iter().map(|&(k, i)| k * values[i]).sum();
    let quad: f64 = c
        .quadratic
        .iter()
        .map(|&(k, a, b)| k * values[a] * values[b])
        .sum();
    linear + quad
}

pub(crate) fn satisfied(c: &Constraint, values: &[f64]) -> bool {
    let lhs = activity(c, values);
    match c.relation {
        Relation::Le => lhs <= c.rhs + TOLERANCE,
        Relation::Ge => lhs >= c.rhs - TOLERANCE,
        Relation::Eq => (lhs - c.rhs).abs() <= TOLERANCE,
    }
}

/// Name of the first violated bound, integrality requirement or constraint,
/// with `check_integrality` controlling the middle group.
pub fn first_violation(inst: &MipInstance, values: &[f64], check_integrality: bool) -> Option<String> {
    for (v, &x) in inst.variables.iter().zip(values) {
        if x < v.lower - TOLERANCE || v.upper.is_some_and(|u| x > u + TOLERANCE) {
            return Some(format!("bounds({})", v.name));
        }
        if check_integrality && v.kind != VarKind::Continuous && (x - x.round()).abs() > TOLERANCE {
            return Some(format!("integrality({})", v.name));
        }
    }
    inst.constraints
        .iter()
        .find(|c| !satisfied(c, values))
        .map(|c| c.name.clone())
}

fn failure(constraint: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Verification {
        constraint: constraint.into(),
        detail: detail.into(),
    }
}

/// Checks every constraint of `inst` at `assignment` and returns the
/// selection it encodes, which must be a γ-quasi-biclique of `g`.
pub fn verify_assignment(
    g: &BipartiteGraph,
    inst: &MipInstance,
    assignment: &Assignment,
    gamma: Rational,
) -> Result<Selection> {
    if assignment.status == SolverStatus::Infeasible {
        return Err(failure("status", "the solver reported the instance infeasible"));
    }
    let values = assignment.to_vec(inst)?;
    if let Some(name) = first_violation(inst, &values, true) {
        let detail = match inst.constraints.iter().find(|c| c.name == name) {
            Some(c) => format!(
                "left side {} {} {}",
                activity(c, &values),
                c.relation.symbol(),
                c.rhs
            ),
            None => "value out of range".into(),
        };
        return Err(failure(name, detail));
    }
    let pick = |prefix: char, n: usize| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..n {
            let name = format!("{prefix}_{i}");
            let idx = inst
                .var_index(&name)
                .ok_or_else(|| Error::arg(format!("instance has no variable `{name}` for this graph")))?;
            if values[idx].round() == 1.0 {
                out.push(i);
            }
        }
        Ok(out)
    };
    let u_set = pick('u', g.u_count())?;
    let v_set = pick('v', g.v_count())?;
    for (u, v) in g.edges() {
        let Some(idx) = inst.var_index(&format!("y_{u}_{v}")) else {
            return Err(Error::arg(format!("instance has no variable y_{u}_{v}")));
        };
        let want = u_set.binary_search(&u).is_ok() && v_set.binary_search(&v).is_ok();
        if (values[idx].round() == 1.0) != want {
            return Err(failure(
                format!("link_uv_{u}_{v}"),
                format!("y_{u}_{v} = {} disagrees with u_{u} * v_{v}", values[idx]),
            ));
        }
    }
    let selection = g.induced_stats(&u_set, &v_set)?;
    if selection.has_empty_side() {
        return Err(failure("selection", "one side of the selection is empty"));
    }
    if !is_gamma_quasi_biclique(g, &selection, gamma)? {
        return Err(failure(
            "density",
            format!("selection density {} is below {gamma}", selection.density()?),
        ));
    }
    Ok(selection)
}
