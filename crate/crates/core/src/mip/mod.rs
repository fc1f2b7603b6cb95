//! The two MIP formulations as plain data, ready to be written in LP format
//! and handed to an external solver.
//!
//! Model 1 maximises `|U'| + |V'|`. In its bilinear form the density
//! constraint multiplies the size indicators `z1_n` and `z2_m` (declared
//! continuous); the linearized form replaces the product by binary pair
//! indicators `z_n_m`. Model 2 maximises the log quality criterion through
//! edge count indicators `w_k` and reuses the pair indicators.
//!
//! Variable names: `u_i`, `v_j` (0-based vertex indices), `y_i_j` per edge,
//! `z1_n`, `z2_m`, `z_n_m` (sizes), `w_k` (edge counts).

mod brute;
mod lp;
mod solver;
mod verify;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bigraph::BipartiteGraph;
use crate::bounds::{edge_count_bounds, EdgeRange, SizeBounds};
use crate::error::{Error, Result};
use crate::ratio::{check_gamma, check_theta, to_f64, Rational};

pub use brute::{brute_force_optimum, BruteForceResult};
pub use lp::{approx_equal, emit_lp, emit_lp_with, parse_lp, EmitOptions};
pub use solver::{
    parse_solution, run_external_solver, solver_command, Assignment, SolverStatus, SOLVER_ENV_VAR,
};
pub use verify::{first_violation, verify_assignment, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    /// `None` is unbounded above.
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    /// `(coefficient, variable index)`.
    pub terms: Vec<(f64, usize)>,
    /// `(coefficient, a, b)` for `coefficient * x_a * x_b`.
    pub quadratic: Vec<(f64, usize, usize)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn is_linear(&self) -> bool {
        self.quadratic.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearObjective {
    pub sense: Sense,
    pub terms: Vec<(f64, usize)>,
}

/// Which formulation an instance encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Model 1 with continuous `z1`, `z2` and a bilinear density constraint.
    Model1Bilinear,
    /// Model 1 with binary pair indicators `z_n_m`.
    Model1Linearized,
    Model2,
}

impl ModelKind {
    /// The CLI spelling: `1`, `1lin` or `2`.
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Model1Bilinear => "1",
            ModelKind::Model1Linearized => "1lin",
            ModelKind::Model2 => "2",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ModelKind::Model1Bilinear),
            "1lin" => Ok(ModelKind::Model1Linearized),
            "2" => Ok(ModelKind::Model2),
            other => Err(Error::arg(format!(
                "unknown model `{other}` (expected 1, 1lin or 2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub model: ModelKind,
    pub gamma: Rational,
    pub bounds: SizeBounds,
    pub theta: Option<Rational>,
    pub edge_range: Option<EdgeRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MipInstance {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: LinearObjective,
    pub metadata: Metadata,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl MipInstance {
    fn new(metadata: Metadata) -> Self {
        Self {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: LinearObjective {
                sense: Sense::Maximize,
                terms: Vec::new(),
            },
            metadata,
            index: HashMap::new(),
        }
    }

    fn add_var(&mut self, name: String, kind: VarKind) -> usize {
        let upper = match kind {
            VarKind::Binary => Some(1.0),
            _ => None,
        };
        let id = self.variables.len();
        let previous = self.index.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable {name}");
        self.variables.push(Variable {
            name,
            kind,
            lower: 0.0,
            upper,
        });
        id
    }

    fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(f64, usize)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            quadratic: Vec::new(),
            relation,
            rhs,
        });
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn is_linear(&self) -> bool {
        self.constraints.iter().all(Constraint::is_linear)
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    /// Objective value at a full assignment given in variable order.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.terms.iter().map(|&(c, i)| c * values[i]).sum()
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect();
    }

    /// Pair indicators `(n, m, index)` in construction order.
    fn pair_vars(&self) -> Vec<(usize, usize, usize)> {
        self.variables
            .iter()
            .enumerate()
            .filter_map(|(i, v)| {
                let rest = v.name.strip_prefix("z_")?;
                let (n, m) = rest.split_once('_')?;
                Some((n.parse().ok()?, m.parse().ok()?, i))
            })
            .collect()
    }

    fn size_vars(&self, prefix: &str) -> Vec<(usize, usize)> {
        self.variables
            .iter()
            .enumerate()
            .filter_map(|(i, v)| Some((v.name.strip_prefix(prefix)?.parse().ok()?, i)))
            .collect()
    }
}

/// Model 1 variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model1Form {
    Bilinear,
    Linearized,
}

fn prepare(g: &BipartiteGraph, gamma: Rational, bounds: &SizeBounds) -> Result<()> {
    check_gamma(gamma)?;
    bounds.validate(g)
}

/// Shared block: binary `u`, `v`, `y` and the three linking constraints per
/// edge (`y <= u`, `y <= v`, `y >= u + v - 1`). Returns the `y` indices.
fn add_selection_block(inst: &mut MipInstance, g: &BipartiteGraph) -> Vec<usize> {
    let u: Vec<usize> = (0..g.u_count())
        .map(|i| inst.add_var(format!("u_{i}"), VarKind::Binary))
        .collect();
    let v: Vec<usize> = (0..g.v_count())
        .map(|j| inst.add_var(format!("v_{j}"), VarKind::Binary))
        .collect();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let y: Vec<usize> = edges
        .iter()
        .map(|&(i, j)| inst.add_var(format!("y_{i}_{j}"), VarKind::Binary))
        .collect();
    for (&(i, j), &yk) in edges.iter().zip(&y) {
        inst.add_constraint(
            format!("link_u_{i}_{j}"),
            vec![(1.0, yk), (-1.0, u[i])],
            Relation::Le,
            0.0,
        );
        inst.add_constraint(
            format!("link_v_{i}_{j}"),
            vec![(1.0, yk), (-1.0, v[j])],
            Relation::Le,
            0.0,
        );
        inst.add_constraint(
            format!("link_uv_{i}_{j}"),
            vec![(1.0, yk), (-1.0, u[i]), (-1.0, v[j])],
            Relation::Ge,
            -1.0,
        );
    }
    y
}

/// Binary `z_n_m` over the size box with `sum z = 1` and the two size
/// channeling constraints.
fn add_pair_block(inst: &mut MipInstance, g: &BipartiteGraph, b: &SizeBounds) -> Vec<(usize, usize, usize)> {
    let mut pairs = Vec::new();
    for n in b.u_min..=b.u_max {
        for m in b.v_min..=b.v_max {
            pairs.push((n, m, inst.add_var(format!("z_{n}_{m}"), VarKind::Binary)));
        }
    }
    inst.add_constraint(
        "choose_z",
        pairs.iter().map(|p| (1.0, p.2)).collect(),
        Relation::Eq,
        1.0,
    );
    let mut card_u: Vec<(f64, usize)> = (0..g.u_count()).map(|i| (1.0, i)).collect();
    card_u.extend(pairs.iter().map(|&(n, _, z)| (-(n as f64), z)));
    inst.add_constraint("card_u", card_u, Relation::Eq, 0.0);
    let mut card_v: Vec<(f64, usize)> = (0..g.v_count()).map(|j| (1.0, g.u_count() + j)).collect();
    card_v.extend(pairs.iter().map(|&(_, m, z)| (-(m as f64), z)));
    inst.add_constraint("card_v", card_v, Relation::Eq, 0.0);
    pairs
}

/// Model 1: maximise `sum u + sum v` subject to density `>= gamma`.
pub fn build_model1(
    g: &BipartiteGraph,
    gamma: Rational,
    bounds: &SizeBounds,
    form: Model1Form,
) -> Result<MipInstance> {
    prepare(g, gamma, bounds)?;
    let model = match form {
        Model1Form::Bilinear => ModelKind::Model1Bilinear,
        Model1Form::Linearized => ModelKind::Model1Linearized,
    };
    let mut inst = MipInstance::new(Metadata {
        model,
        gamma,
        bounds: *bounds,
        theta: None,
        edge_range: None,
    });
    let y = add_selection_block(&mut inst, g);
    let gf = to_f64(gamma);
    match form {
        Model1Form::Linearized => {
            let pairs = add_pair_block(&mut inst, g, bounds);
            let mut density: Vec<(f64, usize)> = y.iter().map(|&k| (1.0, k)).collect();
            density.extend(pairs.iter().map(|&(n, m, z)| (-gf * (n * m) as f64, z)));
            inst.add_constraint("density", density, Relation::Ge, 0.0);
        }
        Model1Form::Bilinear => {
            let z1: Vec<(usize, usize)> = (bounds.u_min..=bounds.u_max)
                .map(|n| (n, inst.add_var(format!("z1_{n}"), VarKind::Continuous)))
                .collect();
            let z2: Vec<(usize, usize)> = (bounds.v_min..=bounds.v_max)
                .map(|m| (m, inst.add_var(format!("z2_{m}"), VarKind::Continuous)))
                .collect();
            inst.add_constraint(
                "choose_z1",
                z1.iter().map(|p| (1.0, p.1)).collect(),
                Relation::Eq,
                1.0,
            );
            inst.add_constraint(
                "choose_z2",
                z2.iter().map(|p| (1.0, p.1)).collect(),
                Relation::Eq,
                1.0,
            );
            let mut card_u: Vec<(f64, usize)> = (0..g.u_count()).map(|i| (1.0, i)).collect();
            card_u.extend(z1.iter().map(|&(n, z)| (-(n as f64), z)));
            inst.add_constraint("card_u", card_u, Relation::Eq, 0.0);
            let mut card_v: Vec<(f64, usize)> = (0..g.v_count()).map(|j| (1.0, g.u_count() + j)).collect();
            card_v.extend(z2.iter().map(|&(m, z)| (-(m as f64), z)));
            inst.add_constraint("card_v", card_v, Relation::Eq, 0.0);
            let quadratic = z1
                .iter()
                .flat_map(|&(n, a)| z2.iter().map(move |&(m, b)| (-gf * (n * m) as f64, a, b)))
                .collect();
            inst.constraints.push(Constraint {
                name: "density".into(),
                terms: y.iter().map(|&k| (1.0, k)).collect(),
                quadratic,
                relation: Relation::Ge,
                rhs: 0.0,
            });
        }
    }
    inst.objective.terms = (0..g.u_count() + g.v_count()).map(|i| (1.0, i)).collect();
    Ok(inst)
}

/// Model 2 density constraint variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityForm {
    /// `sum k w_k >= gamma sum n m z_n_m`.
    Corrected,
    /// `sum w_k >= gamma sum n m z_n_m` as printed; the left side is
    /// identically 1, so this form is kept only for documentation.
    Printed,
}

/// Model 2 with the corrected density constraint.
pub fn build_model2(g: &BipartiteGraph, gamma: Rational, bounds: &SizeBounds) -> Result<MipInstance> {
    build_model2_with(g, gamma, bounds, DensityForm::Corrected)
}

/// Model 2: maximise `2 sum ln(k) w_k - sum (ln n + ln m) z_n_m`.
pub fn build_model2_with(
    g: &BipartiteGraph,
    gamma: Rational,
    bounds: &SizeBounds,
    density_form: DensityForm,
) -> Result<MipInstance> {
    prepare(g, gamma, bounds)?;
    let range = edge_count_bounds(g, gamma, bounds, false)?;
    let mut inst = MipInstance::new(Metadata {
        model: ModelKind::Model2,
        gamma,
        bounds: *bounds,
        theta: None,
        edge_range: Some(range),
    });
    let y = add_selection_block(&mut inst, g);
    let pairs = add_pair_block(&mut inst, g, bounds);
    let w: Vec<(u64, usize)> = (range.k_min..=range.k_max)
        .map(|k| (k, inst.add_var(format!("w_{k}"), VarKind::Binary)))
        .collect();
    inst.add_constraint(
        "choose_w",
        w.iter().map(|p| (1.0, p.1)).collect(),
        Relation::Eq,
        1.0,
    );
    let mut edges: Vec<(f64, usize)> = y.iter().map(|&k| (1.0, k)).collect();
    edges.extend(w.iter().map(|&(k, var)| (-(k as f64), var)));
    inst.add_constraint("edges", edges, Relation::Eq, 0.0);
    let gf = to_f64(gamma);
    let mut density: Vec<(f64, usize)> = match density_form {
        DensityForm::Corrected => w.iter().map(|&(k, var)| (k as f64, var)).collect(),
        DensityForm::Printed => w.iter().map(|&(_, var)| (1.0, var)).collect(),
    };
    density.extend(pairs.iter().map(|&(n, m, z)| (-gf * (n * m) as f64, z)));
    inst.add_constraint("density", density, Relation::Ge, 0.0);

    let mut objective: Vec<(f64, usize)> = w.iter().map(|&(k, var)| (2.0 * (k as f64).ln(), var)).collect();
    objective.extend(
        pairs
            .iter()
            .map(|&(n, m, z)| (-((n as f64).ln() + (m as f64).ln()), z)),
    );
    inst.objective.terms = objective;
    Ok(inst)
}

/// Balance constraint variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceForm {
    /// On the sizes: `|U'| >= (1-θ)|V'|` and `|U'| <= (1+θ)|V'|`.
    Corrected,
    /// As printed, on the indicator sums themselves; vacuous because both
    /// sums equal 1.
    Printed,
}

/// Builds the model named by `kind`, with the corrected balance rows when
/// `theta` is given.
pub fn build_instance(
    g: &BipartiteGraph,
    kind: ModelKind,
    gamma: Rational,
    bounds: &SizeBounds,
    theta: Option<Rational>,
) -> Result<MipInstance> {
    let inst = match kind {
        ModelKind::Model1Bilinear => build_model1(g, gamma, bounds, Model1Form::Bilinear)?,
        ModelKind::Model1Linearized => build_model1(g, gamma, bounds, Model1Form::Linearized)?,
        ModelKind::Model2 => build_model2(g, gamma, bounds)?,
    };
    match theta {
        Some(t) => add_balance_constraints(&inst, t),
        None => Ok(inst),
    }
}

/// Adds the corrected near-balance constraints.
pub fn add_balance_constraints(inst: &MipInstance, theta: Rational) -> Result<MipInstance> {
    add_balance_constraints_with(inst, theta, BalanceForm::Corrected)
}

pub fn add_balance_constraints_with(
    inst: &MipInstance,
    theta: Rational,
    form: BalanceForm,
) -> Result<MipInstance> {
    check_theta(theta)?;
    let t = to_f64(theta);
    let mut out = inst.clone();
    out.metadata.theta = Some(theta);
    let weight = |x: usize| match form {
        BalanceForm::Corrected => x as f64,
        BalanceForm::Printed => 1.0,
    };
    let (lo, hi): (Vec<(f64, usize)>, Vec<(f64, usize)>) = match inst.metadata.model {
        ModelKind::Model1Bilinear => {
            let z1 = inst.size_vars("z1_");
            let z2 = inst.size_vars("z2_");
            let side = |scale: f64| {
                z1.iter()
                    .map(|&(n, z)| (weight(n), z))
                    .chain(z2.iter().map(|&(m, z)| (-scale * weight(m), z)))
                    .collect::<Vec<_>>()
            };
            (side(1.0 - t), side(1.0 + t))
        }
        _ => {
            let pairs = inst.pair_vars();
            let side = |scale: f64| {
                pairs
                    .iter()
                    .map(|&(n, m, z)| (weight(n) - scale * weight(m), z))
                    .collect::<Vec<_>>()
            };
            (side(1.0 - t), side(1.0 + t))
        }
    };
    if lo.is_empty() {
        return Err(Error::arg("instance has no size indicator variables"));
    }
    out.add_constraint("balance_lo", lo, Relation::Ge, 0.0);
    out.add_constraint("balance_hi", hi, Relation::Le, 0.0);
    Ok(out)
}
