//! Shelling out to an external MIP solver and reading its answer back.
//!
//! The solver command is a shell template. `{lp}` is replaced by the path of
//! the written model and `{sol}` by the path the solver must write its
//! solution to; without placeholders both paths are appended. The solution
//! file holds an optional `status <word>` line, an `objective <value>` line
//! and one `<name> <value>` line per variable.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use serde::Serialize;

use crate::error::{Error, Result};

use super::lp::emit_lp;
use super::{MipInstance, VarKind};

/// Environment variable that overrides the configured solver command.
pub const SOLVER_ENV_VAR: &str = "QBC_SOLVER_CMD";

const ROUNDING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub values: BTreeMap<String, f64>,
    pub objective: Option<f64>,
    pub status: SolverStatus,
}

impl Assignment {
    /// Values in the instance's variable order; fails on a missing variable.
    pub fn to_vec(&self, inst: &MipInstance) -> Result<Vec<f64>> {
        inst.variables
            .iter()
            .map(|v| {
                self.values
                    .get(&v.name)
                    .copied()
                    .ok_or_else(|| Error::Verification {
                        constraint: "assignment".into(),
                        detail: format!("variable `{}` is not assigned", v.name),
                    })
            })
            .collect()
    }

    pub fn from_vec(inst: &MipInstance, values: &[f64], objective: Option<f64>) -> Self {
        Self {
            values: inst
                .variables
                .iter()
                .zip(values)
                .map(|(v, &x)| (v.name.clone(), x))
                .collect(),
            objective,
            status: SolverStatus::Optimal,
        }
    }
}

fn solver_error(message: impl Into<String>, output: impl Into<String>) -> Error {
    Error::Solver {
        message: message.into(),
        output: output.into(),
    }
}

/// Reads a solution file. Binary values within `1e-6` of 0 or 1 are
/// rounded; anything else is an error, as is a missing or unknown variable
/// (unless the status is `infeasible`).
pub fn parse_solution(text: &str, inst: &MipInstance) -> Result<Assignment> {
    let mut status = None;
    let mut objective = None;
    let mut values = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(solver_error(
                format!("solution line {}: expected `name value`", i + 1),
                text,
            ));
        };
        if key == "status" {
            status = Some(match value.to_ascii_lowercase().as_str() {
                "optimal" => SolverStatus::Optimal,
                "feasible" => SolverStatus::Feasible,
                "infeasible" => SolverStatus::Infeasible,
                _ => SolverStatus::Unknown,
            });
            continue;
        }
        let x: f64 = value
            .parse()
            .map_err(|_| solver_error(format!("solution line {}: bad value `{value}`", i + 1), text))?;
        if key == "objective" {
            objective = Some(x);
            continue;
        }
        let Some(idx) = inst.var_index(key) else {
            return Err(solver_error(format!("unknown variable `{key}`"), text));
        };
        let x = if inst.variables[idx].kind == VarKind::Continuous {
            x
        } else {
            let r = x.round();
            if (x - r).abs() > ROUNDING {
                return Err(solver_error(
                    format!("variable `{key}` = {x} is not integral"),
                    text,
                ));
            }
            r
        };
        values.insert(key.to_string(), x);
    }
    let status = status.unwrap_or(SolverStatus::Optimal);
    if status == SolverStatus::Infeasible {
        return Ok(Assignment {
            values: BTreeMap::new(),
            objective: None,
            status,
        });
    }
    if let Some(v) = inst.variables.iter().find(|v| !values.contains_key(&v.name)) {
        return Err(solver_error(
            format!("solution does not assign `{}`", v.name),
            text,
        ));
    }
    Ok(Assignment {
        values,
        objective,
        status,
    })
}

fn quote(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

/// Writes the instance as LP, runs `command` through `sh -c` and parses the
/// solution file it leaves behind.
pub fn run_external_solver(inst: &MipInstance, command: &str) -> Result<Assignment> {
    let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, emit_lp(inst)?).map_err(|e| Error::io(&lp_path, e))?;
    let script = if command.contains("{lp}") || command.contains("{sol}") {
        command
            .replace("{lp}", &quote(&lp_path))
            .replace("{sol}", &quote(&sol_path))
    } else {
        format!("{command} {} {}", quote(&lp_path), quote(&sol_path))
    };
    let out = Command::new("sh")
        .arg("-c")
        .arg(&script)
        .output()
        .map_err(|e| solver_error(format!("cannot start solver: {e}"), ""))?;
    let captured = format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    if !out.status.success() {
        return Err(solver_error(
            format!("solver exited with {}", out.status),
            captured,
        ));
    }
    let text = std::fs::read_to_string(&sol_path)
        .map_err(|e| solver_error(format!("no solution file: {e}"), captured.clone()))?;
    parse_solution(&text, inst).map_err(|e| match e {
        Error::Solver { message, output } => solver_error(message, format!("{captured}{output}")),
        other => other,
    })
}

/// The solver command: the environment override if set, else the
/// `solver_cmd` key of the TOML config file, if any.
pub fn solver_command(config: Option<&Path>) -> Result<Option<String>> {
    if let Ok(cmd) = std::env::var(SOLVER_ENV_VAR) {
        if !cmd.trim().is_empty() {
            return Ok(Some(cmd));
        }
    }
    let Some(path) = config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    match table.get("solver_cmd") {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(Error::Config("solver_cmd must be a string".into())),
    }
}
