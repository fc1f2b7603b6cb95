//! Membership tests for the three quasi-biclique definitions and the
//! parameter conversions that relate the per-vertex definitions to the
//! aggregate-density one.

use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;

use crate::bigraph::{bitset_of, BipartiteGraph, Selection, Side};
use crate::error::{Error, Result};
use crate::ratio::{check_gamma, check_theta, meets, Rational};

/// Parameter bundle shared by the validators and the greedy heuristic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiParams {
    /// Minimum density, in (0, 1].
    pub gamma: Rational,
    /// Per-vertex missing fraction, in [0, 0.5].
    pub delta: Option<Rational>,
    /// Per-vertex missing count.
    pub epsilon: Option<u64>,
    /// Greedy build size on U.
    pub tau: Option<usize>,
    /// Balance slack, in [0, 1).
    pub theta: Option<Rational>,
}

impl QuasiParams {
    pub fn new(gamma: Rational) -> Self {
        Self {
            gamma,
            delta: None,
            epsilon: None,
            tau: None,
            theta: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        if let Some(d) = self.delta {
            check_delta(d)?;
        }
        if let Some(t) = self.theta {
            check_theta(t)?;
        }
        if self.tau == Some(0) {
            return Err(Error::arg("tau must be positive"));
        }
        Ok(())
    }

    /// γ derived from whichever per-vertex parameter is set. The ε route
    /// needs the per-side lower size bounds.
    pub fn derived_gamma(&self, omega_l_u: usize, omega_l_v: usize) -> Result<Rational> {
        match (self.delta, self.epsilon) {
            (Some(_), Some(_)) => Err(Error::arg("set at most one of delta and epsilon")),
            (Some(d), None) => delta_to_gamma(d),
            (None, Some(e)) => epsilon_to_gamma(e, omega_l_u, omega_l_v),
            (None, None) => Ok(self.gamma),
        }
    }
}

fn check_delta(delta: Rational) -> Result<Rational> {
    if delta > Ratio::new(1, 2) {
        return Err(Error::arg(format!("delta must be in [0, 0.5], got {delta}")));
    }
    Ok(delta)
}

fn nonempty(selection: &Selection) -> Result<()> {
    if selection.has_empty_side() {
        Err(Error::UndefinedDensity)
    } else {
        Ok(())
    }
}

/// Density of the selection is at least `gamma` (inclusive).
pub fn is_gamma_quasi_biclique(g: &BipartiteGraph, selection: &Selection, gamma: Rational) -> Result<bool> {
    nonempty(selection)?;
    let stats = g.induced_stats(selection.u_set(), selection.v_set())?;
    let cells = (stats.u_len() * stats.v_len()) as u64;
    Ok(meets(stats.edges(), gamma, cells))
}

/// Per-vertex restricted degrees of both sides of a selection.
fn restricted_degrees(g: &BipartiteGraph, selection: &Selection) -> (Vec<usize>, Vec<usize>) {
    let u_mask = bitset_of(g.u_count(), selection.u_set());
    let v_mask = bitset_of(g.v_count(), selection.v_set());
    let du = selection
        .u_set()
        .iter()
        .map(|&u| g.neighbors(Side::U, u).intersection_count(&v_mask))
        .collect();
    let dv = selection
        .v_set()
        .iter()
        .map(|&v| g.neighbors(Side::V, v).intersection_count(&u_mask))
        .collect();
    (du, dv)
}

fn check_selection_range(g: &BipartiteGraph, selection: &Selection) -> Result<()> {
    if selection.u_set().iter().any(|&u| u >= g.u_count())
        || selection.v_set().iter().any(|&v| v >= g.v_count())
    {
        return Err(Error::arg("selection index out of range"));
    }
    Ok(())
}

/// Every `u` in U' sees at least `(1-δ)|V'|` of V' and every `v` in V' sees at
/// least `(1-δ)|U'|` of U'. The threshold is not rounded.
pub fn is_delta_quasi_biclique(g: &BipartiteGraph, selection: &Selection, delta: Rational) -> Result<bool> {
    check_delta(delta)?;
    nonempty(selection)?;
    check_selection_range(g, selection)?;
    let keep = Rational::one() - delta;
    let (du, dv) = restricted_degrees(g, selection);
    let nu = selection.u_len() as u64;
    let nv = selection.v_len() as u64;
    Ok(du.iter().all(|&d| meets(d as u64, keep, nv)) && dv.iter().all(|&d| meets(d as u64, keep, nu)))
}

/// Every vertex misses at most `epsilon` vertices of the opposite side of
/// the selection.
pub fn is_epsilon_quasi_biclique(g: &BipartiteGraph, selection: &Selection, epsilon: u64) -> Result<bool> {
    nonempty(selection)?;
    check_selection_range(g, selection)?;
    let (du, dv) = restricted_degrees(g, selection);
    let nu = selection.u_len() as u64;
    let nv = selection.v_len() as u64;
    Ok(du.iter().all(|&d| nv - d as u64 <= epsilon) && dv.iter().all(|&d| nu - d as u64 <= epsilon))
}

/// A δ-quasi-biclique is a γ-quasi-biclique for `γ = 1 - δ`.
pub fn delta_to_gamma(delta: Rational) -> Result<Rational> {
    check_delta(delta)?;
    Ok(Rational::one() - delta)
}

/// An ε-quasi-biclique whose sides have at least `omega_l_u` and
/// `omega_l_v` vertices is a γ-quasi-biclique for
/// `γ = 1 - ε / min(omega_l_u, omega_l_v)`.
pub fn epsilon_to_gamma(epsilon: u64, omega_l_u: usize, omega_l_v: usize) -> Result<Rational> {
    let floor = omega_l_u.min(omega_l_v) as u64;
    if epsilon >= floor {
        return Err(Error::arg(format!(
            "epsilon must be below min(omega_l) = {floor}, got {epsilon}"
        )));
    }
    Ok(Rational::one() - Ratio::new(epsilon, floor))
}
