//! Closed-form upper bounds on maximum quasi-(bi)clique size and the edge
//! count range of a quasi-biclique under per-side size bounds.
//!
//! Size bounds are returned as reals; the solver floors them.

use serde::{Deserialize, Serialize};

use crate::bigraph::{BipartiteGraph, Side};
use crate::error::{Error, Result};
use crate::ratio::{ceil_mul, Rational};

/// Per-side cardinality bounds `lo <= |U'| <= hi`, `lo <= |V'| <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub u_min: usize,
    pub u_max: usize,
    pub v_min: usize,
    pub v_max: usize,
}

impl SizeBounds {
    /// `(1, |U|) x (1, |V|)`.
    pub fn full(g: &BipartiteGraph) -> Self {
        Self {
            u_min: 1,
            u_max: g.u_count(),
            v_min: 1,
            v_max: g.v_count(),
        }
    }

    pub fn new(u_min: usize, u_max: usize, v_min: usize, v_max: usize) -> Self {
        Self {
            u_min,
            u_max,
            v_min,
            v_max,
        }
    }

    /// Requires `1 <= min <= max <= |side|` on both sides.
    pub fn validate(&self, g: &BipartiteGraph) -> Result<()> {
        for (side, lo, hi) in [
            (Side::U, self.u_min, self.u_max),
            (Side::V, self.v_min, self.v_max),
        ] {
            let n = g.side_count(side);
            if lo < 1 || lo > hi || hi > n {
                return Err(Error::Infeasible(format!(
                    "size bounds [{lo}, {hi}] on {side} are inconsistent with |{side}| = {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, nu: usize, nv: usize) -> bool {
        (self.u_min..=self.u_max).contains(&nu) && (self.v_min..=self.v_max).contains(&nv)
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.v_min, self.v_max, self.u_min, self.u_max)
    }
}

/// Inclusive range of admissible quasi-biclique edge counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeRange {
    pub k_min: u64,
    pub k_max: u64,
}

fn check_gamma_f(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::arg(format!("gamma must be in (0, 1], got {gamma}")));
    }
    Ok(())
}

/// Upper bound on the vertex count of a γ-quasi-clique in a general graph
/// with `m` edges: `(γ + sqrt(γ + 8γm)) / (2γ)`.
pub fn quasi_clique_upper_bound(m: u64, gamma: f64) -> Result<f64> {
    check_gamma_f(gamma)?;
    let m = m as f64;
    Ok((gamma + (gamma + 8.0 * gamma * m).sqrt()) / (2.0 * gamma))
}

/// Upper bound on `|U'| + |V'|` for a balanced (`|U'| = |V'|`)
/// γ-quasi-biclique: `sqrt(4m / γ)`.
pub fn balanced_biclique_upper_bound(m: u64, gamma: f64) -> Result<f64> {
    check_gamma_f(gamma)?;
    Ok((4.0 * m as f64 / gamma).sqrt())
}

/// Upper bound on `|U'| + |V'|` when `(1-θ)|V'| <= |U'| <= (1+θ)|V'|`.
pub fn near_balanced_upper_bound(m: u64, gamma: f64, theta: f64) -> Result<f64> {
    check_gamma_f(gamma)?;
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::arg(format!("theta must be in [0, 1), got {theta}")));
    }
    let m = m as f64;
    let first = (2.0 + theta) * (m / (gamma * (1.0 - theta))).sqrt();
    let second = (1.0 + 1.0 / (1.0 - theta)) * (m * (1.0 + theta) / gamma).sqrt();
    Ok(first.min(second))
}

/// Floors a real bound into an integer cap, tolerating representation error
/// just below an integer (e.g. `3.9999999999` for an exact 4).
pub fn floor_bound(x: f64) -> u64 {
    if !x.is_finite() {
        return u64::MAX;
    }
    (x + 1e-9).floor().max(0.0) as u64
}

/// Edge count range for quasi-bicliques respecting `sizes`.
///
/// `k_max = min(|E|, u_max * v_max)` and `k_min = ceil(γ u_min v_min)`. With
/// `use_degree_bounds` set, `k_min` is additionally raised to
/// `ceil(γ * sum of the u_min smallest U-degrees)` and the V analogue. Those
/// degree terms are not valid lower bounds in general (degrees count edges
/// leaving the quasi-biclique), so the solver never enables them.
pub fn edge_count_bounds(
    g: &BipartiteGraph,
    gamma: Rational,
    sizes: &SizeBounds,
    use_degree_bounds: bool,
) -> Result<EdgeRange> {
    let k_max = (g.edge_count() as u64).min((sizes.u_max * sizes.v_max) as u64);
    let mut k_min = ceil_mul(gamma, (sizes.u_min * sizes.v_min) as u64);
    if use_degree_bounds {
        for (side, take) in [(Side::U, sizes.u_min), (Side::V, sizes.v_min)] {
            let mut degrees: Vec<u64> = (0..g.side_count(side))
                .map(|i| g.neighbors(side, i).count_ones(..) as u64)
                .collect();
            degrees.sort_unstable();
            let sum: u64 = degrees.iter().take(take).sum();
            k_min = k_min.max(ceil_mul(gamma, sum));
        }
    }
    if k_min > k_max {
        return Err(Error::Infeasible(format!(
            "edge count range is empty (k_min = {k_min} > k_max = {k_max})"
        )));
    }
    Ok(EdgeRange { k_min, k_max })
}
