//! Exact maximum γ-quasi-biclique search.
//!
//! Two independent routes solve the same problem:
//!
//! * [`sweep_oracle`] enumerates every subset `S` of the smaller side and,
//!   for each target size `k` of the other side, completes `S` with the `k`
//!   vertices of largest `d(·, S)`. For fixed `S` and `k` that prefix has the
//!   most edges, and both objectives grow with the edge count at fixed
//!   sizes, so the sweep is exact.
//! * [`branch_and_bound`] branches include/exclude on single vertices of
//!   either side and prunes with a per-size edge-count bound, the
//!   near-balanced size bound and the edge-count range.
//!
//! Both return a [`SolutionPool`] of every optimal selection (up to the
//! pool limit) in canonical order: larger `|U'|` first, then the sorted
//! index sets lexicographically.

mod bb;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bigraph::{BipartiteGraph, Selection};
use crate::bounds::{edge_count_bounds, EdgeRange, SizeBounds};
use crate::error::{Error, Result};
use crate::quasidef::is_gamma_quasi_biclique;
use crate::ratio::{check_gamma, check_theta, meets, to_f64, Rational};

pub use bb::branch_and_bound;
pub use oracle::{sweep_oracle, DEFAULT_ORACLE_CAP};

/// What the search maximises.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// `|U'| + |V'|`.
    #[default]
    Size,
    /// `ρ² |U'| |V'| = |E'|² / (|U'| |V'|)`.
    Quality,
}

impl Objective {
    pub fn value(self, edges: u64, nu: usize, nv: usize) -> Rational {
        match self {
            Objective::Size => Ratio::from_integer((nu + nv) as u64),
            Objective::Quality => quality_ratio(edges, nu, nv),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Size => "size",
            Objective::Quality => "quality",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(Objective::Size),
            "quality" => Ok(Objective::Quality),
            other => Err(Error::arg(format!("unknown objective `{other}`"))),
        }
    }
}

fn quality_ratio(edges: u64, nu: usize, nv: usize) -> Rational {
    Ratio::new(edges * edges, (nu * nv) as u64)
}

fn check_sizes(nu: usize, nv: usize) -> Result<()> {
    if nu == 0 || nv == 0 {
        return Err(Error::arg("both sides must be nonempty"));
    }
    Ok(())
}

/// `edges² / (nu nv)`, the squared-density-times-area criterion.
pub fn quality_objective(edges: u64, nu: usize, nv: usize) -> Result<f64> {
    check_sizes(nu, nv)?;
    Ok(to_f64(quality_ratio(edges, nu, nv)))
}

/// `2 ln(edges) - ln(nu) - ln(nv)`, the additive form used by the second
/// MIP model. Undefined for `edges = 0`.
pub fn f_log(edges: u64, nu: usize, nv: usize) -> Result<f64> {
    check_sizes(nu, nv)?;
    if edges == 0 {
        return Err(Error::arg("log criterion is undefined for zero edges"));
    }
    Ok(2.0 * (edges as f64).ln() - (nu as f64).ln() - (nv as f64).ln())
}

/// Search configuration shared by both exact routes.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub gamma: Rational,
    pub objective: Objective,
    /// Defaults to `(1, |U|) x (1, |V|)`.
    pub size_bounds: Option<SizeBounds>,
    /// Restrict to `(1-θ)|V'| <= |U'| <= (1+θ)|V'|`.
    pub theta: Option<Rational>,
    /// Maximum number of optimal selections to keep; at least 1.
    pub pool_limit: usize,
    pub time_limit: Option<Duration>,
    /// Worker threads for branch-and-bound; 1 runs single-threaded.
    pub threads: usize,
    /// Largest smaller-side size the sweep oracle accepts.
    pub oracle_cap: usize,
}

impl SearchParams {
    pub fn new(gamma: Rational) -> Self {
        Self {
            gamma,
            objective: Objective::Size,
            size_bounds: None,
            theta: None,
            pool_limit: usize::MAX,
            time_limit: None,
            threads: 1,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }

    pub fn objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn size_bounds(mut self, bounds: SizeBounds) -> Self {
        self.size_bounds = Some(bounds);
        self
    }

    pub fn theta(mut self, theta: Rational) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn pool_limit(mut self, limit: usize) -> Self {
        self.pool_limit = limit;
        self
    }

    pub fn time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// One optimal (or, after a timeout, best known) selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub selection: Selection,
    pub objective: Objective,
    pub objective_value: Rational,
    pub certified_optimal: bool,
    /// Upper bound on the optimum when the search stopped; equals the
    /// objective value for certified solutions.
    pub bound_at_termination: f64,
}

impl Solution {
    pub fn value_f64(&self) -> f64 {
        to_f64(self.objective_value)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
}

/// All optimal selections found, sharing one objective value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionPool {
    pub objective: Objective,
    pub solutions: Vec<Solution>,
    /// More optima exist than were kept, or enumeration was cut short.
    pub truncated: bool,
    /// The search ran to completion, so the value (or infeasibility) is
    /// proven.
    pub certified: bool,
    pub bound: f64,
    pub stats: SearchStats,
}

impl SolutionPool {
    fn infeasible(objective: Objective) -> Self {
        Self {
            objective,
            solutions: Vec::new(),
            truncated: false,
            certified: true,
            bound: 0.0,
            stats: SearchStats::default(),
        }
    }

    /// Proven to contain no feasible selection.
    pub fn is_infeasible(&self) -> bool {
        self.certified && self.solutions.is_empty()
    }

    pub fn best(&self) -> Option<&Solution> {
        self.solutions.first()
    }

    pub fn optimum(&self) -> Option<Rational> {
        self.best().map(|s| s.objective_value)
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Resolved, validated search problem.
#[derive(Debug, Clone)]
pub(crate) struct Problem<'g> {
    pub g: &'g BipartiteGraph,
    pub gamma: Rational,
    pub objective: Objective,
    pub bounds: SizeBounds,
    pub theta: Option<Rational>,
    pub edges: EdgeRange,
    pub pool_limit: usize,
    pub deadline: Option<Instant>,
}

impl<'g> Problem<'g> {
    /// `Ok(None)` when the constraints admit no selection at all.
    pub fn new(g: &'g BipartiteGraph, params: &SearchParams) -> Result<Option<Self>> {
        check_gamma(params.gamma)?;
        if let Some(t) = params.theta {
            check_theta(t)?;
        }
        if params.pool_limit == 0 {
            return Err(Error::arg("pool limit must be at least 1"));
        }
        let bounds = match params.size_bounds {
            Some(b) => {
                if b.u_min < 1 || b.v_min < 1 || b.u_min > b.u_max || b.v_min > b.v_max {
                    return Err(Error::arg(format!("inconsistent size bounds {b:?}")));
                }
                if b.u_max > g.u_count() || b.v_max > g.v_count() {
                    return Err(Error::arg(format!(
                        "size bounds {b:?} exceed the graph ({}x{})",
                        g.u_count(),
                        g.v_count()
                    )));
                }
                b
            }
            None => SizeBounds::full(g),
        };
        if bounds.validate(g).is_err() {
            return Ok(None);
        }
        let edges = match edge_count_bounds(g, params.gamma, &bounds, false) {
            Ok(r) => r,
            Err(Error::Infeasible(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(Self {
            g,
            gamma: params.gamma,
            objective: params.objective,
            bounds,
            theta: params.theta,
            edges,
            pool_limit: params.pool_limit,
            deadline: params.time_limit.map(|d| Instant::now() + d),
        }))
    }

    pub fn balanced(&self, nu: usize, nv: usize) -> bool {
        match self.theta {
            None => true,
            Some(t) => {
                let (num, den) = (*t.numer() as u128, *t.denom() as u128);
                let (nu, nv) = (nu as u128, nv as u128);
                nu * den >= (den - num) * nv && nu * den <= (den + num) * nv
            }
        }
    }

    /// Shape constraints that do not depend on the edge count.
    pub fn shape_ok(&self, nu: usize, nv: usize) -> bool {
        self.bounds.contains(nu, nv) && self.balanced(nu, nv)
    }

    pub fn feasible(&self, edges: u64, nu: usize, nv: usize) -> bool {
        self.shape_ok(nu, nv)
            && edges >= self.edges.k_min
            && edges <= self.edges.k_max
            && meets(edges, self.gamma, (nu * nv) as u64)
    }

    pub fn value(&self, edges: u64, nu: usize, nv: usize) -> Rational {
        self.objective.value(edges, nu, nv)
    }

    pub fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Sort key realising the canonical pool order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Canonical(pub Selection);

impl Ord for Canonical {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .0
            .u_len()
            .cmp(&self.0.u_len())
            .then_with(|| self.0.u_set().cmp(other.0.u_set()))
            .then_with(|| self.0.v_set().cmp(other.0.v_set()))
    }
}

impl PartialOrd for Canonical {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Keeps the first `limit` selections in canonical order.
#[derive(Debug, Clone)]
pub(crate) struct PoolCollector {
    limit: usize,
    kept: BTreeSet<Canonical>,
    overflow: bool,
}

impl PoolCollector {
    pub fn new(limit: usize) -> Self {
        Self {
            limit,
            kept: BTreeSet::new(),
            overflow: false,
        }
    }

    pub fn offer(&mut self, sel: Selection) {
        let item = Canonical(sel);
        if self.kept.len() < self.limit {
            self.kept.insert(item);
            return;
        }
        if self.kept.contains(&item) {
            return;
        }
        self.overflow = true;
        if self.kept.last().is_some_and(|last| item < *last) {
            self.kept.insert(item);
            self.kept.pop_last();
        }
    }

    pub fn merge(&mut self, other: PoolCollector) {
        self.overflow |= other.overflow;
        for item in other.kept {
            self.offer(item.0);
        }
    }

    pub fn overflowed(&self) -> bool {
        self.overflow
    }

    pub fn into_selections(self) -> Vec<Selection> {
        self.kept.into_iter().map(|c| c.0).collect()
    }
}

/// Turns the collected optima into a pool, checking every entry.
pub(crate) fn finish_pool(
    p: &Problem<'_>,
    value: Rational,
    collector: PoolCollector,
    enumeration_complete: bool,
    nodes: u64,
) -> SolutionPool {
    let truncated = collector.overflowed() || !enumeration_complete;
    let solutions: Vec<Solution> = collector
        .into_selections()
        .into_iter()
        .map(|selection| {
            debug_assert_eq!(
                p.value(selection.edges(), selection.u_len(), selection.v_len()),
                value
            );
            assert!(
                is_gamma_quasi_biclique(p.g, &selection, p.gamma).unwrap_or(false),
                "solver returned a selection below gamma"
            );
            Solution {
                selection,
                objective: p.objective,
                objective_value: value,
                certified_optimal: true,
                bound_at_termination: to_f64(value),
            }
        })
        .collect();
    SolutionPool {
        objective: p.objective,
        solutions,
        truncated,
        certified: true,
        bound: to_f64(value),
        stats: SearchStats { nodes },
    }
}

/// Pool holding just the incumbent of an interrupted search.
pub(crate) fn uncertified_pool(
    p: &Problem<'_>,
    incumbent: Option<(Rational, Selection)>,
    bound: f64,
    nodes: u64,
) -> SolutionPool {
    let solutions = incumbent
        .into_iter()
        .map(|(value, selection)| {
            assert!(is_gamma_quasi_biclique(p.g, &selection, p.gamma).unwrap_or(false));
            Solution {
                selection,
                objective: p.objective,
                objective_value: value,
                certified_optimal: false,
                bound_at_termination: bound,
            }
        })
        .collect();
    SolutionPool {
        objective: p.objective,
        solutions,
        truncated: true,
        certified: false,
        bound,
        stats: SearchStats { nodes },
    }
}

/// Enumerates every `take`-subset of `cands` (sorted by weight, descending)
/// whose weight sum is at least `min_sum`; stops early when `visit` returns
/// `false`. Returns `false` if stopped early.
pub(crate) fn for_each_heavy_subset(
    cands: &[(usize, u64)],
    take: usize,
    min_sum: u64,
    visit: &mut dyn FnMut(&[usize], u64) -> bool,
) -> bool {
    // suffix_best[i][t] would be exact; since weights are sorted the best
    // completion from position i with t more picks is the next t weights.
    let mut prefix = vec![0u64; cands.len() + 1];
    for (i, c) in cands.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c.1;
    }
    let mut chosen = Vec::with_capacity(take);
    fn rec(
        cands: &[(usize, u64)],
        prefix: &[u64],
        i: usize,
        take: usize,
        sum: u64,
        min_sum: u64,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize], u64) -> bool,
    ) -> bool {
        let need = take - chosen.len();
        if need == 0 {
            return if sum >= min_sum { visit(chosen, sum) } else { true };
        }
        if cands.len() - i < need {
            return true;
        }
        if sum + prefix[i + need] - prefix[i] < min_sum {
            return true;
        }
        chosen.push(cands[i].0);
        let go = rec(
            cands,
            prefix,
            i + 1,
            take,
            sum + cands[i].1,
            min_sum,
            chosen,
            visit,
        );
        chosen.pop();
        if !go {
            return false;
        }
        rec(cands, prefix, i + 1, take, sum, min_sum, chosen, visit)
    }
    rec(cands, &prefix, 0, take, 0, min_sum, &mut chosen, visit)
}

/// Which exact route to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Bb,
    Oracle,
}

pub fn solve(g: &BipartiteGraph, params: &SearchParams, method: Method) -> Result<SolutionPool> {
    match method {
        Method::Bb => branch_and_bound(g, params),
        Method::Oracle => sweep_oracle(g, params),
    }
}

/// Branch-and-bound restricted to θ-near-balanced selections.
pub fn enumerate_balanced(g: &BipartiteGraph, params: &SearchParams) -> Result<SolutionPool> {
    if params.theta.is_none() {
        return Err(Error::arg("enumerate_balanced needs theta"));
    }
    branch_and_bound(g, params)
}
