//! Two-phase greedy heuristic for δ-quasi-bicliques.
//!
//! The build phase starts from `U' = ∅, V' = V`, repeatedly moves the
//! highest-degree vertex of `U \ U'` into `U'` and drops from `V'` every `v`
//! with `d(v, U') < (1-δ)|U'|`, until `|U'| = τ`. The augmentation phase
//! then adds maximum-degree outside vertices, U side first, while the
//! selection stays a δ-quasi-biclique.
//!
//! Ties are broken by global degree, then degree into the current opposite
//! set, then lowest index.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::bigraph::{BipartiteGraph, Selection, Side};
use crate::error::{Error, Result};
use crate::quasidef::{delta_to_gamma, is_delta_quasi_biclique, is_gamma_quasi_biclique};
use crate::ratio::{meets, Rational};

/// Which degree ranks candidate vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// Degree in the whole graph.
    #[default]
    Global,
    /// Degree into the current opposite side of the selection.
    Restricted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyOptions {
    pub degree: DegreeMode,
    /// Also run on the transposed graph and keep the larger result.
    pub both_sides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GreedyStep {
    Add {
        side: Side,
        vertex: usize,
    },
    /// Vertices of V' dropped after the preceding `Add`.
    Prune {
        removed: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub delta: Rational,
    pub tau: usize,
    pub options: GreedyOptions,
    /// Steps were recorded on the transposed graph.
    pub transposed: bool,
    pub steps: Vec<GreedyStep>,
    pub result: Selection,
}

impl GreedyTrace {
    /// Re-applies the recorded steps to `g`, starting from `U' = ∅, V' = V`.
    pub fn replay(&self, g: &BipartiteGraph) -> Result<Selection> {
        let owned;
        let graph = if self.transposed {
            owned = g.transpose();
            &owned
        } else {
            g
        };
        let mut u_in = FixedBitSet::with_capacity(graph.u_count());
        let mut v_in = FixedBitSet::with_capacity(graph.v_count());
        v_in.insert_range(..);
        for step in &self.steps {
            match step {
                GreedyStep::Add {
                    side: Side::U,
                    vertex,
                } => u_in.insert(*vertex),
                GreedyStep::Add {
                    side: Side::V,
                    vertex,
                } => v_in.insert(*vertex),
                GreedyStep::Prune { removed } => {
                    for &v in removed {
                        v_in.remove(v);
                    }
                }
            }
        }
        let u: Vec<usize> = u_in.ones().collect();
        let v: Vec<usize> = v_in.ones().collect();
        let sel = graph.induced_stats(&u, &v)?;
        Ok(if self.transposed { sel.swapped() } else { sel })
    }
}

/// Result of [`greedy_quasi_biclique`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedySolution {
    pub selection: Selection,
    pub size: usize,
    pub density: Rational,
    pub delta_valid: bool,
    pub gamma_valid: bool,
    pub trace: GreedyTrace,
}

/// τ default: the smallest U-side degree, at least 1.
pub fn default_tau(g: &BipartiteGraph) -> usize {
    (0..g.u_count())
        .map(|u| g.row(u).count_ones(..))
        .min()
        .unwrap_or(1)
        .max(1)
}

struct State<'g> {
    g: &'g BipartiteGraph,
    keep: Rational,
    mode: DegreeMode,
    u_in: FixedBitSet,
    v_in: FixedBitSet,
    /// d(u, V') for every u in U.
    du: Vec<usize>,
    /// d(v, U') for every v in V.
    dv: Vec<usize>,
    steps: Vec<GreedyStep>,
}

impl<'g> State<'g> {
    fn new(g: &'g BipartiteGraph, delta: Rational, mode: DegreeMode) -> Self {
        let mut v_in = FixedBitSet::with_capacity(g.v_count());
        v_in.insert_range(..);
        Self {
            g,
            keep: Rational::from_integer(1) - delta,
            mode,
            u_in: FixedBitSet::with_capacity(g.u_count()),
            v_in,
            du: (0..g.u_count()).map(|u| g.row(u).count_ones(..)).collect(),
            dv: vec![0; g.v_count()],
            steps: Vec::new(),
        }
    }

    fn from_selection(g: &'g BipartiteGraph, sel: &Selection, delta: Rational, mode: DegreeMode) -> Self {
        let mut s = Self::new(g, delta, mode);
        s.v_in.clear();
        for &v in sel.v_set() {
            s.v_in.insert(v);
        }
        for &u in sel.u_set() {
            s.u_in.insert(u);
        }
        s.du = (0..g.u_count())
            .map(|u| g.row(u).intersection_count(&s.v_in))
            .collect();
        s.dv = (0..g.v_count())
            .map(|v| g.col(v).intersection_count(&s.u_in))
            .collect();
        s
    }

    fn selection(&self) -> Selection {
        let u: Vec<usize> = self.u_in.ones().collect();
        let v: Vec<usize> = self.v_in.ones().collect();
        self.g.induced_stats(&u, &v).expect("indices in range")
    }

    fn nu(&self) -> usize {
        self.u_in.count_ones(..)
    }

    fn nv(&self) -> usize {
        self.v_in.count_ones(..)
    }

    fn global_degree(&self, side: Side, x: usize) -> usize {
        self.g.neighbors(side, x).count_ones(..)
    }

    fn restricted(&self, side: Side, x: usize) -> usize {
        match side {
            Side::U => self.du[x],
            Side::V => self.dv[x],
        }
    }

    /// Ranking key: larger is better.
    fn key(&self, side: Side, x: usize) -> (usize, usize, std::cmp::Reverse<usize>) {
        let (global, restricted) = (self.global_degree(side, x), self.restricted(side, x));
        match self.mode {
            DegreeMode::Global => (global, restricted, std::cmp::Reverse(x)),
            DegreeMode::Restricted => (restricted, global, std::cmp::Reverse(x)),
        }
    }

    fn outside(&self, side: Side) -> Vec<usize> {
        match side {
            Side::U => (0..self.g.u_count())
                .filter(|&u| !self.u_in.contains(u))
                .collect(),
            Side::V => (0..self.g.v_count())
                .filter(|&v| !self.v_in.contains(v))
                .collect(),
        }
    }

    fn add(&mut self, side: Side, x: usize) {
        match side {
            Side::U => {
                self.u_in.insert(x);
                for v in self.g.row(x).ones() {
                    self.dv[v] += 1;
                }
            }
            Side::V => {
                self.v_in.insert(x);
                for u in self.g.col(x).ones() {
                    self.du[u] += 1;
                }
            }
        }
        self.steps.push(GreedyStep::Add { side, vertex: x });
    }

    fn drop_v(&mut self, v: usize) {
        self.v_in.remove(v);
        for u in self.g.col(v).ones() {
            self.du[u] -= 1;
        }
    }

    /// Would adding `x` on `side` keep the δ-conditions on both sides?
    fn can_add(&self, side: Side, x: usize) -> bool {
        let (own_in, other_in, own_deg, other_deg) = match side {
            Side::U => (&self.u_in, &self.v_in, &self.du, &self.dv),
            Side::V => (&self.v_in, &self.u_in, &self.dv, &self.du),
        };
        let own_size = own_in.count_ones(..) as u64 + 1;
        let other_size = other_in.count_ones(..) as u64;
        if !meets(own_deg[x] as u64, self.keep, other_size) {
            return false;
        }
        let row = self.g.neighbors(side, x);
        other_in.ones().all(|y| {
            meets(
                (other_deg[y] + usize::from(row.contains(y))) as u64,
                self.keep,
                own_size,
            )
        })
    }
}

fn check_delta(delta: Rational) -> Result<()> {
    delta_to_gamma(delta).map(|_| ())
}

/// Build phase. Fails with [`Error::HeuristicFailure`] when `V'` empties
/// before `|U'|` reaches `tau`.
pub fn greedy_build(
    g: &BipartiteGraph,
    delta: Rational,
    tau: usize,
    mode: DegreeMode,
) -> Result<(Selection, Vec<GreedyStep>)> {
    check_delta(delta)?;
    if tau < 1 || tau > g.u_count() {
        return Err(Error::arg(format!(
            "tau must be in 1..={}, got {tau}",
            g.u_count()
        )));
    }
    let mut st = State::new(g, delta, mode);
    while st.nu() < tau {
        let before = st.selection();
        let u = st
            .outside(Side::U)
            .into_iter()
            .max_by_key(|&u| st.key(Side::U, u))
            .expect("tau <= |U| leaves a candidate");
        st.add(Side::U, u);
        let nu = st.nu() as u64;
        let removed: Vec<usize> = st
            .v_in
            .ones()
            .filter(|&v| !meets(st.dv[v] as u64, st.keep, nu))
            .collect();
        for &v in &removed {
            st.drop_v(v);
        }
        st.steps.push(GreedyStep::Prune { removed });
        if st.nv() == 0 {
            return Err(Error::HeuristicFailure {
                reason: "V' became empty during the build phase".into(),
                steps: st.steps.len(),
                last: before,
            });
        }
    }
    Ok((st.selection(), st.steps))
}

/// Augmentation phase: grows a δ-quasi-biclique to a fixpoint.
pub fn greedy_augment(
    g: &BipartiteGraph,
    selection: &Selection,
    delta: Rational,
    mode: DegreeMode,
) -> Result<(Selection, Vec<GreedyStep>)> {
    check_delta(delta)?;
    if selection.has_empty_side() || !is_delta_quasi_biclique(g, selection, delta)? {
        return Err(Error::arg("augmentation needs a δ-quasi-biclique as input"));
    }
    let mut st = State::from_selection(g, selection, delta, mode);
    loop {
        let mut changed = false;
        for side in [Side::U, Side::V] {
            loop {
                let outside = st.outside(side);
                let Some(top) = outside.iter().map(|&x| st.key(side, x).0).max() else {
                    break;
                };
                let mut tied: Vec<usize> = outside
                    .into_iter()
                    .filter(|&x| st.key(side, x).0 == top)
                    .collect();
                tied.sort_by_key(|&x| std::cmp::Reverse(st.key(side, x)));
                match tied.into_iter().find(|&x| st.can_add(side, x)) {
                    Some(x) => {
                        st.add(side, x);
                        changed = true;
                    }
                    None => break,
                }
            }
        }
        if !changed {
            break;
        }
    }
    let out = st.selection();
    debug_assert!(is_delta_quasi_biclique(g, &out, delta).unwrap_or(false));
    Ok((out, st.steps))
}

fn run_one(
    g: &BipartiteGraph,
    delta: Rational,
    tau: usize,
    mode: DegreeMode,
) -> Result<(Selection, Vec<GreedyStep>)> {
    let (built, mut steps) = greedy_build(g, delta, tau, mode)?;
    if !is_delta_quasi_biclique(g, &built, delta)? {
        return Err(Error::HeuristicFailure {
            reason: "build phase ended with a U' vertex below (1-δ)|V'|".into(),
            steps: steps.len(),
            last: built,
        });
    }
    let (grown, more) = greedy_augment(g, &built, delta, mode)?;
    steps.extend(more);
    Ok((grown, steps))
}

/// Build followed by augmentation. The returned selection is always a
/// δ-quasi-biclique, hence a γ-quasi-biclique for `γ = 1 - δ`.
pub fn greedy_quasi_biclique(
    g: &BipartiteGraph,
    delta: Rational,
    tau: usize,
    options: GreedyOptions,
) -> Result<GreedySolution> {
    let direct = run_one(g, delta, tau, options.degree);
    let (selection, steps, transposed) = if options.both_sides && g.v_count() > 0 {
        let t = g.transpose();
        let swapped = run_one(&t, delta, tau.min(t.u_count()).max(1), options.degree);
        match (direct, swapped) {
            (Ok((s, st)), Ok((s2, st2))) => {
                if s2.size() > s.size() {
                    (s2.swapped(), st2, true)
                } else {
                    (s, st, false)
                }
            }
            (Ok((s, st)), Err(_)) => (s, st, false),
            (Err(_), Ok((s2, st2))) => (s2.swapped(), st2, true),
            (Err(e), Err(_)) => return Err(e),
        }
    } else {
        let (s, st) = direct?;
        (s, st, false)
    };
    let gamma = delta_to_gamma(delta)?;
    let delta_valid = is_delta_quasi_biclique(g, &selection, delta)?;
    let gamma_valid = is_gamma_quasi_biclique(g, &selection, gamma)?;
    assert!(
        delta_valid && gamma_valid,
        "greedy output must be a δ-quasi-biclique"
    );
    Ok(GreedySolution {
        size: selection.size(),
        density: selection.density()?,
        delta_valid,
        gamma_valid,
        trace: GreedyTrace {
            delta,
            tau,
            options,
            transposed,
            steps,
            result: selection.clone(),
        },
        selection,
    })
}

/// Runs the heuristic for every τ in `taus` and keeps the largest result
/// (earliest τ on ties). Individual failures are skipped.
pub fn greedy_best_over_tau(
    g: &BipartiteGraph,
    delta: Rational,
    taus: impl IntoIterator<Item = usize>,
    options: GreedyOptions,
) -> Result<GreedySolution> {
    let mut best: Option<GreedySolution> = None;
    let mut last_err = None;
    for tau in taus {
        match greedy_quasi_biclique(g, delta, tau, options) {
            Ok(sol) => {
                if best.as_ref().is_none_or(|b| sol.size > b.size) {
                    best = Some(sol);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::arg("empty tau range")))
}
