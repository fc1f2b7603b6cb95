#![allow(dead_code)]

use std::path::PathBuf;

use qbc_core::{BipartiteGraph, Objective, Rational, Selection};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn southern_women() -> BipartiteGraph {
    BipartiteGraph::load_path(&fixture("southern_women.tsv")).unwrap()
}

/// Graph whose edge `(u, v)` is present iff bit `u * nv + v` of `bits` is set.
pub fn from_pattern(nu: usize, nv: usize, bits: u64) -> BipartiteGraph {
    let edges = (0..nu)
        .flat_map(|u| (0..nv).map(move |v| (u, v)))
        .filter(|&(u, v)| bits >> (u * nv + v) & 1 == 1);
    BipartiteGraph::from_edges(nu, nv, edges).unwrap()
}

pub fn random_graph<R: Rng>(rng: &mut R, nu: usize, nv: usize, p: f64) -> BipartiteGraph {
    let edges: Vec<(usize, usize)> = (0..nu)
        .flat_map(|u| (0..nv).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    BipartiteGraph::from_edges(nu, nv, edges).unwrap()
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Every selection with both sides nonempty.
pub fn all_selections(g: &BipartiteGraph) -> impl Iterator<Item = Selection> + '_ {
    let (nu, nv) = (g.u_count(), g.v_count());
    (1..1u64 << nu).flat_map(move |a| {
        (1..1u64 << nv).map(move |b| g.induced_stats(&members(a, nu), &members(b, nv)).unwrap())
    })
}

pub fn value(objective: Objective, s: &Selection) -> Rational {
    objective.value(s.edges(), s.u_len(), s.v_len())
}

pub fn balanced(theta: Rational, nu: usize, nv: usize) -> bool {
    let lo = (Rational::from_integer(1) - theta) * Rational::from_integer(nv as u64);
    let hi = (Rational::from_integer(1) + theta) * Rational::from_integer(nv as u64);
    let a = Rational::from_integer(nu as u64);
    lo <= a && a <= hi
}

/// Optimum and every optimal selection, by checking all subset pairs.
pub fn brute_force(
    g: &BipartiteGraph,
    gamma: Rational,
    objective: Objective,
    theta: Option<Rational>,
) -> (Option<Rational>, Vec<Selection>) {
    let mut best: Option<Rational> = None;
    let mut optima = Vec::new();
    for s in all_selections(g) {
        if s.density().unwrap() < gamma {
            continue;
        }
        if theta.is_some_and(|t| !balanced(t, s.u_len(), s.v_len())) {
            continue;
        }
        let v = value(objective, &s);
        match best {
            Some(b) if v < b => {}
            Some(b) if v == b => optima.push(s),
            _ => {
                best = Some(v);
                optima = vec![s];
            }
        }
    }
    optima.sort_by(|a, b| {
        b.u_len()
            .cmp(&a.u_len())
            .then_with(|| a.u_set().cmp(b.u_set()))
            .then_with(|| a.v_set().cmp(b.v_set()))
    });
    (best, optima)
}

pub fn r(n: u64, d: u64) -> Rational {
    Rational::new(n, d)
}
