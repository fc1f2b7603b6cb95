//! Maximum γ-quasi-biclique search in bipartite graphs.
//!
//! A γ-quasi-biclique is a pair of vertex subsets `(U', V')` whose induced
//! subgraph has density `|E'| / (|U'| |V'|) >= γ`. This crate provides
//!
//! * [`bigraph`]: the graph type, edge-list and Pajek readers;
//! * [`quasidef`]: validators for the γ, δ and ε definitions;
//! * [`bounds`]: closed-form size bounds and edge-count ranges;
//! * [`greedy`]: the two-phase greedy heuristic;
//! * [`exact`]: an exhaustive sweep oracle and a branch-and-bound solver
//!   with solution pools, for both the size and the quality objective;
//! * [`mip`]: the two MIP formulations, LP emission, an external solver
//!   adapter and assignment verification;
//! * [`suite`]: the experiment harness behind `qbc bench`.

pub mod bigraph;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod greedy;
pub mod mip;
pub mod quasidef;
pub mod ratio;
pub mod suite;

pub use bigraph::{load_edge_list, load_pajek_two_mode, BipartiteGraph, Selection, Side};
pub use bounds::{EdgeRange, SizeBounds};
pub use error::{Error, Result};
pub use exact::{Objective, SearchParams, Solution, SolutionPool};
pub use quasidef::QuasiParams;
pub use ratio::{parse_rational, Rational};

#[cfg(test)]
pub(crate) mod fixtures {
    use rand::Rng;

    use crate::bigraph::BipartiteGraph;

    /// Complete 3x3 minus the edge (2, 2).
    pub fn toy() -> BipartiteGraph {
        let edges = (0..3)
            .flat_map(|u| (0..3).map(move |v| (u, v)))
            .filter(|&e| e != (2, 2));
        BipartiteGraph::from_edges(3, 3, edges).unwrap()
    }

    pub fn random_graph<R: Rng>(rng: &mut R, nu: usize, nv: usize, p: f64) -> BipartiteGraph {
        let mut edges = Vec::new();
        for u in 0..nu {
            for v in 0..nv {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        BipartiteGraph::from_edges(nu, nv, edges).unwrap()
    }
}
