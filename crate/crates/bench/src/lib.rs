//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use qbc_core::BipartiteGraph;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn southern_women() -> BipartiteGraph {
    BipartiteGraph::load_path(&fixture("southern_women.tsv")).expect("bundled fixture")
}

/// Deterministic pseudo-random graph (xorshift), so benches need no RNG crate.
pub fn random_graph(nu: usize, nv: usize, density_percent: u64, seed: u64) -> BipartiteGraph {
    let mut state = seed.max(1);
    let mut edges = Vec::new();
    for u in 0..nu {
        for v in 0..nv {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            if state % 100 < density_percent {
                edges.push((u, v));
            }
        }
    }
    BipartiteGraph::from_edges(nu, nv, edges).expect("indices in range")
}
