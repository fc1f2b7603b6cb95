mod common;

use common::{all_selections, balanced, from_pattern, r, random_graph, southern_women};
use qbc_core::bounds::{balanced_biclique_upper_bound, floor_bound, near_balanced_upper_bound};
use qbc_core::greedy::{greedy_best_over_tau, greedy_quasi_biclique, DegreeMode, GreedyOptions};
use qbc_core::quasidef::{is_delta_quasi_biclique, is_gamma_quasi_biclique};
use qbc_core::ratio::to_f64;
use qbc_core::{BipartiteGraph, Error, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (|U'|, |V'|, edges) of every selection with both sides nonempty.
fn shapes(g: &BipartiteGraph) -> Vec<(usize, usize, u64)> {
    all_selections(g)
        .map(|s| (s.u_len(), s.v_len(), s.edges()))
        .collect()
}

fn dense(edges: u64, nu: usize, nv: usize, gamma: Rational) -> bool {
    Rational::from_integer(edges) >= gamma * Rational::from_integer((nu * nv) as u64)
}

/// Largest total size among γ-dense selections passing `keep`.
fn best_total(table: &[(usize, usize, u64)], gamma: Rational, keep: impl Fn(usize, usize) -> bool) -> usize {
    table
        .iter()
        .filter(|&&(a, b, e)| dense(e, a, b, gamma) && keep(a, b))
        .map(|&(a, b, _)| a + b)
        .max()
        .unwrap_or(0)
}

fn small_suite() -> Vec<BipartiteGraph> {
    let mut graphs = Vec::new();
    for (nu, nv) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)] {
        for bits in 0..1u64 << (nu * nv) {
            graphs.push(from_pattern(nu, nv, bits));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let (nu, nv) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let p = rng.gen_range(0.2..0.9);
        graphs.push(random_graph(&mut rng, nu, nv, p));
    }
    graphs
}

#[test]
fn greedy_output_is_valid_and_never_beats_the_optimum() {
    let deltas = [r(0, 1), r(1, 5), r(2, 5), r(1, 2)];
    let modes = [
        GreedyOptions::default(),
        GreedyOptions {
            degree: DegreeMode::Restricted,
            both_sides: true,
        },
    ];
    let mut runs = 0;
    for g in small_suite() {
        let table = shapes(&g);
        for &delta in &deltas {
            let gamma = Rational::from_integer(1) - delta;
            let optimum = best_total(&table, gamma, |_, _| true);
            for options in modes {
                for tau in 1..=g.u_count() {
                    match greedy_quasi_biclique(&g, delta, tau, options) {
                        Ok(sol) => {
                            runs += 1;
                            assert!(is_delta_quasi_biclique(&g, &sol.selection, delta).unwrap());
                            assert!(is_gamma_quasi_biclique(&g, &sol.selection, gamma).unwrap());
                            assert!(sol.delta_valid && sol.gamma_valid);
                            assert!(sol.size <= optimum, "greedy {} > optimum {optimum}", sol.size);
                            assert_eq!(sol.trace.replay(&g).unwrap(), sol.selection);
                        }
                        Err(Error::HeuristicFailure { .. }) => {}
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }
    assert!(runs > 10_000);
}

#[test]
fn southern_women_greedy_is_valid_and_below_the_optimum() {
    let g = southern_women();
    let delta = r(2, 5);
    let sol = greedy_best_over_tau(&g, delta, 2..=18, GreedyOptions::default()).unwrap();
    assert!(is_delta_quasi_biclique(&g, &sol.selection, delta).unwrap());
    assert!(sol.size <= 22);
    let both = GreedyOptions {
        both_sides: true,
        ..GreedyOptions::default()
    };
    let sol = greedy_best_over_tau(&g, delta, 1..=18, both).unwrap();
    assert!(is_delta_quasi_biclique(&g, &sol.selection, delta).unwrap());
    assert!(sol.size <= 22);
}

/// The published greedy shape (17,5) meets γ = 0.6 but no selection of that
/// shape meets the per-vertex δ = 0.4 condition.
#[test]
fn southern_women_17_5_is_gamma_but_not_delta_feasible() {
    let g = southern_women();
    let (mut gamma_ok, mut delta_ok) = (0, 0);
    let v_all: Vec<usize> = (0..g.v_count()).collect();
    for mask in 0u32..1 << g.v_count() {
        if mask.count_ones() != 5 {
            continue;
        }
        let v: Vec<usize> = v_all.iter().copied().filter(|&j| mask >> j & 1 == 1).collect();
        for drop in 0..g.u_count() {
            let u: Vec<usize> = (0..g.u_count()).filter(|&i| i != drop).collect();
            let s = g.induced_stats(&u, &v).unwrap();
            gamma_ok += usize::from(is_gamma_quasi_biclique(&g, &s, r(3, 5)).unwrap());
            delta_ok += usize::from(is_delta_quasi_biclique(&g, &s, r(2, 5)).unwrap());
        }
    }
    assert!(gamma_ok > 0);
    assert_eq!(delta_ok, 0);
}

#[test]
fn size_bounds_hold_for_their_balance_class() {
    let gammas = [r(1, 2), r(3, 5), r(7, 10), r(4, 5), r(9, 10), r(1, 1)];
    let mut graphs = Vec::new();
    for bits in 0..1u64 << 16 {
        graphs.push(from_pattern(4, 4, bits));
    }
    graphs.extend(small_suite());
    let mut checked = 0;
    for g in graphs {
        let table = shapes(&g);
        let m = g.edge_count() as u64;
        for &gamma in &gammas {
            let gf = to_f64(gamma);
            let bal = best_total(&table, gamma, |a, b| a == b);
            assert!(bal as u64 <= floor_bound(balanced_biclique_upper_bound(m, gf).unwrap()));
            for theta in [r(0, 1), r(1, 5), r(1, 2)] {
                let near = best_total(&table, gamma, |a, b| balanced(theta, a, b));
                let bound = near_balanced_upper_bound(m, gf, to_f64(theta)).unwrap();
                assert!(near as u64 <= floor_bound(bound), "θ={theta} m={m} γ={gamma}");
            }
            checked += 1;
        }
    }
    assert!(checked > 390_000);
}

#[test]
fn near_balanced_at_zero_equals_balanced() {
    for m in 0..200u64 {
        for g in [0.1, 0.5, 0.6, 0.75, 1.0] {
            let a = near_balanced_upper_bound(m, g, 0.0).unwrap();
            let b = balanced_biclique_upper_bound(m, g).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
