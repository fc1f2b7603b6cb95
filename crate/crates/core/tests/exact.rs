mod common;

use std::time::Duration;

use common::{brute_force, from_pattern, r, random_graph, southern_women, value};
use qbc_core::exact::{branch_and_bound, enumerate_balanced, sweep_oracle};
use qbc_core::quasidef::is_gamma_quasi_biclique;
use qbc_core::{BipartiteGraph, Error, Objective, Rational, SearchParams, SizeBounds};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const GAMMAS: [(u64, u64); 5] = [(1, 2), (3, 5), (3, 4), (4, 5), (1, 1)];

fn toy() -> BipartiteGraph {
    from_pattern(3, 3, 0b011_111_111)
}

fn params(gamma: Rational, objective: Objective) -> SearchParams {
    SearchParams::new(gamma).objective(objective)
}

fn shapes(pool: &qbc_core::SolutionPool) -> Vec<(usize, usize)> {
    pool.solutions
        .iter()
        .map(|s| (s.selection.u_len(), s.selection.v_len()))
        .collect()
}

#[test]
fn complete_k23_size() {
    let g = BipartiteGraph::complete(2, 3);
    for pool in [
        sweep_oracle(&g, &params(r(1, 1), Objective::Size)).unwrap(),
        branch_and_bound(&g, &params(r(1, 1), Objective::Size)).unwrap(),
    ] {
        assert!(pool.certified);
        assert_eq!(pool.optimum(), Some(r(5, 1)));
        assert_eq!(shapes(&pool), vec![(2, 3)]);
    }
}

#[test]
fn toy_fixture_size() {
    let g = toy();
    let p9 = params(r(9, 10), Objective::Size);
    let p8 = params(r(4, 5), Objective::Size);
    for pool in [sweep_oracle(&g, &p9).unwrap(), branch_and_bound(&g, &p9).unwrap()] {
        assert_eq!(pool.optimum(), Some(r(5, 1)));
        assert!(pool.solutions.iter().all(|s| s.selection.edges() == 6));
        assert_eq!(shapes(&pool), vec![(3, 2), (2, 3)]);
    }
    for pool in [sweep_oracle(&g, &p8).unwrap(), branch_and_bound(&g, &p8).unwrap()] {
        assert_eq!(pool.optimum(), Some(r(6, 1)));
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.best().unwrap().selection.density().unwrap(), r(8, 9));
    }
}

#[test]
fn toy_fixture_quality() {
    // 8^2/9 beats 6^2/6 = 6.
    let g = toy();
    let pool = branch_and_bound(&g, &params(r(4, 5), Objective::Quality)).unwrap();
    assert_eq!(pool.optimum(), Some(r(64, 9)));
    let pool = branch_and_bound(&g, &params(r(9, 10), Objective::Quality)).unwrap();
    assert_eq!(pool.optimum(), Some(r(6, 1)));
}

#[test]
fn balanced_examples() {
    let g = BipartiteGraph::complete(2, 3);
    let pool = enumerate_balanced(&g, &params(r(1, 1), Objective::Size).theta(r(0, 1))).unwrap();
    assert_eq!(pool.optimum(), Some(r(4, 1)));
    assert!(shapes(&pool).iter().all(|&s| s == (2, 2)));
    assert_eq!(pool.len(), 3);
    let pool = enumerate_balanced(&g, &params(r(1, 1), Objective::Size).theta(r(1, 2))).unwrap();
    assert_eq!(pool.optimum(), Some(r(5, 1)));
    assert_eq!(shapes(&pool), vec![(2, 3)]);
    assert!(enumerate_balanced(&g, &params(r(1, 1), Objective::Size)).is_err());
}

#[test]
fn balanced_square_always_feasible() {
    // Any single edge is a 1x1 biclique, so θ = 0 always has a solution.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (nu, nv) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let g = random_graph(&mut rng, nu, nv, 0.4);
        let pool = enumerate_balanced(&g, &params(r(1, 1), Objective::Size).theta(r(0, 1))).unwrap();
        assert_eq!(pool.is_empty(), g.edge_count() == 0);
        for s in &pool.solutions {
            assert_eq!(s.selection.u_len(), s.selection.v_len());
        }
    }
}

#[test]
fn empty_graph_is_infeasible() {
    for g in [BipartiteGraph::empty(3, 4), BipartiteGraph::empty(0, 4)] {
        for objective in [Objective::Size, Objective::Quality] {
            let p = params(r(1, 2), objective);
            for pool in [sweep_oracle(&g, &p).unwrap(), branch_and_bound(&g, &p).unwrap()] {
                assert!(pool.is_infeasible());
            }
        }
    }
}

#[test]
fn invalid_parameters() {
    let g = toy();
    assert!(matches!(
        branch_and_bound(&g, &params(r(0, 1), Objective::Size)),
        Err(Error::Argument(_))
    ));
    assert!(branch_and_bound(&g, &params(r(1, 1), Objective::Size).pool_limit(0)).is_err());
    assert!(branch_and_bound(&g, &params(r(1, 1), Objective::Size).theta(r(1, 1))).is_err());
    let too_big = SizeBounds::new(1, 4, 1, 3);
    assert!(branch_and_bound(&g, &params(r(1, 1), Objective::Size).size_bounds(too_big)).is_err());
}

#[test]
fn oracle_refuses_large_sides() {
    let g = BipartiteGraph::complete(21, 22);
    assert!(matches!(
        sweep_oracle(&g, &params(r(1, 1), Objective::Size)),
        Err(Error::Refused(_))
    ));
}

/// Both exact routes against exhaustive enumeration on every graph up to
/// 3x3 and on every 2x4 and 4x2 graph.
#[test]
fn exhaustive_small_graphs_match_brute_force() {
    let mut shapes = vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)];
    shapes.extend([(2, 4), (4, 2)]);
    for (nu, nv) in shapes {
        for bits in 0..1u64 << (nu * nv) {
            let g = from_pattern(nu, nv, bits);
            for &(n, d) in &GAMMAS {
                for objective in [Objective::Size, Objective::Quality] {
                    let p = params(r(n, d), objective);
                    let (want, optima) = brute_force(&g, r(n, d), objective, None);
                    let bb = branch_and_bound(&g, &p).unwrap();
                    let oracle = sweep_oracle(&g, &p).unwrap();
                    assert_eq!(bb.optimum(), want, "{nu}x{nv} {bits:b} γ={n}/{d} {objective}");
                    assert_eq!(oracle.optimum(), want);
                    let bb_sel: Vec<_> = bb.solutions.iter().map(|s| s.selection.clone()).collect();
                    let or_sel: Vec<_> = oracle.solutions.iter().map(|s| s.selection.clone()).collect();
                    assert_eq!(bb_sel, optima);
                    assert_eq!(or_sel, optima);
                }
            }
        }
    }
}

#[test]
fn every_4x4_graph_bb_matches_oracle() {
    (0..1u64 << 16).into_par_iter().for_each(|bits| {
        let g = from_pattern(4, 4, bits);
        for &(n, d) in &GAMMAS {
            for objective in [Objective::Size, Objective::Quality] {
                let p = params(r(n, d), objective);
                let bb = branch_and_bound(&g, &p).unwrap();
                let oracle = sweep_oracle(&g, &p).unwrap();
                assert_eq!(bb.optimum(), oracle.optimum(), "{bits:b} γ={n}/{d} {objective}");
                assert_eq!(bb.len(), oracle.len());
            }
        }
    });
}

#[test]
fn random_6x6_pools_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let p = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, 6, 6, p);
        let (n, d) = GAMMAS[rng.gen_range(0..GAMMAS.len())];
        for objective in [Objective::Size, Objective::Quality] {
            let (want, optima) = brute_force(&g, r(n, d), objective, None);
            let bb = branch_and_bound(&g, &params(r(n, d), objective)).unwrap();
            assert_eq!(bb.optimum(), want);
            let got: Vec<_> = bb.solutions.iter().map(|s| s.selection.clone()).collect();
            assert_eq!(got, optima);
            assert!(!bb.truncated);
        }
    }
}

#[test]
fn balanced_pools_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..150 {
        let (nu, nv) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let p = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, nu, nv, p);
        let (n, d) = GAMMAS[rng.gen_range(0..GAMMAS.len())];
        let gamma = r(n, d);
        let theta = [r(0, 1), r(1, 4), r(1, 2), r(2, 3)][rng.gen_range(0..4)];
        for objective in [Objective::Size, Objective::Quality] {
            let (want, optima) = brute_force(&g, gamma, objective, Some(theta));
            let p = params(gamma, objective).theta(theta);
            for pool in [branch_and_bound(&g, &p).unwrap(), sweep_oracle(&g, &p).unwrap()] {
                assert_eq!(pool.optimum(), want);
                let got: Vec<_> = pool.solutions.iter().map(|s| s.selection.clone()).collect();
                assert_eq!(got, optima);
            }
        }
    }
}

#[test]
fn size_bounds_are_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..150 {
        let (nu, nv) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let p = rng.gen_range(0.3..0.9);
        let g = random_graph(&mut rng, nu, nv, p);
        let u_min = rng.gen_range(1..=nu);
        let v_min = rng.gen_range(1..=nv);
        let b = SizeBounds::new(u_min, rng.gen_range(u_min..=nu), v_min, rng.gen_range(v_min..=nv));
        let gamma = r(3, 5);
        for objective in [Objective::Size, Objective::Quality] {
            let all: Vec<_> = common::all_selections(&g)
                .filter(|s| b.contains(s.u_len(), s.v_len()) && s.density().unwrap() >= gamma)
                .collect();
            let best = all.iter().map(|s| value(objective, s)).max();
            let p = params(gamma, objective).size_bounds(b);
            for pool in [branch_and_bound(&g, &p).unwrap(), sweep_oracle(&g, &p).unwrap()] {
                assert_eq!(pool.optimum(), best);
                assert_eq!(
                    pool.len(),
                    all.iter().filter(|s| Some(value(objective, s)) == best).count()
                );
                for s in &pool.solutions {
                    assert!(b.contains(s.selection.u_len(), s.selection.v_len()));
                }
            }
        }
    }
}

#[test]
fn pool_limit_keeps_canonical_prefix() {
    let g = BipartiteGraph::complete(3, 3);
    let full = branch_and_bound(&g, &params(r(1, 1), Objective::Size).theta(r(0, 1))).unwrap();
    // Without the balance constraint the optimum is the whole graph; with
    // θ = 0 and sizes capped at 2 there are 9 square 2x2 optima.
    let capped = SizeBounds::new(1, 2, 1, 2);
    let p = params(r(1, 1), Objective::Size).size_bounds(capped);
    let all = branch_and_bound(&g, &p).unwrap();
    assert_eq!(all.len(), 9);
    assert!(!all.truncated);
    let some = branch_and_bound(&g, &p.clone().pool_limit(4)).unwrap();
    assert!(some.truncated);
    assert_eq!(some.solutions[..], all.solutions[..4]);
    let oracle = sweep_oracle(&g, &p.pool_limit(4)).unwrap();
    assert_eq!(oracle.solutions, some.solutions);
    assert_eq!(full.len(), 1);
}

#[test]
fn optimum_is_monotone_in_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gammas = [r(1, 5), r(1, 2), r(3, 5), r(2, 3), r(4, 5), r(9, 10), r(1, 1)];
    for _ in 0..60 {
        let p = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, 7, 6, p);
        for objective in [Objective::Size, Objective::Quality] {
            let values: Vec<Option<Rational>> = gammas
                .iter()
                .map(|&gm| branch_and_bound(&g, &params(gm, objective)).unwrap().optimum())
                .collect();
            for w in values.windows(2) {
                assert!(w[1] <= w[0], "{values:?}");
            }
        }
    }
}

#[test]
fn whole_graph_is_optimal_iff_dense_enough() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..120 {
        let (nu, nv) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let p = rng.gen_range(0.3..1.0);
        let g = random_graph(&mut rng, nu, nv, p);
        if g.edge_count() == 0 {
            continue;
        }
        let density = g.density().unwrap();
        for gamma in [density, r(1, 2), r(4, 5)] {
            let pool = branch_and_bound(&g, &params(gamma, Objective::Size)).unwrap();
            let full = pool.optimum() == Some(Rational::from_integer((nu + nv) as u64));
            assert_eq!(full, density >= gamma);
        }
    }
}

/// Dropping one vertex from an optimum can push density below γ; check on
/// the instances that a smaller quasi-biclique one size down still exists.
#[test]
fn one_smaller_quasi_biclique_exists() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..80 {
        let (nu, nv) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
        let p = rng.gen_range(0.3..0.9);
        let g = random_graph(&mut rng, nu, nv, p);
        let (n, d) = GAMMAS[rng.gen_range(0..GAMMAS.len())];
        let gamma = r(n, d);
        let pool = sweep_oracle(&g, &params(gamma, Objective::Size)).unwrap();
        for s in &pool.solutions {
            let size = s.selection.size();
            if size <= 2 {
                continue;
            }
            let witness = common::all_selections(&g)
                .any(|t| t.size() == size - 1 && is_gamma_quasi_biclique(&g, &t, gamma).unwrap());
            assert!(witness);
        }
    }
}

#[test]
fn threads_do_not_change_the_pool() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 9, 10, 0.6);
        for objective in [Objective::Size, Objective::Quality] {
            let p = params(r(7, 10), objective);
            let one = branch_and_bound(&g, &p).unwrap();
            let four = branch_and_bound(&g, &p.clone().threads(4)).unwrap();
            assert_eq!(one.solutions, four.solutions);
            assert_eq!(one.truncated, four.truncated);
        }
    }
}

#[test]
fn time_limit_returns_uncertified_incumbent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = random_graph(&mut rng, 60, 60, 0.5);
    let p = params(r(3, 5), Objective::Size).time_limit(Duration::from_millis(0));
    let pool = branch_and_bound(&g, &p).unwrap();
    assert!(!pool.certified);
    assert!(pool.truncated);
    for s in &pool.solutions {
        assert!(!s.certified_optimal);
        assert!(s.bound_at_termination >= s.value_f64());
        assert!(is_gamma_quasi_biclique(&g, &s.selection, r(3, 5)).unwrap());
    }
    assert!(pool.bound >= 1.0);
}

#[test]
fn southern_women_gamma_06() {
    let g = southern_women();
    assert_eq!((g.u_count(), g.v_count(), g.edge_count()), (18, 14, 89));
    let p = params(r(3, 5), Objective::Size);
    let bb = branch_and_bound(&g, &p).unwrap();
    let oracle = sweep_oracle(&g, &p).unwrap();
    assert!(bb.certified && oracle.certified);
    assert_eq!(bb.optimum(), oracle.optimum());
    assert_eq!(bb.solutions, oracle.solutions);
    assert!(bb.optimum().unwrap() >= r(22, 1));

    // Some (18, 4) selection is itself a 0.6-quasi-biclique.
    let all_u: Vec<usize> = (0..18).collect();
    let mut found = false;
    for mask in 0u32..1 << 14 {
        if mask.count_ones() != 4 {
            continue;
        }
        let v: Vec<usize> = (0..14).filter(|j| mask >> j & 1 == 1).collect();
        let s = g.induced_stats(&all_u, &v).unwrap();
        found |= is_gamma_quasi_biclique(&g, &s, r(3, 5)).unwrap();
    }
    assert!(found);
}
