use crate::bigraph::{BipartiteGraph, Selection, Side};
use crate::error::{Error, Result};
use crate::ratio::{ceil_mul, Rational};

use super::{
    finish_pool, for_each_heavy_subset, uncertified_pool, Objective, PoolCollector, Problem, SearchParams,
    SolutionPool,
};

/// Default largest smaller-side size accepted by [`sweep_oracle`].
pub const DEFAULT_ORACLE_CAP: usize = 20;

/// Exhaustive search over subsets of the smaller side.
///
/// Refuses graphs whose smaller side exceeds `params.oracle_cap` (capped at
/// 63). Runs in `O(2^s (n + s))` for the first pass; the second pass
/// enumerates every optimal completion.
pub fn sweep_oracle(g: &BipartiteGraph, params: &SearchParams) -> Result<SolutionPool> {
    let Some(p) = Problem::new(g, params)? else {
        return Ok(SolutionPool::infeasible(params.objective));
    };
    let enum_side = if g.u_count() <= g.v_count() {
        Side::U
    } else {
        Side::V
    };
    let comp_side = enum_side.other();
    let ne = g.side_count(enum_side);
    let nc = g.side_count(comp_side);
    let cap = params.oracle_cap.min(63);
    if ne > cap {
        return Err(Error::Refused(format!(
            "sweep oracle enumerates the smaller side; {ne} vertices exceed the cap of {cap}"
        )));
    }
    let masks: Vec<u64> = (0..nc)
        .map(|x| g.neighbors(comp_side, x).ones().fold(0u64, |m, i| m | (1 << i)))
        .collect();
    let b = &p.bounds;
    let (e_lo, e_hi, c_lo, c_hi) = match enum_side {
        Side::U => (b.u_min, b.u_max, b.v_min, b.v_max),
        Side::V => (b.v_min, b.v_max, b.u_min, b.u_max),
    };
    let sizes = |s: usize, k: usize| match enum_side {
        Side::U => (s, k),
        Side::V => (k, s),
    };

    let mut degs = vec![0u64; nc];
    let mut prefix = vec![0u64; nc + 1];
    let mut buckets = vec![0usize; ne + 1];
    // Fills `degs` with d(x, S) and `prefix` with the descending prefix sums.
    let mut sweep = |mask: u64, s: usize, degs: &mut Vec<u64>, prefix: &mut Vec<u64>| {
        buckets[..=s].iter_mut().for_each(|c| *c = 0);
        for (x, m) in masks.iter().enumerate() {
            let d = (m & mask).count_ones() as usize;
            degs[x] = d as u64;
            buckets[d] += 1;
        }
        let mut k = 0;
        for d in (0..=s).rev() {
            for _ in 0..buckets[d] {
                prefix[k + 1] = prefix[k] + d as u64;
                k += 1;
            }
        }
    };

    let full = 1u64 << ne;
    let mut best: Option<(Rational, u64, usize)> = None;
    let mut visited = 0u64;
    for mask in 1..full {
        let s = mask.count_ones() as usize;
        if s < e_lo || s > e_hi {
            continue;
        }
        if p.objective == Objective::Size {
            if let Some((v, _, _)) = best {
                if Rational::from_integer((s + c_hi) as u64) <= v {
                    continue;
                }
            }
        }
        visited += 1;
        if visited % 1024 == 0 && p.timed_out() {
            let inc = best.map(|(v, m, k)| (v, top_selection(g, &masks, enum_side, m, k)));
            let bound = match p.objective {
                Objective::Size => (b.u_max + b.v_max) as f64,
                Objective::Quality => p.edges.k_max as f64,
            };
            return Ok(uncertified_pool(&p, inc, bound, visited));
        }
        sweep(mask, s, &mut degs, &mut prefix);
        for k in c_lo..=c_hi {
            let (nu, nv) = sizes(s, k);
            let e = prefix[k];
            if p.feasible(e, nu, nv) {
                let v = p.value(e, nu, nv);
                if best.is_none_or(|(bv, _, _)| v > bv) {
                    best = Some((v, mask, k));
                }
            }
        }
    }
    let Some((opt, _, _)) = best else {
        let mut pool = SolutionPool::infeasible(p.objective);
        pool.stats.nodes = visited;
        return Ok(pool);
    };

    let mut collector = PoolCollector::new(p.pool_limit);
    let mut cands: Vec<(usize, u64)> = Vec::with_capacity(nc);
    for mask in 1..full {
        let s = mask.count_ones() as usize;
        if s < e_lo || s > e_hi {
            continue;
        }
        sweep(mask, s, &mut degs, &mut prefix);
        let enum_set: Vec<usize> = (0..ne).filter(|i| mask >> i & 1 == 1).collect();
        cands.clear();
        cands.extend(degs.iter().enumerate().map(|(x, &d)| (x, d)));
        cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for k in c_lo..=c_hi {
            let (nu, nv) = sizes(s, k);
            let top = prefix[k];
            if !p.feasible(top, nu, nv) || p.value(top, nu, nv) < opt {
                continue;
            }
            let min_sum = match p.objective {
                Objective::Size => {
                    if p.value(top, nu, nv) != opt {
                        continue;
                    }
                    p.edges.k_min.max(ceil_mul(p.gamma, (nu * nv) as u64))
                }
                Objective::Quality => top,
            };
            for_each_heavy_subset(&cands, k, min_sum, &mut |chosen, e| {
                let mut comp: Vec<usize> = chosen.to_vec();
                comp.sort_unstable();
                let sel = match enum_side {
                    Side::U => Selection::from_parts(enum_set.clone(), comp, e),
                    Side::V => Selection::from_parts(comp, enum_set.clone(), e),
                };
                collector.offer(sel);
                true
            });
        }
    }
    Ok(finish_pool(&p, opt, collector, true, visited))
}

fn top_selection(g: &BipartiteGraph, masks: &[u64], enum_side: Side, mask: u64, k: usize) -> Selection {
    let ne = g.side_count(enum_side);
    let enum_set: Vec<usize> = (0..ne).filter(|i| mask >> i & 1 == 1).collect();
    let mut order: Vec<(usize, u64)> = masks
        .iter()
        .enumerate()
        .map(|(x, m)| (x, (m & mask).count_ones() as u64))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let e = order[..k].iter().map(|c| c.1).sum();
    let mut comp: Vec<usize> = order[..k].iter().map(|c| c.0).collect();
    comp.sort_unstable();
    match enum_side {
        Side::U => Selection::from_parts(enum_set, comp, e),
        Side::V => Selection::from_parts(comp, enum_set, e),
    }
}
