use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::bigraph::{BipartiteGraph, Selection, Side};
use crate::bounds::{floor_bound, near_balanced_upper_bound};
use crate::error::{Error, Result};
use crate::ratio::{ceil_mul, meets, to_f64, Rational};

use super::{
    finish_pool, for_each_heavy_subset, uncertified_pool, Objective, PoolCollector, Problem, SearchParams,
    SolutionPool,
};

/// Exact search by include/exclude branching on single vertices of the
/// smaller side; once that side is decided the other is completed exactly.
///
/// A first pass finds the optimum value; a second pass collects every
/// selection attaining it. With a time limit the search may stop early and
/// return its incumbent with `certified = false` and a valid upper bound.
pub fn branch_and_bound(g: &BipartiteGraph, params: &SearchParams) -> Result<SolutionPool> {
    if params.threads == 0 {
        return Err(Error::arg("threads must be at least 1"));
    }
    let Some(p) = Problem::new(g, params)? else {
        return Ok(SolutionPool::infeasible(params.objective));
    };
    let first = Search::new(&p, Pass::Improve, peel(&p));
    first.run(params.threads)?;
    let nodes = first.nodes.load(Ordering::Relaxed);
    let incumbent = first.incumbent.into_inner().unwrap();
    if first.aborted.load(Ordering::Relaxed) {
        let residual = first.residual.into_inner().unwrap();
        let bound = match (&incumbent, residual) {
            (Some((v, _)), Some(r)) => to_f64(r.max(*v)),
            (Some((v, _)), None) => to_f64(*v),
            (None, Some(r)) => to_f64(r),
            (None, None) => 0.0,
        };
        return Ok(uncertified_pool(&p, incumbent, bound, nodes));
    }
    let Some((opt, _)) = incumbent else {
        let mut pool = SolutionPool::infeasible(p.objective);
        pool.stats.nodes = nodes;
        return Ok(pool);
    };
    let second = Search::new(&p, Pass::Collect(opt), None);
    let collector = second.run(params.threads)?;
    let complete = !second.aborted.load(Ordering::Relaxed);
    let nodes = nodes + second.nodes.load(Ordering::Relaxed);
    Ok(finish_pool(&p, opt, collector, complete, nodes))
}

#[derive(Debug, Clone, Copy)]
enum Pass {
    /// Find the optimum value, pruning anything not strictly better.
    Improve,
    /// Collect every selection with the given value.
    Collect(Rational),
}

#[derive(Debug, Clone)]
struct Node {
    u_in: FixedBitSet,
    u_cand: FixedBitSet,
    v_in: FixedBitSet,
    v_cand: FixedBitSet,
}

impl Node {
    fn root(g: &BipartiteGraph) -> Self {
        let mut u_cand = FixedBitSet::with_capacity(g.u_count());
        u_cand.insert_range(..);
        let mut v_cand = FixedBitSet::with_capacity(g.v_count());
        v_cand.insert_range(..);
        Self {
            u_in: FixedBitSet::with_capacity(g.u_count()),
            u_cand,
            v_in: FixedBitSet::with_capacity(g.v_count()),
            v_cand,
        }
    }

    fn children(&self, side: Side, x: usize) -> (Node, Node) {
        let mut include = self.clone();
        let mut exclude = self.clone();
        match side {
            Side::U => {
                include.u_cand.set(x, false);
                include.u_in.insert(x);
                exclude.u_cand.set(x, false);
            }
            Side::V => {
                include.v_cand.set(x, false);
                include.v_in.insert(x);
                exclude.v_cand.set(x, false);
            }
        }
        (include, exclude)
    }
}

/// Degrees sorted in descending order with prefix sums.
struct Degrees {
    sorted: Vec<u64>,
    prefix: Vec<u64>,
}

impl Degrees {
    fn new(mut sorted: Vec<u64>) -> Self {
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        prefix.push(0);
        for d in &sorted {
            prefix.push(prefix.last().unwrap() + d);
        }
        Self { sorted, prefix }
    }

    fn len(&self) -> usize {
        self.sorted.len()
    }

    /// Sum of `min(cap, d)` over the `t` largest degrees.
    fn capped_top(&self, t: usize, cap: u64) -> u64 {
        let c = self.sorted.partition_point(|&d| d >= cap);
        if t <= c {
            cap * t as u64
        } else {
            cap * c as u64 + self.prefix[t] - self.prefix[c]
        }
    }
}

enum Eval {
    Pruned,
    Leaf(Rational),
    Branch(Rational, Side, usize),
}

struct Search<'a, 'g> {
    p: &'a Problem<'g>,
    pass: Pass,
    branch_side: Side,
    incumbent: Mutex<Option<(Rational, Selection)>>,
    aborted: AtomicBool,
    residual: Mutex<Option<Rational>>,
    nodes: AtomicU64,
}

impl<'a, 'g> Search<'a, 'g> {
    fn new(p: &'a Problem<'g>, pass: Pass, seed: Option<(Rational, Selection)>) -> Self {
        let branch_side = if p.g.u_count() <= p.g.v_count() {
            Side::U
        } else {
            Side::V
        };
        Self {
            p,
            pass,
            branch_side,
            incumbent: Mutex::new(seed),
            aborted: AtomicBool::new(false),
            residual: Mutex::new(None),
            nodes: AtomicU64::new(0),
        }
    }

    fn run(&self, threads: usize) -> Result<PoolCollector> {
        let mut collector = PoolCollector::new(self.p.pool_limit);
        let root = Node::root(self.p.g);
        if threads == 1 {
            self.dfs(root, &mut collector);
            return Ok(collector);
        }
        // Expand breadth-first into enough subtrees to keep the workers busy.
        let mut frontier = std::collections::VecDeque::from([root]);
        while frontier.len() < 8 * threads {
            let Some(node) = frontier.pop_front() else {
                break;
            };
            self.nodes.fetch_add(1, Ordering::Relaxed);
            match self.evaluate(&node) {
                Eval::Pruned => {}
                Eval::Leaf(_) => self.leaf(&node, &mut collector),
                Eval::Branch(_, side, x) => {
                    let (a, b) = node.children(side, x);
                    frontier.push_back(a);
                    frontier.push_back(b);
                }
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::arg(format!("cannot start worker threads: {e}")))?;
        let parts: Vec<PoolCollector> = pool.install(|| {
            frontier
                .into_par_iter()
                .map(|node| {
                    let mut c = PoolCollector::new(self.p.pool_limit);
                    self.dfs(node, &mut c);
                    c
                })
                .collect()
        });
        for part in parts {
            collector.merge(part);
        }
        Ok(collector)
    }

    fn prunes(&self, bound: Rational) -> bool {
        match self.pass {
            Pass::Improve => self
                .incumbent
                .lock()
                .unwrap()
                .as_ref()
                .is_some_and(|(v, _)| bound <= *v),
            Pass::Collect(opt) => bound < opt,
        }
    }

    fn raise_residual(&self, bound: Rational) {
        let mut r = self.residual.lock().unwrap();
        if r.is_none_or(|cur| bound > cur) {
            *r = Some(bound);
        }
    }

    fn dfs(&self, node: Node, collector: &mut PoolCollector) {
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let eval = self.evaluate(&node);
        let bound = match eval {
            Eval::Pruned => return,
            Eval::Leaf(b) | Eval::Branch(b, _, _) => b,
        };
        if self.p.timed_out() {
            self.aborted.store(true, Ordering::Relaxed);
            self.raise_residual(bound);
            return;
        }
        match eval {
            Eval::Leaf(_) => self.leaf(&node, collector),
            Eval::Branch(_, side, x) => {
                let (include, exclude) = node.children(side, x);
                drop(node);
                self.dfs(include, collector);
                if self.aborted.load(Ordering::Relaxed) {
                    self.raise_residual(bound);
                    return;
                }
                self.dfs(exclude, collector);
                if self.aborted.load(Ordering::Relaxed) {
                    self.raise_residual(bound);
                }
            }
            Eval::Pruned => unreachable!(),
        }
    }

    /// Upper bound on the objective over all completions of `node`, and the
    /// vertex to branch on.
    fn evaluate(&self, node: &Node) -> Eval {
        let p = self.p;
        let g = p.g;
        let mut u_all = node.u_in.clone();
        u_all.union_with(&node.u_cand);
        let mut v_all = node.v_in.clone();
        v_all.union_with(&node.v_cand);
        let bnd = &p.bounds;
        let (u_fixed, v_fixed) = (node.u_in.count_ones(..), node.v_in.count_ones(..));
        let (a_lo, a_hi) = (u_fixed.max(bnd.u_min), u_all.count_ones(..).min(bnd.u_max));
        let (b_lo, b_hi) = (v_fixed.max(bnd.v_min), v_all.count_ones(..).min(bnd.v_max));
        if a_lo > a_hi || b_lo > b_hi {
            return Eval::Pruned;
        }

        let mut branch: Option<(u64, Side, usize)> = None;
        let branch_side = self.branch_side;
        let mut pick = |d: u64, side: Side, x: usize| {
            if side == branch_side && branch.is_none_or(|(bd, _, _)| d > bd) {
                branch = Some((d, side, x));
            }
        };
        let mut m_sub = 0u64;
        let (mut du_in, mut du_cand) = (Vec::new(), Vec::new());
        for x in u_all.ones() {
            let d = g.row(x).intersection_count(&v_all) as u64;
            m_sub += d;
            if node.u_in.contains(x) {
                du_in.push(d);
            } else {
                du_cand.push(d);
                pick(d, Side::U, x);
            }
        }
        let (mut dv_in, mut dv_cand) = (Vec::new(), Vec::new());
        for y in v_all.ones() {
            let d = g.col(y).intersection_count(&u_all) as u64;
            if node.v_in.contains(y) {
                dv_in.push(d);
            } else {
                dv_cand.push(d);
                pick(d, Side::V, y);
            }
        }
        let (du_in, du_cand) = (Degrees::new(du_in), Degrees::new(du_cand));
        let (dv_in, dv_cand) = (Degrees::new(dv_in), Degrees::new(dv_cand));

        let size_cap = p.theta.map(|t| {
            let x =
                near_balanced_upper_bound(m_sub, to_f64(p.gamma), to_f64(t)).expect("validated parameters");
            floor_bound(x) as usize
        });

        let mut best: Option<Rational> = None;
        for a in a_lo..=a_hi {
            for b in b_lo..=b_hi {
                if !p.shape_ok(a, b) || size_cap.is_some_and(|c| a + b > c) {
                    continue;
                }
                if p.objective == Objective::Size
                    && best.is_some_and(|v| Rational::from_integer((a + b) as u64) <= v)
                {
                    continue;
                }
                let eu = du_in.capped_top(du_in.len(), b as u64) + du_cand.capped_top(a - u_fixed, b as u64);
                let ev = dv_in.capped_top(dv_in.len(), a as u64) + dv_cand.capped_top(b - v_fixed, a as u64);
                let cells = (a * b) as u64;
                let ub = eu.min(ev).min(cells).min(p.edges.k_max);
                if ub < p.edges.k_min || !meets(ub, p.gamma, cells) {
                    continue;
                }
                let v = p.value(ub, a, b);
                if best.is_none_or(|bv| v > bv) {
                    best = Some(v);
                }
            }
        }
        let Some(bound) = best else {
            return Eval::Pruned;
        };
        if self.prunes(bound) {
            return Eval::Pruned;
        }
        if node.u_cand.is_clear() || node.v_cand.is_clear() {
            return Eval::Leaf(bound);
        }
        let (_, side, x) = branch.expect("candidates remain");
        Eval::Branch(bound, side, x)
    }

    /// One side is fully decided: complete the other side exactly.
    fn leaf(&self, node: &Node, collector: &mut PoolCollector) {
        let p = self.p;
        let g = p.g;
        let (fixed_side, fixed, free_in, free_cand) = if node.u_cand.is_clear() {
            (Side::U, &node.u_in, &node.v_in, &node.v_cand)
        } else {
            (Side::V, &node.v_in, &node.u_in, &node.u_cand)
        };
        let free_side = fixed_side.other();
        let a = fixed.count_ones(..);
        let forced: u64 = free_in
            .ones()
            .map(|y| g.neighbors(free_side, y).intersection_count(fixed) as u64)
            .sum();
        let mut cands: Vec<(usize, u64)> = free_cand
            .ones()
            .map(|y| (y, g.neighbors(free_side, y).intersection_count(fixed) as u64))
            .collect();
        cands.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        let mut prefix = vec![0u64; cands.len() + 1];
        for (i, c) in cands.iter().enumerate() {
            prefix[i + 1] = prefix[i] + c.1;
        }
        let n_in = free_in.count_ones(..);
        let (lo, hi) = match free_side {
            Side::U => (p.bounds.u_min, p.bounds.u_max),
            Side::V => (p.bounds.v_min, p.bounds.v_max),
        };
        let sizes = |b: usize| match fixed_side {
            Side::U => (a, b),
            Side::V => (b, a),
        };
        let fixed_set: Vec<usize> = fixed.ones().collect();
        let in_set: Vec<usize> = free_in.ones().collect();
        let build = |chosen: &[usize], edges: u64| {
            let mut free: Vec<usize> = in_set.iter().chain(chosen).copied().collect();
            free.sort_unstable();
            match fixed_side {
                Side::U => Selection::from_parts(fixed_set.clone(), free, edges),
                Side::V => Selection::from_parts(free, fixed_set.clone(), edges),
            }
        };
        for b in n_in.max(lo)..=(n_in + cands.len()).min(hi) {
            let t = b - n_in;
            let (nu, nv) = sizes(b);
            let top = forced + prefix[t];
            if !p.feasible(top, nu, nv) {
                continue;
            }
            let value = p.value(top, nu, nv);
            match self.pass {
                Pass::Improve => {
                    let mut inc = self.incumbent.lock().unwrap();
                    if inc.as_ref().is_none_or(|(v, _)| value > *v) {
                        let chosen: Vec<usize> = cands[..t].iter().map(|c| c.0).collect();
                        *inc = Some((value, build(&chosen, top)));
                    }
                }
                Pass::Collect(opt) => {
                    if value != opt {
                        continue;
                    }
                    let need = match p.objective {
                        Objective::Size => p
                            .edges
                            .k_min
                            .max(ceil_mul(p.gamma, (nu * nv) as u64))
                            .saturating_sub(forced),
                        Objective::Quality => prefix[t],
                    };
                    for_each_heavy_subset(&cands, t, need, &mut |chosen, e| {
                        collector.offer(build(chosen, forced + e));
                        true
                    });
                }
            }
        }
    }
}

/// Seeds the incumbent by repeatedly deleting the vertex with the smallest
/// share of the opposite side, keeping the best feasible state seen.
fn peel(p: &Problem<'_>) -> Option<(Rational, Selection)> {
    let g = p.g;
    let mut u_alive = FixedBitSet::with_capacity(g.u_count());
    u_alive.insert_range(..);
    let mut v_alive = FixedBitSet::with_capacity(g.v_count());
    v_alive.insert_range(..);
    let mut du: Vec<u64> = (0..g.u_count()).map(|u| g.row(u).count_ones(..) as u64).collect();
    let mut dv: Vec<u64> = (0..g.v_count()).map(|v| g.col(v).count_ones(..) as u64).collect();
    let (mut nu, mut nv) = (g.u_count(), g.v_count());
    let mut edges = g.edge_count() as u64;
    let mut best: Option<(Rational, Selection)> = None;
    let b = &p.bounds;
    while nu > 0 && nv > 0 {
        if p.feasible(edges, nu, nv) {
            let value = p.value(edges, nu, nv);
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                let sel = Selection::from_parts(u_alive.ones().collect(), v_alive.ones().collect(), edges);
                best = Some((value, sel));
            }
        }
        let from_u = nu > b.u_min || nu > b.u_max;
        let from_v = nv > b.v_min || nv > b.v_max;
        let (from_u, from_v) = match (nu > b.u_max, nv > b.v_max) {
            (true, false) => (true, false),
            (false, true) => (false, true),
            _ => (from_u, from_v),
        };
        // Smallest d / |other side|, compared by cross-multiplication.
        let mut victim: Option<(Side, usize, u64, u64)> = None;
        let mut consider = |side: Side, x: usize, d: u64, other: u64| {
            let better = victim
                .is_none_or(|(_, _, bd, bo)| (d as u128) * (bo as u128) < (bd as u128) * (other as u128));
            if better {
                victim = Some((side, x, d, other));
            }
        };
        if from_u {
            for x in u_alive.ones() {
                consider(Side::U, x, du[x], nv as u64);
            }
        }
        if from_v {
            for y in v_alive.ones() {
                consider(Side::V, y, dv[y], nu as u64);
            }
        }
        let Some((side, x, d, _)) = victim else {
            break;
        };
        edges -= d;
        match side {
            Side::U => {
                u_alive.set(x, false);
                nu -= 1;
                for y in g.row(x).intersection(&v_alive) {
                    dv[y] -= 1;
                }
            }
            Side::V => {
                v_alive.set(x, false);
                nv -= 1;
                for u in g.col(x).intersection(&u_alive) {
                    du[u] -= 1;
                }
            }
        }
    }
    best
}
