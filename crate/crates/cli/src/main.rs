use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qbc_core::bounds::{
    balanced_biclique_upper_bound, edge_count_bounds, floor_bound, near_balanced_upper_bound,
    quasi_clique_upper_bound,
};
use qbc_core::exact::{solve, Method};
use qbc_core::greedy::{
    default_tau, greedy_best_over_tau, DegreeMode, GreedyOptions, GreedySolution, GreedyStep,
};
use qbc_core::mip::{
    build_instance, emit_lp_with, parse_lp, parse_solution, solver_command, verify_assignment, EmitOptions,
    MipInstance, ModelKind,
};
use qbc_core::quasidef::{
    delta_to_gamma, is_delta_quasi_biclique, is_epsilon_quasi_biclique, is_gamma_quasi_biclique,
};
use qbc_core::ratio::{check_gamma, check_theta, to_f64};
use qbc_core::suite::{paper_comparison, render_csv, render_markdown, run_suite, BenchConfig};
use qbc_core::{
    parse_rational, BipartiteGraph, Objective, Rational, SearchParams, Selection, SizeBounds, SolutionPool,
};

#[derive(Parser)]
#[command(name = "qbc", version, about = "Maximum gamma-quasi-biclique search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact maximum quasi-biclique search with a pool of all optima.
    Solve(SolveArgs),
    /// Two-phase greedy heuristic.
    Greedy(GreedyArgs),
    /// Closed-form size bounds and the edge-count range.
    Bounds(BoundsArgs),
    /// Write a MIP model as an LP file.
    Emit(EmitArgs),
    /// Check a solver's solution file against a model.
    Verify(VerifyArgs),
    /// Test a selection against the quasi-biclique definitions.
    Check(CheckArgs),
    /// Run an experiment suite from a TOML config.
    Bench(BenchArgs),
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Print JSON.
    #[arg(long, conflicts_with = "tsv")]
    json: bool,
    /// Print tab-separated values.
    #[arg(long)]
    tsv: bool,
}

#[derive(Args)]
struct Sizes {
    #[arg(long)]
    min_u: Option<usize>,
    #[arg(long)]
    max_u: Option<usize>,
    #[arg(long)]
    min_v: Option<usize>,
    #[arg(long)]
    max_v: Option<usize>,
}

impl Sizes {
    fn given(&self) -> bool {
        self.min_u.is_some() || self.max_u.is_some() || self.min_v.is_some() || self.max_v.is_some()
    }

    fn resolve(&self, g: &BipartiteGraph) -> SizeBounds {
        let full = SizeBounds::full(g);
        SizeBounds::new(
            self.min_u.unwrap_or(full.u_min),
            self.max_u.unwrap_or(full.u_max),
            self.min_v.unwrap_or(full.v_min),
            self.max_v.unwrap_or(full.v_max),
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Bb,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Size,
    Quality,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = gamma)]
    gamma: Rational,
    #[arg(long, value_enum, default_value = "size")]
    objective: ObjectiveArg,
    /// Restrict to θ-near-balanced selections.
    #[arg(long, value_parser = theta)]
    theta: Option<Rational>,
    #[command(flatten)]
    sizes: Sizes,
    /// Keep at most N optima.
    #[arg(long)]
    pool: Option<usize>,
    /// Seconds; on expiry the best selection found is reported uncertified.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "bb")]
    method: MethodArg,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GreedyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = rational)]
    delta: Rational,
    /// Build-phase size; defaults to the smallest U-side degree.
    #[arg(long, conflicts_with = "all_tau")]
    tau: Option<usize>,
    /// Try every τ in 1..=|U| and keep the largest result.
    #[arg(long)]
    all_tau: bool,
    /// Rank candidates by degree into the current selection.
    #[arg(long)]
    restricted_degree: bool,
    /// Also run on the transposed graph and keep the larger result.
    #[arg(long)]
    both_sides: bool,
    /// Include the step trace in the output.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_parser = gamma)]
    gamma: Rational,
    #[arg(long, value_parser = theta)]
    theta: Option<Rational>,
    #[arg(long, required_unless_present = "edges")]
    input: Option<PathBuf>,
    /// Edge count, when no graph is given.
    #[arg(long, conflicts_with = "input")]
    edges: Option<u64>,
    #[command(flatten)]
    sizes: Sizes,
    /// Raise k_min with the degree-sum terms (not valid in general).
    #[arg(long)]
    degree_bounds: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ModelArgs {
    /// 1 (bilinear), 1lin (linearized) or 2.
    #[arg(long, value_parser = model_kind)]
    model: Option<ModelKind>,
    #[arg(long, value_parser = gamma)]
    gamma: Option<Rational>,
    #[arg(long, value_parser = theta)]
    theta: Option<Rational>,
    /// Size bounds u_min,u_max,v_min,v_max.
    #[arg(long, value_parser = size_bounds)]
    bounds: Option<SizeBounds>,
    #[arg(long)]
    input: PathBuf,
}

impl ModelArgs {
    fn build(&self, g: &BipartiteGraph) -> Result<MipInstance> {
        let model = self.model.ok_or_else(|| anyhow!("--model is required"))?;
        let gamma = self.gamma.ok_or_else(|| anyhow!("--gamma is required"))?;
        let bounds = self.bounds.unwrap_or_else(|| SizeBounds::full(g));
        Ok(build_instance(g, model, gamma, &bounds, self.theta)?)
    }
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Permit quadratic rows (needed for the bilinear Model 1).
    #[arg(long)]
    allow_quadratic: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Read the model from an LP file written by `qbc emit` instead of
    /// rebuilding it.
    #[arg(long, conflicts_with_all = ["model", "gamma", "theta", "bounds"])]
    lp: Option<PathBuf>,
    #[arg(long)]
    solution: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated U vertices, by index or label.
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Comma-separated V vertices, by index or label.
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long, value_parser = gamma, required_unless_present_any = ["delta", "epsilon"])]
    gamma: Option<Rational>,
    #[arg(long, value_parser = rational)]
    delta: Option<Rational>,
    #[arg(long)]
    epsilon: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Markdown report with the paper comparison.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Overrides the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn gamma(s: &str) -> Result<Rational, String> {
    rational(s).and_then(|g| check_gamma(g).map_err(|e| e.to_string()))
}

fn theta(s: &str) -> Result<Rational, String> {
    rational(s).and_then(|t| check_theta(t).map_err(|e| e.to_string()))
}

fn model_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: qbc_core::Error| e.to_string())
}

fn size_bounds(s: &str) -> Result<SizeBounds, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected four integers a,b,c,d, got `{s}`"))?;
    match parts[..] {
        [a, b, c, d] => Ok(SizeBounds::new(a, b, c, d)),
        _ => Err(format!("expected four integers a,b,c,d, got `{s}`")),
    }
}

fn load(path: &Path) -> Result<BipartiteGraph> {
    BipartiteGraph::load_path(path).with_context(|| format!("loading {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize)]
struct SelectionOut {
    size_u: usize,
    size_v: usize,
    total: usize,
    edges: u64,
    density: String,
    u: Vec<usize>,
    v: Vec<usize>,
    u_labels: Vec<String>,
    v_labels: Vec<String>,
}

impl SelectionOut {
    fn new(g: &BipartiteGraph, s: &Selection) -> Self {
        Self {
            size_u: s.u_len(),
            size_v: s.v_len(),
            total: s.size(),
            edges: s.edges(),
            density: s.density().map(|d| d.to_string()).unwrap_or_default(),
            u: s.u_set().to_vec(),
            v: s.v_set().to_vec(),
            u_labels: s.u_set().iter().map(|&i| g.u_label(i)).collect(),
            v_labels: s.v_set().iter().map(|&j| g.v_label(j)).collect(),
        }
    }

    fn text(&self) -> String {
        format!(
            "({},{}) edges {} density {}\n  U: {}\n  V: {}",
            self.size_u,
            self.size_v,
            self.edges,
            self.density,
            self.u_labels.join(", "),
            self.v_labels.join(", ")
        )
    }
}

#[derive(Serialize)]
struct SolutionOut {
    objective: String,
    #[serde(flatten)]
    selection: SelectionOut,
}

#[derive(Serialize)]
struct PoolOut {
    objective: Objective,
    gamma: String,
    status: &'static str,
    optimum: Option<String>,
    optimum_f64: Option<f64>,
    bound: f64,
    truncated: bool,
    nodes: u64,
    solutions: Vec<SolutionOut>,
}

fn pool_status(pool: &SolutionPool) -> &'static str {
    match (pool.certified, pool.is_infeasible()) {
        (true, true) => "infeasible",
        (true, false) => "optimal",
        (false, true) => "timeout-no-solution",
        (false, false) => "timeout",
    }
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode> {
    let g = load(&a.input)?;
    let objective = match a.objective {
        ObjectiveArg::Size => Objective::Size,
        ObjectiveArg::Quality => Objective::Quality,
    };
    let mut params = SearchParams::new(a.gamma)
        .objective(objective)
        .threads(a.threads.max(1));
    if a.sizes.given() {
        params = params.size_bounds(a.sizes.resolve(&g));
    }
    if let Some(t) = a.theta {
        params = params.theta(t);
    }
    if let Some(n) = a.pool {
        params = params.pool_limit(n);
    }
    if let Some(s) = a.time_limit {
        if !(s > 0.0 && s.is_finite()) {
            bail!("--time-limit must be a positive number of seconds");
        }
        params = params.time_limit(Duration::from_secs_f64(s));
    }
    let method = match a.method {
        MethodArg::Bb => Method::Bb,
        MethodArg::Oracle => Method::Oracle,
    };
    let pool = solve(&g, &params, method)?;
    let out = PoolOut {
        objective,
        gamma: a.gamma.to_string(),
        status: pool_status(&pool),
        optimum: pool.optimum().map(|r| r.to_string()),
        optimum_f64: pool.best().map(|s| s.value_f64()),
        bound: pool.bound,
        truncated: pool.truncated,
        nodes: pool.stats.nodes,
        solutions: pool
            .solutions
            .iter()
            .map(|s| SolutionOut {
                objective: s.objective_value.to_string(),
                selection: SelectionOut::new(&g, &s.selection),
            })
            .collect(),
    };
    if a.output.json {
        print_json(&out)?;
    } else if a.output.tsv {
        println!("rank\tsize_u\tsize_v\ttotal\tedges\tdensity\tobjective\tu\tv");
        for (i, s) in out.solutions.iter().enumerate() {
            let sel = &s.selection;
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                sel.size_u,
                sel.size_v,
                sel.total,
                sel.edges,
                sel.density,
                s.objective,
                join(&sel.u_labels),
                join(&sel.v_labels)
            );
        }
    } else {
        println!("status: {}", out.status);
        if let (Some(opt), Some(x)) = (&out.optimum, out.optimum_f64) {
            println!("optimum ({objective}): {opt} ({x:.6})");
        }
        if !pool.certified {
            println!("upper bound: {:.6}", out.bound);
        }
        let more = if out.truncated {
            " (pool limit reached)"
        } else {
            ""
        };
        println!("solutions: {}{more}", out.solutions.len());
        println!("nodes: {}", out.nodes);
        for (i, s) in out.solutions.iter().enumerate() {
            println!("#{} {}", i + 1, s.selection.text());
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GreedyOut {
    delta: String,
    tau: usize,
    transposed: bool,
    delta_valid: bool,
    gamma_valid: bool,
    #[serde(flatten)]
    selection: SelectionOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<String>>,
}

fn cmd_greedy(a: GreedyArgs) -> Result<ExitCode> {
    let g = load(&a.input)?;
    let options = GreedyOptions {
        degree: if a.restricted_degree {
            DegreeMode::Restricted
        } else {
            DegreeMode::Global
        },
        both_sides: a.both_sides,
    };
    let taus: Vec<usize> = if a.all_tau {
        (1..=g.u_count().max(1)).collect()
    } else {
        vec![a.tau.unwrap_or_else(|| default_tau(&g))]
    };
    let sol: GreedySolution = greedy_best_over_tau(&g, a.delta, taus, options)?;
    let out = GreedyOut {
        delta: a.delta.to_string(),
        tau: sol.trace.tau,
        transposed: sol.trace.transposed,
        delta_valid: sol.delta_valid,
        gamma_valid: sol.gamma_valid,
        selection: SelectionOut::new(&g, &sol.selection),
        steps: a.trace.then(|| {
            sol.trace
                .steps
                .iter()
                .map(|s| match s {
                    GreedyStep::Add { side, vertex } => format!("add {side:?} {vertex}"),
                    GreedyStep::Prune { removed } => format!("prune V {}", join(removed)),
                })
                .collect()
        }),
    };
    if a.output.json {
        print_json(&out)?;
    } else if a.output.tsv {
        println!("tau\tsize_u\tsize_v\ttotal\tedges\tdensity\tu\tv");
        let s = &out.selection;
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            out.tau,
            s.size_u,
            s.size_v,
            s.total,
            s.edges,
            s.density,
            join(&s.u_labels),
            join(&s.v_labels)
        );
    } else {
        let side = if out.transposed {
            " (on the transposed graph)"
        } else {
            ""
        };
        println!("tau: {}{side}", out.tau);
        println!("{}", out.selection.text());
        for step in out.steps.iter().flatten() {
            println!("  {step}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundOut {
    name: String,
    value: f64,
    floor: u64,
}

fn cmd_bounds(a: BoundsArgs) -> Result<ExitCode> {
    let g = a.input.as_deref().map(load).transpose()?;
    let m = match (&g, a.edges) {
        (Some(g), _) => g.edge_count() as u64,
        (None, Some(m)) => m,
        (None, None) => bail!("give --input or --edges"),
    };
    let gamma = to_f64(a.gamma);
    let mut rows = Vec::new();
    let mut push = |name: String, value: f64| {
        rows.push(BoundOut {
            name,
            value,
            floor: floor_bound(value),
        })
    };
    push("quasi_clique".into(), quasi_clique_upper_bound(m, gamma)?);
    push("balanced".into(), balanced_biclique_upper_bound(m, gamma)?);
    if let Some(t) = a.theta {
        push(
            format!("near_balanced(theta={t})"),
            near_balanced_upper_bound(m, gamma, to_f64(t))?,
        );
    }
    let range = match &g {
        Some(g) => Some(edge_count_bounds(
            g,
            a.gamma,
            &a.sizes.resolve(g),
            a.degree_bounds,
        )),
        None => None,
    };
    if a.output.json {
        #[derive(Serialize)]
        struct Out {
            edges: u64,
            gamma: String,
            bounds: Vec<BoundOut>,
            k_min: Option<u64>,
            k_max: Option<u64>,
            edge_range_error: Option<String>,
        }
        let (k_min, k_max, err) = match range {
            Some(Ok(r)) => (Some(r.k_min), Some(r.k_max), None),
            Some(Err(e)) => (None, None, Some(e.to_string())),
            None => (None, None, None),
        };
        print_json(&Out {
            edges: m,
            gamma: a.gamma.to_string(),
            bounds: rows,
            k_min,
            k_max,
            edge_range_error: err,
        })?;
    } else if a.output.tsv {
        println!("bound\tvalue\tfloor");
        for r in &rows {
            println!("{}\t{}\t{}", r.name, r.value, r.floor);
        }
        if let Some(Ok(r)) = range {
            println!("k_min\t{}\t{}", r.k_min, r.k_min);
            println!("k_max\t{}\t{}", r.k_max, r.k_max);
        }
    } else {
        println!("edges: {m}");
        for r in &rows {
            println!("{}: {:.6} (floor {})", r.name, r.value, r.floor);
        }
        match range {
            Some(Ok(r)) => println!("edge count range: {}..={}", r.k_min, r.k_max),
            Some(Err(e)) => println!("edge count range: {e}"),
            None => {}
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_emit(a: EmitArgs) -> Result<ExitCode> {
    let g = load(&a.model.input)?;
    let inst = a.model.build(&g)?;
    let text = emit_lp_with(
        &inst,
        EmitOptions {
            allow_quadratic: a.allow_quadratic,
        },
    )?;
    match &a.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let g = load(&a.model.input)?;
    let inst = match &a.lp {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_lp(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => a.model.build(&g)?,
    };
    let text =
        std::fs::read_to_string(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let assignment = parse_solution(&text, &inst)?;
    let result = verify_assignment(&g, &inst, &assignment, inst.metadata.gamma);
    #[derive(Serialize)]
    struct Out {
        valid: bool,
        error: Option<String>,
        selection: Option<SelectionOut>,
    }
    let out = match &result {
        Ok(sel) => Out {
            valid: true,
            error: None,
            selection: Some(SelectionOut::new(&g, sel)),
        },
        Err(e) => Out {
            valid: false,
            error: Some(e.to_string()),
            selection: None,
        },
    };
    if a.output.json {
        print_json(&out)?;
    } else if let Some(sel) = &out.selection {
        if a.output.tsv {
            println!("valid\tsize_u\tsize_v\tedges\tdensity");
            println!(
                "true\t{}\t{}\t{}\t{}",
                sel.size_u, sel.size_v, sel.edges, sel.density
            );
        } else {
            println!("valid: {}", sel.text());
        }
    } else {
        println!("invalid: {}", out.error.as_deref().unwrap_or_default());
    }
    Ok(if out.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn resolve_vertices(list: &str, count: usize, label: impl Fn(usize) -> String) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let index = match token.parse::<usize>() {
            Ok(i) if i < count => i,
            Ok(i) => bail!("vertex {i} is out of range (side has {count})"),
            Err(_) => (0..count)
                .find(|&i| label(i) == token)
                .ok_or_else(|| anyhow!("no vertex labelled `{token}`"))?,
        };
        out.push(index);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode> {
    let g = load(&a.input)?;
    let u = resolve_vertices(&a.u, g.u_count(), |i| g.u_label(i))?;
    let v = resolve_vertices(&a.v, g.v_count(), |j| g.v_label(j))?;
    let sel = g.induced_stats(&u, &v)?;
    let mut results: Vec<(String, bool)> = Vec::new();
    if let Some(gamma) = a.gamma {
        results.push((
            format!("gamma={gamma}"),
            is_gamma_quasi_biclique(&g, &sel, gamma)?,
        ));
    }
    if let Some(delta) = a.delta {
        results.push((
            format!("delta={delta}"),
            is_delta_quasi_biclique(&g, &sel, delta)?,
        ));
        let gamma = delta_to_gamma(delta)?;
        results.push((
            format!("gamma={gamma} (from delta)"),
            is_gamma_quasi_biclique(&g, &sel, gamma)?,
        ));
    }
    if let Some(eps) = a.epsilon {
        results.push((
            format!("epsilon={eps}"),
            is_epsilon_quasi_biclique(&g, &sel, eps)?,
        ));
    }
    let all = results.iter().all(|r| r.1);
    if a.output.json {
        #[derive(Serialize)]
        struct Out {
            selection: SelectionOut,
            checks: Vec<(String, bool)>,
            valid: bool,
        }
        print_json(&Out {
            selection: SelectionOut::new(&g, &sel),
            checks: results,
            valid: all,
        })?;
    } else if a.output.tsv {
        println!("check\tresult");
        for (name, ok) in &results {
            println!("{name}\t{ok}");
        }
    } else {
        println!("{}", SelectionOut::new(&g, &sel).text());
        for (name, ok) in &results {
            println!("{name}: {}", if *ok { "yes" } else { "no" });
        }
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    let mut config = BenchConfig::load(&a.config)?;
    if let Some(w) = a.workers {
        config.workers = w.max(1);
    }
    if config.solver_cmd.is_none() {
        config.solver_cmd = solver_command(Some(&a.config))?;
    }
    let rows = run_suite(&config)?;
    let csv = render_csv(&rows);
    match &a.out {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &a.report {
        let cmp = paper_comparison(&config, &rows);
        let mut md = String::from("# Benchmark results\n\n");
        let _ = writeln!(md, "Config: `{}`\n", a.config.display());
        md.push_str(&render_markdown(&rows, Some(&cmp)));
        md.push_str("\n`~` marks a time-limited incumbent that was not certified optimal.\n");
        std::fs::write(path, md).with_context(|| format!("writing {}", path.display()))?;
    }
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    if failed > 0 {
        eprintln!("{failed} cell(s) failed; see the status column");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Greedy(a) => cmd_greedy(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Emit(a) => cmd_emit(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
