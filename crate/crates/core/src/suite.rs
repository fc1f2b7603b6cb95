//! Experiment harness: runs every (dataset, criterion, γ, method) cell of a
//! TOML config and renders the results as CSV and Markdown.
//!
//! ```toml
//! workers = 1
//! gammas = [0.6, 0.7, "4/5"]
//! methods = ["bb", "oracle", "greedy"]
//! objectives = ["size"]
//! time_limit_s = 30
//!
//! [[datasets]]
//! name = "southern_women"
//! path = "southern_women.tsv"      # relative to the config file
//! reference = "southern_women"     # key into the stored paper values
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigraph::{load_edge_list, load_pajek_two_mode, BipartiteGraph, Selection};
use crate::bounds::SizeBounds;
use crate::error::{Error, Result};
use crate::exact::{branch_and_bound, sweep_oracle, Objective, SearchParams, SolutionPool};
use crate::greedy::{greedy_best_over_tau, GreedyOptions};
use crate::mip::{
    build_model1, build_model2, run_external_solver, verify_assignment, Model1Form, SolverStatus,
    SOLVER_ENV_VAR,
};
use crate::quasidef::is_gamma_quasi_biclique;
use crate::ratio::{check_gamma, parse_rational, Rational};

pub const CSV_HEADER: [&str; 13] = [
    "dataset",
    "method",
    "gamma",
    "time_ms",
    "count",
    "size_u",
    "size_v",
    "total",
    "objective",
    "certified",
    "criterion",
    "status",
    "bounds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bb,
    Oracle,
    Greedy,
    Mip,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bb => "bb",
            Method::Oracle => "oracle",
            Method::Greedy => "greedy",
            Method::Mip => "mip",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bb" => Ok(Method::Bb),
            "oracle" => Ok(Method::Oracle),
            "greedy" => Ok(Method::Greedy),
            "mip" | "external-mip" => Ok(Method::Mip),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    /// Pajek for `.net`/`.paj` or a leading `*Vertices`, else edge list.
    #[default]
    Auto,
    EdgeList,
    Pajek,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    pub format: DatasetFormat,
    pub bounds: Option<SizeBounds>,
    /// Key of the stored paper values for this dataset.
    pub reference: Option<String>,
    /// Overrides the suite's method list, e.g. greedy only for big graphs.
    pub methods: Option<Vec<Method>>,
}

impl DatasetSpec {
    pub fn load(&self) -> Result<BipartiteGraph> {
        let read = || std::fs::read_to_string(&self.path).map_err(|e| Error::io(&self.path, e));
        match self.format {
            DatasetFormat::Auto => BipartiteGraph::load_path(&self.path),
            DatasetFormat::EdgeList => load_edge_list(&read()?),
            DatasetFormat::Pajek => load_pajek_two_mode(&read()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSpec>,
    pub gammas: Vec<Rational>,
    pub methods: Vec<Method>,
    pub objectives: Vec<Objective>,
    pub pool_limit: usize,
    pub time_limit: Option<Duration>,
    pub oracle_cap: usize,
    /// τ values for the greedy sweep; default `1..=|U|`.
    pub greedy_taus: Option<Vec<usize>>,
    pub greedy_both_sides: bool,
    pub solver_cmd: Option<String>,
    pub workers: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GammaSpec {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    name: String,
    path: PathBuf,
    #[serde(default)]
    format: DatasetFormat,
    bounds: Option<[usize; 4]>,
    reference: Option<String>,
    methods: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gammas: Vec<GammaSpec>,
    methods: Vec<String>,
    objectives: Option<Vec<Objective>>,
    pool_limit: Option<usize>,
    time_limit_s: Option<f64>,
    oracle_cap: Option<usize>,
    greedy_taus: Option<Vec<usize>>,
    #[serde(default)]
    greedy_both_sides: bool,
    solver_cmd: Option<String>,
    workers: Option<usize>,
    #[serde(default)]
    datasets: Vec<RawDataset>,
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    if names.is_empty() {
        return Err(Error::Config("method list is empty".into()));
    }
    names.iter().map(|m| m.parse()).collect()
}

impl BenchConfig {
    /// Parses a config; relative dataset paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut gammas = Vec::new();
        for g in &raw.gammas {
            let text = match g {
                GammaSpec::Number(x) => format!("{x}"),
                GammaSpec::Text(s) => s.clone(),
            };
            let gamma = parse_rational(&text)
                .and_then(check_gamma)
                .map_err(|e| Error::Config(format!("gamma `{text}`: {e}")))?;
            gammas.push(gamma);
        }
        if gammas.is_empty() {
            return Err(Error::Config("gamma list is empty".into()));
        }
        let pool_limit = raw.pool_limit.unwrap_or(1000);
        if pool_limit == 0 {
            return Err(Error::Config("pool_limit must be at least 1".into()));
        }
        let time_limit = match raw.time_limit_s {
            Some(s) if !(s > 0.0 && s.is_finite()) => {
                return Err(Error::Config(format!("time_limit_s must be positive, got {s}")));
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        let mut datasets = Vec::new();
        for d in raw.datasets {
            let bounds = d.bounds.map(|b| SizeBounds::new(b[0], b[1], b[2], b[3]));
            datasets.push(DatasetSpec {
                path: if d.path.is_absolute() {
                    d.path
                } else {
                    base.join(d.path)
                },
                name: d.name,
                format: d.format,
                bounds,
                reference: d.reference,
                methods: d.methods.as_deref().map(parse_methods).transpose()?,
            });
        }
        Ok(Self {
            datasets,
            gammas,
            methods: parse_methods(&raw.methods)?,
            objectives: raw.objectives.unwrap_or_else(|| vec![Objective::Size]),
            pool_limit,
            time_limit,
            oracle_cap: raw.oracle_cap.unwrap_or(crate::exact::DEFAULT_ORACLE_CAP),
            greedy_taus: raw.greedy_taus,
            greedy_both_sides: raw.greedy_both_sides,
            solver_cmd: raw.solver_cmd,
            workers: raw.workers.unwrap_or(1).max(1),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }
}

/// One cell of the results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub method: Method,
    pub gamma: Rational,
    pub time_ms: f64,
    pub count: usize,
    pub size_u: Option<usize>,
    pub size_v: Option<usize>,
    pub total: Option<usize>,
    pub objective: Option<Rational>,
    pub certified: bool,
    pub criterion: Objective,
    /// `ok`, `timeout`, `skipped: ...` or `error: ...`.
    pub status: String,
    pub bounds: Option<SizeBounds>,
}

impl BenchRow {
    fn blank(dataset: &str, method: Method, gamma: Rational, criterion: Objective) -> Self {
        Self {
            dataset: dataset.to_string(),
            method,
            gamma,
            time_ms: 0.0,
            count: 0,
            size_u: None,
            size_v: None,
            total: None,
            objective: None,
            certified: false,
            criterion,
            status: "ok".into(),
            bounds: None,
        }
    }

    fn fill(&mut self, sel: &Selection) {
        self.size_u = Some(sel.u_len());
        self.size_v = Some(sel.v_len());
        self.total = Some(sel.size());
        self.objective = Some(self.criterion.value(sel.edges(), sel.u_len(), sel.v_len()));
    }

    fn fill_pool(&mut self, pool: &SolutionPool) {
        self.count = pool.len();
        self.certified = pool.certified;
        if let Some(best) = pool.best() {
            self.fill(&best.selection);
        }
        if !pool.certified {
            self.status = "timeout".into();
        }
    }
}

/// Every cell in deterministic order: dataset, criterion, γ, method.
pub fn run_suite(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let graphs: Vec<std::result::Result<BipartiteGraph, String>> = config
        .datasets
        .iter()
        .map(|d| d.load().map_err(|e| e.to_string()))
        .collect();
    let mut cells = Vec::new();
    for (di, d) in config.datasets.iter().enumerate() {
        let methods = d.methods.as_ref().unwrap_or(&config.methods);
        for &criterion in &config.objectives {
            for &gamma in &config.gammas {
                for &method in methods {
                    cells.push((di, criterion, gamma, method));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start workers: {e}")))?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&(di, criterion, gamma, method)| {
                let spec = &config.datasets[di];
                let mut row = BenchRow::blank(&spec.name, method, gamma, criterion);
                match &graphs[di] {
                    Err(e) => row.status = format!("error: {e}"),
                    Ok(g) => run_cell(config, spec, g, &mut row),
                }
                row
            })
            .collect()
    }))
}

fn run_cell(config: &BenchConfig, spec: &DatasetSpec, g: &BipartiteGraph, row: &mut BenchRow) {
    let bounds = spec.bounds.unwrap_or_else(|| SizeBounds::full(g));
    row.bounds = Some(bounds);
    let start = Instant::now();
    let outcome = cell_outcome(config, spec, g, row, bounds);
    let micros = start.elapsed().as_micros() as f64;
    row.time_ms = micros.round() / 1000.0;
    if let Err(e) = outcome {
        row.status = match e {
            Error::Refused(m) => format!("skipped: {m}"),
            other => format!("error: {other}"),
        };
    }
}

fn cell_outcome(
    config: &BenchConfig,
    spec: &DatasetSpec,
    g: &BipartiteGraph,
    row: &mut BenchRow,
    bounds: SizeBounds,
) -> Result<()> {
    let mut params = SearchParams::new(row.gamma)
        .objective(row.criterion)
        .pool_limit(config.pool_limit);
    params.oracle_cap = config.oracle_cap;
    if spec.bounds.is_some() {
        params = params.size_bounds(bounds);
    }
    if let Some(t) = config.time_limit {
        params = params.time_limit(t);
    }
    match row.method {
        Method::Bb => row.fill_pool(&branch_and_bound(g, &params)?),
        Method::Oracle => row.fill_pool(&sweep_oracle(g, &params)?),
        Method::Greedy => {
            let delta = Rational::from_integer(1) - row.gamma;
            let taus = config
                .greedy_taus
                .clone()
                .unwrap_or_else(|| (1..=g.u_count().max(1)).collect());
            let options = GreedyOptions {
                both_sides: config.greedy_both_sides,
                ..GreedyOptions::default()
            };
            let sol = greedy_best_over_tau(g, delta, taus, options)?;
            row.count = 1;
            row.fill(&sol.selection);
        }
        Method::Mip => {
            let cmd = std::env::var(SOLVER_ENV_VAR)
                .ok()
                .filter(|c| !c.trim().is_empty())
                .or_else(|| config.solver_cmd.clone());
            let Some(cmd) = cmd else {
                row.status = "skipped: no solver_cmd configured".into();
                return Ok(());
            };
            let inst = match row.criterion {
                Objective::Size => build_model1(g, row.gamma, &bounds, Model1Form::Linearized)?,
                Objective::Quality => build_model2(g, row.gamma, &bounds)?,
            };
            let assignment = run_external_solver(&inst, &cmd)?;
            if assignment.status == SolverStatus::Infeasible {
                row.status = "infeasible".into();
                return Ok(());
            }
            let sel = verify_assignment(g, &inst, &assignment, row.gamma)?;
            debug_assert!(is_gamma_quasi_biclique(g, &sel, row.gamma)?);
            row.count = 1;
            row.certified = assignment.status == SolverStatus::Optimal;
            row.fill(&sel);
        }
    }
    Ok(())
}

/// `3/5` as `0.6`; non-terminating fractions stay as `n/d`.
pub fn format_gamma(r: Rational) -> String {
    let (n, mut d) = (*r.numer(), *r.denom());
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return r.to_string();
    }
    let digits = twos.max(fives);
    let scaled = n as u128 * 10u128.pow(digits) / *r.denom() as u128;
    if digits == 0 {
        return scaled.to_string();
    }
    let s = format!("{scaled:0>width$}", width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{int}.{frac}")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn format_bounds(b: &Option<SizeBounds>) -> String {
    b.map(|b| format!("{}-{}x{}-{}", b.u_min, b.u_max, b.v_min, b.v_max))
        .unwrap_or_default()
}

fn row_record(row: &BenchRow) -> Vec<String> {
    vec![
        row.dataset.clone(),
        row.method.to_string(),
        format_gamma(row.gamma),
        format!("{:.3}", row.time_ms),
        row.count.to_string(),
        opt(&row.size_u),
        opt(&row.size_v),
        opt(&row.total),
        opt(&row.objective),
        row.certified.to_string(),
        row.criterion.to_string(),
        row.status.clone(),
        format_bounds(&row.bounds),
    ]
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row_record(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<Option<T>> {
    let s = rec.get(i).unwrap_or("");
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::parse(line, format!("bad `{}` value `{s}`", CSV_HEADER[i])))
}

fn parse_bounds(s: &str, line: usize) -> Result<Option<SizeBounds>> {
    if s.is_empty() {
        return Ok(None);
    }
    let bad = || Error::parse(line, format!("bad bounds `{s}`"));
    let (u, v) = s.split_once('x').ok_or_else(bad)?;
    let pair = |t: &str| -> Result<(usize, usize)> {
        let (a, b) = t.split_once('-').ok_or_else(bad)?;
        Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
    };
    let ((a, b), (c, d)) = (pair(u)?, pair(v)?);
    Ok(Some(SizeBounds::new(a, b, c, d)))
}

/// Reads CSV written by [`render_csv`].
pub fn read_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Format(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Format("unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::parse(line, "wrong number of fields"));
        }
        let need = |x: Option<String>| x.ok_or_else(|| Error::parse(line, "missing field"));
        let gamma = parse_rational(&rec[2]).map_err(|e| Error::parse(line, e.to_string()))?;
        let objective = match &rec[8] {
            "" => None,
            s => Some(parse_rational(s).map_err(|e| Error::parse(line, e.to_string()))?),
        };
        rows.push(BenchRow {
            dataset: rec[0].to_string(),
            method: rec[1].parse()?,
            gamma,
            time_ms: field(&rec, 3, line)?.unwrap_or(0.0),
            count: field(&rec, 4, line)?.unwrap_or(0),
            size_u: field(&rec, 5, line)?,
            size_v: field(&rec, 6, line)?,
            total: field(&rec, 7, line)?,
            objective,
            certified: field(&rec, 9, line)?.unwrap_or(false),
            criterion: need(field::<String>(&rec, 10, line)?)?.parse()?,
            status: rec[11].to_string(),
            bounds: parse_bounds(&rec[12], line)?,
        });
    }
    Ok(rows)
}

/// Column of the paper's result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PaperColumn {
    Model1,
    Model2,
    Greedy,
}

/// A published cell: shape `(|U'|, |V'|)` when given, else just the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PaperRef {
    pub dataset: &'static str,
    pub gamma: (u64, u64),
    pub column: PaperColumn,
    pub shape: Option<(usize, usize)>,
    pub total: usize,
    pub count: usize,
}

const fn shaped(
    dataset: &'static str,
    gamma: (u64, u64),
    column: PaperColumn,
    u: usize,
    v: usize,
    count: usize,
) -> PaperRef {
    PaperRef {
        dataset,
        gamma,
        column,
        shape: Some((u, v)),
        total: u + v,
        count,
    }
}

const fn total(
    dataset: &'static str,
    gamma: (u64, u64),
    column: PaperColumn,
    total: usize,
    count: usize,
) -> PaperRef {
    PaperRef {
        dataset,
        gamma,
        column,
        shape: None,
        total,
        count,
    }
}

use PaperColumn::{Greedy as G, Model1 as M1, Model2 as M2};

const SW: &str = "southern_women";
const DIV: &str = "divorce_us";
const DET: &str = "dutch_elite_top200";
const DE: &str = "dutch_elite";
const ML: &str = "movielens_small";

/// Published sizes (feasibility witnesses, not assumed optima).
pub const PAPER_REFERENCES: &[PaperRef] = &[
    shaped(SW, (3, 5), M1, 18, 4, 4),
    shaped(SW, (3, 5), M2, 18, 4, 2),
    shaped(SW, (3, 5), G, 17, 5, 4),
    shaped(DIV, (3, 5), M1, 4, 50, 1),
    shaped(DIV, (3, 5), M2, 4, 50, 1),
    shaped(DIV, (3, 5), G, 2, 46, 1),
    shaped(DET, (3, 5), M1, 26, 1, 2),
    shaped(DET, (3, 5), M2, 11, 3, 1),
    shaped(DET, (3, 5), G, 10, 3, 1),
    shaped(DE, (3, 5), M2, 45, 2, 1),
    shaped(DE, (3, 5), G, 40, 2, 1),
    shaped(ML, (3, 5), M1, 692, 2, 2),
    shaped(ML, (3, 5), M2, 900, 3, 5),
    shaped(ML, (3, 5), G, 754, 2, 2),
    shaped(SW, (7, 10), M1, 16, 3, 1),
    shaped(SW, (7, 10), M2, 10, 6, 1),
    shaped(SW, (7, 10), G, 16, 2, 1),
    shaped(DIV, (7, 10), M1, 2, 45, 1),
    shaped(DIV, (7, 10), M2, 5, 36, 3),
    shaped(DIV, (7, 10), G, 2, 28, 1),
    shaped(DET, (7, 10), M1, 23, 1, 1),
    shaped(DET, (7, 10), M2, 10, 3, 3),
    shaped(DET, (7, 10), G, 10, 3, 1),
    shaped(DE, (7, 10), M2, 20, 2, 1),
    shaped(DE, (7, 10), G, 20, 1, 1),
    shaped(ML, (7, 10), M2, 800, 3, 6),
    total(DIV, (4, 5), M1, 38, 1),
    total(DIV, (4, 5), M2, 33, 2),
    total(DIV, (4, 5), G, 25, 1),
    total(DET, (4, 5), M2, 13, 2),
    total(DET, (4, 5), G, 13, 1),
    total(DE, (4, 5), M2, 47, 1),
    total(DE, (4, 5), G, 21, 1),
    total(ML, (4, 5), M2, 445, 2),
];

pub fn paper_reference(dataset: &str, gamma: Rational, column: PaperColumn) -> Option<&'static PaperRef> {
    PAPER_REFERENCES
        .iter()
        .find(|p| p.dataset == dataset && Rational::new(p.gamma.0, p.gamma.1) == gamma && p.column == column)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareStatus {
    Matches,
    ArtifactBetter,
    ArtifactWorse,
    NotComparable,
}

impl fmt::Display for CompareStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareStatus::Matches => "matches",
            CompareStatus::ArtifactBetter => "artifact-better",
            CompareStatus::ArtifactWorse => "artifact-worse",
            CompareStatus::NotComparable => "not-comparable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub paper: Option<PaperRef>,
    pub status: CompareStatus,
}

fn column_for(row: &BenchRow) -> PaperColumn {
    match (row.method, row.criterion) {
        (Method::Greedy, _) => PaperColumn::Greedy,
        (_, Objective::Size) => PaperColumn::Model1,
        (_, Objective::Quality) => PaperColumn::Model2,
    }
}

/// Annotates each row with the paper's size for the matching cell, looked
/// up by the dataset's `reference` key (rows of datasets without one are
/// not comparable). Sizes are compared by total.
pub fn paper_comparison(config: &BenchConfig, rows: &[BenchRow]) -> Vec<Comparison> {
    rows.iter()
        .map(|row| {
            let key = config
                .datasets
                .iter()
                .find(|d| d.name == row.dataset)
                .and_then(|d| d.reference.as_deref());
            let paper = key
                .and_then(|k| paper_reference(k, row.gamma, column_for(row)))
                .copied();
            let status = match (paper, row.total) {
                (Some(p), Some(t)) => match t.cmp(&p.total) {
                    std::cmp::Ordering::Equal => CompareStatus::Matches,
                    std::cmp::Ordering::Greater => CompareStatus::ArtifactBetter,
                    std::cmp::Ordering::Less => CompareStatus::ArtifactWorse,
                },
                _ => CompareStatus::NotComparable,
            };
            Comparison { paper, status }
        })
        .collect()
}

/// Markdown table of all rows; `~` marks an uncertified incumbent.
pub fn render_markdown(rows: &[BenchRow], comparisons: Option<&[Comparison]>) -> String {
    let mut out = String::from(
        "| dataset | criterion | gamma | method | time | count | size | total | objective | bounds | paper | status |\n\
         |---|---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for (i, row) in rows.iter().enumerate() {
        let size = match (row.size_u, row.size_v) {
            (Some(u), Some(v)) => {
                let mark = if row.certified || row.method == Method::Greedy {
                    ""
                } else {
                    " ~"
                };
                format!("({u},{v}){mark}")
            }
            _ => "-".into(),
        };
        let (paper, status) = match comparisons.and_then(|c| c.get(i)) {
            Some(c) => (
                c.paper
                    .map(|p| match p.shape {
                        Some((u, v)) => format!("({u},{v})"),
                        None => p.total.to_string(),
                    })
                    .unwrap_or_else(|| "-".into()),
                c.status.to_string(),
            ),
            None => ("-".into(), CompareStatus::NotComparable.to_string()),
        };
        let note = if row.status == "ok" {
            status
        } else {
            format!("{status}; {}", row.status)
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.1} ms | {} | {} | {} | {} | {} | {} | {} |\n",
            row.dataset,
            row.criterion,
            format_gamma(row.gamma),
            row.method,
            row.time_ms,
            row.count,
            size,
            opt(&row.total),
            opt(&row.objective),
            format_bounds(&row.bounds),
            paper,
            note.replace('|', "/"),
        ));
    }
    out
}
