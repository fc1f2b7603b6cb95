//! Immutable bipartite graphs with bit-vector adjacency, plus the two input
//! formats the tools read (plain edge lists and Pajek two-mode networks).

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::Rational;

/// One of the two vertex classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::U => f.write_str("U"),
            Side::V => f.write_str("V"),
        }
    }
}

/// A simple bipartite graph `(U, V, E)`.
///
/// Adjacency is stored twice, once per side, so restricted degrees on
/// either side are a single popcount.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    rows: Vec<FixedBitSet>,
    cols: Vec<FixedBitSet>,
    edge_count: usize,
    u_labels: Option<Vec<String>>,
    v_labels: Option<Vec<String>>,
}

impl BipartiteGraph {
    /// Builds a graph from `(u, v)` pairs. Duplicate pairs collapse.
    pub fn from_edges<I>(u_count: usize, v_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![FixedBitSet::with_capacity(v_count); u_count];
        let mut cols = vec![FixedBitSet::with_capacity(u_count); v_count];
        for (u, v) in edges {
            if u >= u_count || v >= v_count {
                return Err(Error::arg(format!(
                    "edge ({u}, {v}) outside a {u_count}x{v_count} graph"
                )));
            }
            rows[u].insert(v);
            cols[v].insert(u);
        }
        let edge_count = rows.iter().map(|r| r.count_ones(..)).sum();
        Ok(Self {
            rows,
            cols,
            edge_count,
            u_labels: None,
            v_labels: None,
        })
    }

    pub fn complete(u_count: usize, v_count: usize) -> Self {
        let edges = (0..u_count).flat_map(|u| (0..v_count).map(move |v| (u, v)));
        Self::from_edges(u_count, v_count, edges).expect("indices in range")
    }

    pub fn empty(u_count: usize, v_count: usize) -> Self {
        Self::from_edges(u_count, v_count, std::iter::empty()).expect("no edges")
    }

    /// Attaches external vertex names. Lengths must match the side sizes.
    pub fn with_labels(mut self, u_labels: Vec<String>, v_labels: Vec<String>) -> Result<Self> {
        if u_labels.len() != self.u_count() || v_labels.len() != self.v_count() {
            return Err(Error::arg("label count does not match vertex count"));
        }
        self.u_labels = Some(u_labels);
        self.v_labels = Some(v_labels);
        Ok(self)
    }

    pub fn u_count(&self) -> usize {
        self.rows.len()
    }

    pub fn v_count(&self) -> usize {
        self.cols.len()
    }

    pub fn side_count(&self, side: Side) -> usize {
        match side {
            Side::U => self.u_count(),
            Side::V => self.v_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.u_count() && self.rows[u].contains(v)
    }

    /// Neighbours of `u` as a bit-vector over V.
    pub fn row(&self, u: usize) -> &FixedBitSet {
        &self.rows[u]
    }

    /// Neighbours of `v` as a bit-vector over U.
    pub fn col(&self, v: usize) -> &FixedBitSet {
        &self.cols[v]
    }

    pub fn neighbors(&self, side: Side, index: usize) -> &FixedBitSet {
        match side {
            Side::U => &self.rows[index],
            Side::V => &self.cols[index],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.ones().map(move |v| (u, v)))
    }

    pub fn u_label(&self, u: usize) -> String {
        match &self.u_labels {
            Some(l) => l[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn v_label(&self, v: usize) -> String {
        match &self.v_labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn has_labels(&self) -> bool {
        self.u_labels.is_some()
    }

    /// The same graph with U and V exchanged.
    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            edge_count: self.edge_count,
            u_labels: self.v_labels.clone(),
            v_labels: self.u_labels.clone(),
        }
    }

    fn check_index(&self, side: Side, index: usize) -> Result<()> {
        let n = self.side_count(side);
        if index >= n {
            return Err(Error::arg(format!(
                "{side} index {index} out of range (|{side}| = {n})"
            )));
        }
        Ok(())
    }

    /// Degree of a vertex in the whole graph.
    pub fn degree(&self, side: Side, index: usize) -> Result<usize> {
        self.check_index(side, index)?;
        Ok(self.neighbors(side, index).count_ones(..))
    }

    /// `d(x, S)`: neighbours of `x` inside `subset`, a set of indices on the
    /// opposite side.
    pub fn restricted_degree(&self, side: Side, index: usize, subset: &[usize]) -> Result<usize> {
        self.check_index(side, index)?;
        let row = self.neighbors(side, index);
        let limit = self.side_count(side.other());
        let mut count = 0;
        for &x in subset {
            if x >= limit {
                return Err(Error::arg(format!("{} index {x} out of range", side.other())));
            }
            count += usize::from(row.contains(x));
        }
        Ok(count)
    }

    /// `|E| / (|U| |V|)`.
    pub fn density(&self) -> Result<Rational> {
        if self.u_count() == 0 || self.v_count() == 0 {
            return Err(Error::UndefinedDensity);
        }
        Ok(Ratio::new(
            self.edge_count as u64,
            (self.u_count() * self.v_count()) as u64,
        ))
    }

    /// Statistics of the subgraph induced by `(u_set, v_set)`.
    pub fn induced_stats(&self, u_set: &[usize], v_set: &[usize]) -> Result<Selection> {
        let mut u: Vec<usize> = u_set.to_vec();
        let mut v: Vec<usize> = v_set.to_vec();
        u.sort_unstable();
        u.dedup();
        v.sort_unstable();
        v.dedup();
        if let Some(&x) = u.last() {
            self.check_index(Side::U, x)?;
        }
        if let Some(&x) = v.last() {
            self.check_index(Side::V, x)?;
        }
        let mask = bitset_of(self.v_count(), &v);
        let edges = u
            .iter()
            .map(|&x| self.rows[x].intersection_count(&mask) as u64)
            .sum();
        Ok(Selection {
            u_set: u,
            v_set: v,
            edges,
        })
    }

    /// Whole graph as a selection.
    pub fn full_selection(&self) -> Selection {
        Selection {
            u_set: (0..self.u_count()).collect(),
            v_set: (0..self.v_count()).collect(),
            edges: self.edge_count as u64,
        }
    }

    /// Reads a file, choosing the parser from the extension (`.net`/`.paj`
    /// are Pajek) or from a leading `*Vertices` line.
    pub fn load_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        if ext == "net" || ext == "paj" || looks_like_pajek(&text) {
            load_pajek_two_mode(&text)
        } else {
            load_edge_list(&text)
        }
    }
}

pub(crate) fn bitset_of(len: usize, members: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(len);
    for &m in members {
        b.insert(m);
    }
    b
}

fn looks_like_pajek(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%'))
        .is_some_and(|l| l.to_ascii_lowercase().starts_with("*vertices"))
}

/// A pair of vertex subsets `(U', V')` with the edge count of the subgraph
/// they induce. Obtain one from [`BipartiteGraph::induced_stats`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Selection {
    u_set: Vec<usize>,
    v_set: Vec<usize>,
    edges: u64,
}

impl Selection {
    pub(crate) fn from_parts(u_set: Vec<usize>, v_set: Vec<usize>, edges: u64) -> Self {
        debug_assert!(u_set.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(v_set.windows(2).all(|w| w[0] < w[1]));
        Self { u_set, v_set, edges }
    }

    pub fn u_set(&self) -> &[usize] {
        &self.u_set
    }

    pub fn v_set(&self) -> &[usize] {
        &self.v_set
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    pub fn u_len(&self) -> usize {
        self.u_set.len()
    }

    pub fn v_len(&self) -> usize {
        self.v_set.len()
    }

    /// `|U'| + |V'|`.
    pub fn size(&self) -> usize {
        self.u_set.len() + self.v_set.len()
    }

    pub fn has_empty_side(&self) -> bool {
        self.u_set.is_empty() || self.v_set.is_empty()
    }

    pub fn density(&self) -> Result<Rational> {
        if self.has_empty_side() {
            return Err(Error::UndefinedDensity);
        }
        Ok(Ratio::new(
            self.edges,
            (self.u_set.len() * self.v_set.len()) as u64,
        ))
    }

    /// The same selection seen in the transposed graph.
    pub fn swapped(&self) -> Self {
        Self {
            u_set: self.v_set.clone(),
            v_set: self.u_set.clone(),
            edges: self.edges,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}) U'={:?} V'={:?} edges={}",
            self.u_len(),
            self.v_len(),
            self.u_set,
            self.v_set,
            self.edges
        )
    }
}

#[derive(Clone, Copy)]
enum Separator {
    Tab,
    Comma,
    Whitespace,
}

/// Parses an edge list: one `u <sep> v` pair per line, `#` comments.
///
/// The separator (tab, comma or runs of spaces) is detected from the first
/// data line and applies to the whole file. If every id is a nonnegative
/// integer the ids are used as 0-based indices; otherwise each column is
/// mapped to dense indices in order of first appearance and the ids are kept
/// as labels.
pub fn load_edge_list(text: &str) -> Result<BipartiteGraph> {
    let mut sep = None;
    let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let sep = *sep.get_or_insert_with(|| {
            if line.contains('\t') {
                Separator::Tab
            } else if line.contains(',') {
                Separator::Comma
            } else {
                Separator::Whitespace
            }
        });
        let fields: Vec<&str> = match sep {
            Separator::Tab => line.split('\t').map(str::trim).collect(),
            Separator::Comma => line.split(',').map(str::trim).collect(),
            Separator::Whitespace => line.split_whitespace().collect(),
        };
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(
                line_no,
                format!("expected two vertex ids, found `{}`", line.trim()),
            ));
        }
        for f in &fields {
            if let Ok(n) = f.parse::<i64>() {
                if n < 0 {
                    return Err(Error::parse(line_no, format!("negative vertex id {n}")));
                }
            }
        }
        pairs.push((line_no, fields[0], fields[1]));
    }

    let numeric: Option<Vec<(usize, usize)>> = pairs
        .iter()
        .map(|(_, a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
        .collect();
    if let Some(edges) = numeric {
        let u_count = edges.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let v_count = edges.iter().map(|e| e.1 + 1).max().unwrap_or(0);
        return BipartiteGraph::from_edges(u_count, v_count, edges);
    }

    let mut u_index: HashMap<&str, usize> = HashMap::new();
    let mut v_index: HashMap<&str, usize> = HashMap::new();
    let mut u_labels = Vec::new();
    let mut v_labels = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for (_, a, b) in &pairs {
        let u = *u_index.entry(a).or_insert_with(|| {
            u_labels.push(a.to_string());
            u_labels.len() - 1
        });
        let v = *v_index.entry(b).or_insert_with(|| {
            v_labels.push(b.to_string());
            v_labels.len() - 1
        });
        edges.push((u, v));
    }
    BipartiteGraph::from_edges(u_labels.len(), v_labels.len(), edges)?.with_labels(u_labels, v_labels)
}

/// Parses a Pajek two-mode network.
///
/// The header `*Vertices N M` declares vertices `1..=M` as the first mode
/// (mapped to U) and `M+1..=N` as the second (mapped to V). Edges come from
/// `*Edges` or `*Arcs` sections; a third weight column is ignored.
pub fn load_pajek_two_mode(text: &str) -> Result<BipartiteGraph> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Vertices,
        Edges,
        Other,
    }

    let mut counts: Option<(usize, usize)> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut edges = Vec::new();
    let mut section = Section::Preamble;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('*') {
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().unwrap_or("").to_ascii_lowercase();
            match keyword.as_str() {
                "*vertices" => {
                    let n: usize = parse_field(tokens.next(), line_no, "vertex count")?;
                    let m = match tokens.next() {
                        Some(t) => t
                            .parse::<usize>()
                            .map_err(|_| Error::parse(line_no, "invalid first-mode size"))?,
                        None => {
                            return Err(Error::Format(
                                "`*Vertices` header lacks the first-mode size; not a two-mode network".into(),
                            ))
                        }
                    };
                    if m > n {
                        return Err(Error::Format(format!(
                            "first-mode size {m} exceeds vertex count {n}"
                        )));
                    }
                    counts = Some((n, m));
                    labels = vec![None; n];
                    section = Section::Vertices;
                }
                "*edges" | "*arcs" => {
                    if counts.is_none() {
                        return Err(Error::Format("missing `*Vertices N M` header".into()));
                    }
                    section = Section::Edges;
                }
                "*network" => {}
                _ => section = Section::Other,
            }
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(Error::Format("missing `*Vertices N M` header".into()));
            }
            Section::Vertices => {
                let (n, _) = counts.expect("set with section");
                let (id, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
                let id: usize = id
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("invalid vertex id `{id}`")))?;
                if id == 0 || id > n {
                    return Err(Error::parse(line_no, format!("vertex id {id} out of 1..={n}")));
                }
                labels[id - 1] = Some(pajek_label(rest));
            }
            Section::Edges => {
                let (n, m) = counts.expect("set with section");
                let mut tokens = line.split_whitespace();
                let a: usize = parse_field(tokens.next(), line_no, "edge endpoint")?;
                let b: usize = parse_field(tokens.next(), line_no, "edge endpoint")?;
                for x in [a, b] {
                    if x == 0 || x > n {
                        return Err(Error::parse(line_no, format!("edge endpoint {x} out of 1..={n}")));
                    }
                }
                let (first, second) = match (a <= m, b <= m) {
                    (true, false) => (a, b),
                    (false, true) => (b, a),
                    _ => {
                        return Err(Error::Format(format!(
                            "line {line_no}: edge {a}-{b} joins two vertices of the same mode"
                        )))
                    }
                };
                edges.push((first - 1, second - m - 1));
            }
            Section::Other => {}
        }
    }

    let (n, m) = counts.ok_or_else(|| Error::Format("missing `*Vertices N M` header".into()))?;
    let mut names: Vec<String> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string()))
        .collect();
    let v_labels = names.split_off(m);
    BipartiteGraph::from_edges(m, n - m, edges)?.with_labels(names, v_labels)
}

fn parse_field(token: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let t = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    t.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{t}`")))
}

fn pajek_label(rest: &str) -> String {
    let rest = rest.trim();
    if let Some(stripped) = rest.strip_prefix('"') {
        match stripped.find('"') {
            Some(end) => stripped[..end].to_string(),
            None => stripped.to_string(),
        }
    } else {
        rest.split_whitespace().next().unwrap_or("").to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy;

    #[test]
    fn edge_list_integer_ids() {
        let g = load_edge_list("0 0\n0 1\n1 0").unwrap();
        assert_eq!((g.u_count(), g.v_count(), g.edge_count()), (2, 2, 3));
        assert!(!g.has_labels());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = load_edge_list("0 0\n0 0").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn separators_and_comments() {
        let g = load_edge_list("# header\n\na,x\nb , y\n").unwrap();
        assert_eq!((g.u_count(), g.v_count(), g.edge_count()), (2, 2, 2));
        assert_eq!(g.u_label(1), "b");
        let g = load_edge_list("Ann Smith\tE1\nBob\tE1\n").unwrap();
        assert_eq!(g.u_label(0), "Ann Smith");
        assert_eq!(g.v_count(), 1);
    }

    #[test]
    fn string_ids_in_first_appearance_order() {
        let g = load_edge_list("c z\na z\nc y\n").unwrap();
        assert_eq!(g.u_label(0), "c");
        assert_eq!(g.u_label(1), "a");
        assert_eq!(g.v_label(0), "z");
        assert_eq!(g.v_label(1), "y");
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        match load_edge_list("0 0\n1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load_edge_list("# c\n0 -1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_edge_list("0 1 2\n").is_err());
    }

    #[test]
    fn pajek_small() {
        let text = "*Vertices 3 1\n1 \"actor\"\n2 \"e1\"\n3 \"e2\"\n*Edges\n1 2\n3 1\n";
        let g = load_pajek_two_mode(text).unwrap();
        assert_eq!((g.u_count(), g.v_count(), g.edge_count()), (1, 2, 2));
        assert_eq!(g.u_label(0), "actor");
        assert_eq!(g.v_label(1), "e2");
    }

    #[test]
    fn pajek_same_mode_edge_is_rejected() {
        let text = "*Vertices 3 1\n*Edges\n2 3\n";
        assert!(matches!(load_pajek_two_mode(text), Err(Error::Format(_))));
    }

    #[test]
    fn pajek_missing_header() {
        assert!(matches!(
            load_pajek_two_mode("*Edges\n1 2\n"),
            Err(Error::Format(_))
        ));
        assert!(matches!(load_pajek_two_mode("1 2\n"), Err(Error::Format(_))));
        assert!(matches!(
            load_pajek_two_mode("*Vertices 3\n*Edges\n1 2\n"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn density_cases() {
        assert_eq!(
            BipartiteGraph::complete(2, 3).density().unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(
            BipartiteGraph::empty(2, 2).density().unwrap(),
            Ratio::from_integer(0)
        );
        assert!(matches!(
            BipartiteGraph::empty(0, 2).density(),
            Err(Error::UndefinedDensity)
        ));
    }

    #[test]
    fn induced_stats_cases() {
        let g = toy();
        let full = g.induced_stats(&[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(full.edges(), 8);
        assert_eq!(full.density().unwrap(), g.density().unwrap());
        let s = g.induced_stats(&[0, 1], &[0, 1, 2]).unwrap();
        assert_eq!(s.edges(), 6);
        assert_eq!(s.density().unwrap(), Ratio::from_integer(1));
        let s = g.induced_stats(&[], &[0]).unwrap();
        assert_eq!(s.edges(), 0);
        assert!(matches!(s.density(), Err(Error::UndefinedDensity)));
        assert!(g.induced_stats(&[3], &[0]).is_err());
    }

    #[test]
    fn degree_cases() {
        let k = BipartiteGraph::complete(2, 3);
        assert_eq!(k.degree(Side::U, 0).unwrap(), 3);
        assert_eq!(k.degree(Side::V, 2).unwrap(), 2);
        let g = toy();
        assert_eq!(g.restricted_degree(Side::U, 2, &[0, 1, 2]).unwrap(), 2);
        assert_eq!(g.restricted_degree(Side::U, 0, &[]).unwrap(), 0);
        assert!(g.degree(Side::U, 3).is_err());
        assert!(g.restricted_degree(Side::U, 0, &[7]).is_err());
    }

    #[test]
    fn transpose_swaps_sides() {
        let g = toy().transpose();
        assert!(!g.has_edge(2, 2));
        assert!(g.has_edge(2, 1));
        assert_eq!(g.edge_count(), 8);
    }
}
