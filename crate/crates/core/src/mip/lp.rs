//! CPLEX LP text format: writer and a reader for the writer's own dialect.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_rational::Ratio;

use crate::bounds::{EdgeRange, SizeBounds};
use crate::error::{Error, Result};
use crate::ratio::parse_rational;

use super::{
    Constraint, LinearObjective, Metadata, MipInstance, ModelKind, Relation, Sense, VarKind, Variable,
};

const WRAP: usize = 200;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Write bilinear terms in a bracketed quadratic section instead of
    /// rejecting the instance.
    pub allow_quadratic: bool,
}

/// Renders a number with 12 significant digits, shortest form.
pub(crate) fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.fract() == 0.0 && x.abs() < 1e12 {
        return format!("{}", x as i64);
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        let fixed = format!("{x:.decimals$}");
        let fixed = fixed.trim_end_matches('0').trim_end_matches('.');
        fixed.to_string()
    } else {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    }
}

struct Writer {
    out: String,
    line: usize,
}

impl Writer {
    fn token(&mut self, t: &str) {
        if self.line + t.len() + 1 > WRAP && self.line > 0 {
            self.out.push_str("\n  ");
            self.line = 2;
        } else {
            self.out.push(' ');
            self.line += 1;
        }
        self.out.push_str(t);
        self.line += t.len();
    }

    fn newline(&mut self) {
        self.out.push('\n');
        self.line = 0;
    }

    fn raw_line(&mut self, s: &str) {
        self.out.push_str(s);
        self.newline();
    }

    /// Writes `c x` terms with explicit signs, skipping zero coefficients.
    fn terms<'a>(&mut self, terms: impl Iterator<Item = (f64, &'a str)>) -> usize {
        let mut written = 0;
        for (c, name) in terms {
            if c == 0.0 {
                continue;
            }
            if c < 0.0 {
                self.token("-");
            } else if written > 0 {
                self.token("+");
            }
            if c.abs() != 1.0 {
                self.token(&fmt_num(c.abs()));
            }
            self.token(name);
            written += 1;
        }
        written
    }
}

fn header(meta: &Metadata) -> String {
    let b = &meta.bounds;
    let mut s = format!(
        "\\ qbc model={} gamma={} bounds={},{},{},{}",
        meta.model, meta.gamma, b.u_min, b.u_max, b.v_min, b.v_max
    );
    if let Some(t) = meta.theta {
        write!(s, " theta={t}").unwrap();
    }
    if let Some(r) = meta.edge_range {
        write!(s, " k={},{}", r.k_min, r.k_max).unwrap();
    }
    s
}

pub fn emit_lp(inst: &MipInstance) -> Result<String> {
    emit_lp_with(inst, EmitOptions::default())
}

/// Deterministic LP text. Every variable appears in the `Bounds` section in
/// construction order, which the reader uses to restore that order.
pub fn emit_lp_with(inst: &MipInstance, options: EmitOptions) -> Result<String> {
    if !inst.is_linear() && !options.allow_quadratic {
        return Err(Error::Unsupported(
            "instance has bilinear terms; use the linearized form or allow the quadratic section".into(),
        ));
    }
    let name = |i: usize| inst.variables[i].name.as_str();
    let mut w = Writer {
        out: String::new(),
        line: 0,
    };
    w.raw_line(&header(&inst.metadata));
    w.raw_line(match inst.objective.sense {
        Sense::Maximize => "Maximize",
        Sense::Minimize => "Minimize",
    });
    w.token("obj:");
    if w.terms(inst.objective.terms.iter().map(|&(c, i)| (c, name(i)))) == 0 {
        w.token("0");
    }
    w.newline();
    w.raw_line("Subject To");
    for c in &inst.constraints {
        w.token(&format!("{}:", c.name));
        let linear = w.terms(c.terms.iter().map(|&(k, i)| (k, name(i))));
        if !c.quadratic.is_empty() {
            if linear > 0 {
                w.token("+");
            }
            w.token("[");
            let mut first = true;
            for &(k, a, b) in &c.quadratic {
                if k == 0.0 {
                    continue;
                }
                if k < 0.0 {
                    w.token("-");
                } else if !first {
                    w.token("+");
                }
                if k.abs() != 1.0 {
                    w.token(&fmt_num(k.abs()));
                }
                w.token(name(a));
                w.token("*");
                w.token(name(b));
                first = false;
            }
            w.token("]");
        } else if linear == 0 {
            w.token("0");
            w.token(name(0));
        }
        w.token(c.relation.symbol());
        w.token(&fmt_num(c.rhs));
        w.newline();
    }
    w.raw_line("Bounds");
    for v in &inst.variables {
        match v.upper {
            Some(up) => w.token(&format!("{} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(up))),
            None => w.token(&format!("{} >= {}", v.name, fmt_num(v.lower))),
        }
        w.newline();
    }
    for (section, kind) in [("Binary", VarKind::Binary), ("General", VarKind::Integer)] {
        let vars: Vec<&Variable> = inst.variables.iter().filter(|v| v.kind == kind).collect();
        if vars.is_empty() {
            continue;
        }
        w.raw_line(section);
        for v in vars {
            w.token(&v.name);
        }
        w.newline();
    }
    w.raw_line("End");
    Ok(w.out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    General,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "maximize" | "maximum" | "max" | "minimize" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "general" | "generals" | "gen" => Some(Section::General),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_header(line: &str) -> Result<Metadata> {
    let mut model = None;
    let mut gamma = None;
    let mut bounds = None;
    let mut theta = None;
    let mut edge_range = None;
    let nums = |v: &str| -> Result<Vec<u64>> {
        v.split(',')
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::Format(format!("bad number list `{v}`")))
            })
            .collect()
    };
    for field in line.split_whitespace().skip(2) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field `{field}`")))?;
        match key {
            "model" => model = Some(value.parse::<ModelKind>()?),
            "gamma" => gamma = Some(parse_rational(value)?),
            "theta" => theta = Some(parse_rational(value)?),
            "bounds" => {
                let b = nums(value)?;
                if b.len() != 4 {
                    return Err(Error::Format("bounds needs four numbers".into()));
                }
                let b: Vec<usize> = b.into_iter().map(|x| x as usize).collect();
                bounds = Some(SizeBounds::new(b[0], b[1], b[2], b[3]));
            }
            "k" => {
                let k = nums(value)?;
                if k.len() != 2 {
                    return Err(Error::Format("k needs two numbers".into()));
                }
                edge_range = Some(EdgeRange {
                    k_min: k[0],
                    k_max: k[1],
                });
            }
            _ => return Err(Error::Format(format!("unknown header field `{key}`"))),
        }
    }
    Ok(Metadata {
        model: model.ok_or_else(|| Error::Format("header lacks model".into()))?,
        gamma: gamma.unwrap_or(Ratio::from_integer(1)),
        bounds: bounds.ok_or_else(|| Error::Format("header lacks bounds".into()))?,
        theta,
        edge_range,
    })
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|t| t.1)
    }

    fn line(&self) -> usize {
        self.items.get(self.pos).or(self.items.last()).map_or(0, |t| t.0)
    }

    fn next(&mut self) -> Result<&'a str> {
        let t = self
            .peek()
            .ok_or_else(|| Error::parse(self.line(), "unexpected end of section"))?;
        self.pos += 1;
        Ok(t)
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a number, found `{tok}`")))
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

struct Reader {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Reader {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.variables.len();
        self.index.insert(name.to_string(), i);
        self.variables.push(Variable {
            name: name.to_string(),
            kind: VarKind::Continuous,
            lower: 0.0,
            upper: None,
        });
        i
    }

    /// Reads signed terms until a relation, `]` or the end of the tokens.
    #[allow(clippy::type_complexity)]
    fn expression(&mut self, t: &mut Tokens<'_>) -> Result<(Vec<(f64, usize)>, Vec<(f64, usize, usize)>)> {
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        let mut in_bracket = false;
        loop {
            let Some(tok) = t.peek() else { break };
            if matches!(tok, "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>") {
                break;
            }
            if tok == "[" {
                t.next()?;
                in_bracket = true;
                continue;
            }
            if tok == "]" {
                t.next()?;
                in_bracket = false;
                continue;
            }
            let mut sign = 1.0;
            while let Some(s @ ("+" | "-")) = t.peek() {
                if s == "-" {
                    sign = -sign;
                }
                t.next()?;
            }
            if t.peek() == Some("[") {
                continue;
            }
            let line = t.line();
            let mut coef = 1.0;
            let mut tok = t.next()?;
            if is_number(tok) {
                coef = number(tok, line)?;
                if matches!(t.peek(), None | Some("<=" | ">=" | "=" | "]")) {
                    // A bare constant on the left, as in `0 x` placeholders.
                    if coef != 0.0 {
                        return Err(Error::parse(line, "constant terms are not supported"));
                    }
                    continue;
                }
                tok = t.next()?;
            }
            let a = self.var(tok);
            if in_bracket && t.peek() == Some("*") {
                t.next()?;
                let b = self.var(t.next()?);
                quadratic.push((sign * coef, a, b));
            } else if coef != 0.0 {
                linear.push((sign * coef, a));
            }
        }
        Ok((linear, quadratic))
    }
}

fn relation(tok: &str, line: usize) -> Result<Relation> {
    match tok {
        "<=" | "<" | "=<" => Ok(Relation::Le),
        ">=" | ">" | "=>" => Ok(Relation::Ge),
        "=" => Ok(Relation::Eq),
        other => Err(Error::parse(
            line,
            format!("expected a relation, found `{other}`"),
        )),
    }
}

/// Parses LP text produced by [`emit_lp`]. The `\ qbc` header comment
/// carries the metadata and is required.
pub fn parse_lp(text: &str) -> Result<MipInstance> {
    let mut meta = None;
    let mut sense = Sense::Maximize;
    let mut section = Section::Preamble;
    let mut buckets: HashMap<&'static str, Vec<(usize, &str)>> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.starts_with("\\ qbc ") {
            meta = Some(parse_header(line)?);
            continue;
        }
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        if let Some(s) = section_of(line) {
            if s == Section::Objective {
                sense = if line.to_ascii_lowercase().starts_with("max") {
                    Sense::Maximize
                } else {
                    Sense::Minimize
                };
            }
            section = s;
            continue;
        }
        let key = match section {
            Section::Objective => "obj",
            Section::Constraints => "st",
            Section::Bounds => {
                buckets.entry("bounds_lines").or_default().push((line_no, line));
                continue;
            }
            Section::Binary => "bin",
            Section::General => "gen",
            Section::Preamble | Section::End => {
                return Err(Error::parse(line_no, "text outside of any section"));
            }
        };
        let bucket = buckets.entry(key).or_default();
        bucket.extend(line.split_whitespace().map(|t| (line_no, t)));
    }
    let meta = meta.ok_or_else(|| Error::Format("missing `\\ qbc` header line".into()))?;
    let mut reader = Reader {
        variables: Vec::new(),
        index: HashMap::new(),
    };
    let mut take = |k: &str| Tokens {
        items: buckets.remove(k).unwrap_or_default(),
        pos: 0,
    };

    // Bounds first: they fix the variable order.
    let bound_lines = take("bounds_lines");
    let mut bounds_seen = HashSet::new();
    for &(line_no, line) in &bound_lines.items {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [lo, "<=", name, "<=", up] => {
                let i = reader.var(name);
                reader.variables[i].lower = number(lo, line_no)?;
                reader.variables[i].upper = Some(number(up, line_no)?);
                bounds_seen.insert(i);
            }
            [name, ">=", lo] => {
                let i = reader.var(name);
                reader.variables[i].lower = number(lo, line_no)?;
                bounds_seen.insert(i);
            }
            [name, "<=", up] => {
                let i = reader.var(name);
                reader.variables[i].upper = Some(number(up, line_no)?);
            }
            _ => return Err(Error::parse(line_no, format!("unsupported bound `{line}`"))),
        }
    }

    let mut obj = take("obj");
    match obj.next()? {
        "obj:" => {}
        other => {
            return Err(Error::parse(
                obj.line(),
                format!("expected `obj:`, found `{other}`"),
            ))
        }
    }
    let (terms, quad) = reader.expression(&mut obj)?;
    if !quad.is_empty() || !obj.done() {
        return Err(Error::parse(obj.line(), "objective must be linear"));
    }
    let objective = LinearObjective { sense, terms };

    let mut st = take("st");
    let mut constraints = Vec::new();
    while !st.done() {
        let line = st.line();
        let name = st
            .next()?
            .strip_suffix(':')
            .ok_or_else(|| Error::parse(line, "constraint without a name"))?
            .to_string();
        let (terms, quadratic) = reader.expression(&mut st)?;
        let rel = relation(st.next()?, line)?;
        let rhs = number(st.next()?, line)?;
        constraints.push(Constraint {
            name,
            terms,
            quadratic,
            relation: rel,
            rhs,
        });
    }

    for (key, kind) in [("bin", VarKind::Binary), ("gen", VarKind::Integer)] {
        let list = take(key);
        for &(_, name) in &list.items {
            let i = reader.var(name);
            reader.variables[i].kind = kind;
            if kind == VarKind::Binary && !bounds_seen.contains(&i) {
                reader.variables[i].upper = Some(1.0);
            }
        }
    }

    let mut inst = MipInstance {
        variables: reader.variables,
        constraints,
        objective,
        metadata: meta,
        index: HashMap::new(),
    };
    inst.rebuild_index();
    Ok(inst)
}

/// Equal up to a relative tolerance on every coefficient.
pub fn approx_equal(a: &MipInstance, b: &MipInstance, rel: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0);
    let terms_eq = |x: &[(f64, usize)], y: &[(f64, usize)]| {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.1 == q.1 && close(p.0, q.0))
    };
    let nonzero = |t: &[(f64, usize)]| t.iter().copied().filter(|p| p.0 != 0.0).collect::<Vec<_>>();
    a.metadata == b.metadata
        && a.variables.len() == b.variables.len()
        && a.variables
            .iter()
            .zip(&b.variables)
            .all(|(x, y)| x.name == y.name && x.kind == y.kind && x.lower == y.lower && x.upper == y.upper)
        && a.objective.sense == b.objective.sense
        && terms_eq(&nonzero(&a.objective.terms), &nonzero(&b.objective.terms))
        && a.constraints.len() == b.constraints.len()
        && a.constraints.iter().zip(&b.constraints).all(|(x, y)| {
            x.name == y.name
                && x.relation == y.relation
                && close(x.rhs, y.rhs)
                && terms_eq(&nonzero(&x.terms), &nonzero(&y.terms))
                && x.quadratic.len() == y.quadratic.len()
                && x.quadratic
                    .iter()
                    .zip(&y.quadratic)
                    .all(|(p, q)| p.1 == q.1 && p.2 == q.2 && close(p.0, q.0))
        })
}
