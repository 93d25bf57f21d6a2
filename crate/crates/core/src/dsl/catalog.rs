//! Identity records and their verification.
//!
//! A catalog file is a list of records:
//!
//! ```text
//! # comment
//! [identity rr.1]
//! tag    = "Rogers-Ramanujan, first"
//! order  = 60
//! params = s in {0, 1}
//! lhs    = sum(n >= 0; expo = n^2 + s*n; den = poch(q;q;n))
//! rhs    = J(5)/J(1+s, 5)
//! ```
//!
//! Lines starting with whitespace continue the previous field.

use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use super::ast::{Expr, SExpr};
use super::eval::{eval_expr_with, EvalOptions};
use super::parser::{parse_expr_at, parse_param_grid};
use super::poly::{eval_const, Bindings};
use super::ParseError;
use crate::error::Result;
use crate::exec::par_map;
use crate::rat::{fmt_rational64, parse_rational64};

const FIELDS: [&str; 5] = ["tag", "order", "params", "lhs", "rhs"];
pub const DEFAULT_ORDER: i64 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: String,
    pub tag: String,
    pub order: Rational64,
    pub params: Vec<(String, Vec<SExpr>)>,
    pub lhs: Expr,
    pub rhs: Expr,
    /// Line of the `[identity ...]` header.
    pub line: usize,
}

/// One parameter assignment, in declaration order.
pub type Point = Vec<(String, Rational64)>;

impl Identity {
    /// Cartesian product of the parameter values.
    pub fn grid(&self) -> Result<Vec<Point>> {
        let mut points: Vec<Point> = vec![Vec::new()];
        for (name, values) in &self.params {
            let vals = values.iter().map(|v| eval_const(v, &Bindings::new())).collect::<Result<Vec<_>>>()?;
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push((name.clone(), *v));
                        p
                    })
                })
                .collect();
        }
        Ok(points)
    }

    /// Same identity with a different parameter grid.
    pub fn with_params(&self, params: Vec<(String, Vec<SExpr>)>) -> Identity {
        Identity { params, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail { first_diff: Rational64 },
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub name: String,
    pub point: Point,
    pub order: Rational64,
    pub status: Status,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn format_point(p: &Point) -> String {
    if p.is_empty() {
        return "-".to_string();
    }
    p.iter().map(|(k, v)| format!("{k}={}", fmt_rational64(v))).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{word} {} {} order={}", self.name, format_point(&self.point), fmt_rational64(&self.order))?;
        match &self.status {
            Status::Pass => Ok(()),
            Status::Fail { first_diff } => write!(f, " first_diff={}", fmt_rational64(first_diff)),
            Status::Error(e) => write!(f, " error=\"{}\"", e.replace('"', "'")),
        }
    }
}

struct Field {
    key: String,
    value: String,
    line: usize,
    col: usize,
}

fn unquote(f: &Field) -> std::result::Result<String, ParseError> {
    let v = f.value.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') && !v[1..v.len() - 1].contains('"') {
        Ok(v[1..v.len() - 1].to_string())
    } else {
        Err(ParseError::new(f.line, f.col, "expected a quoted string").expecting(&["\""]))
    }
}

fn build(name: String, line: usize, fields: Vec<Field>) -> std::result::Result<Identity, ParseError> {
    let mut tag = None;
    let mut order = None;
    let mut params = Vec::new();
    let (mut lhs, mut rhs) = (None, None);
    for f in &fields {
        if fields.iter().filter(|g| g.key == f.key).count() > 1 {
            return Err(ParseError::new(f.line, 1, format!("field `{}` given twice in `{name}`", f.key)));
        }
        match f.key.as_str() {
            "tag" => tag = Some(unquote(f)?),
            "order" => {
                let n = parse_rational64(f.value.trim()).ok().filter(|n| *n >= Rational64::zero());
                order = Some(n.ok_or_else(|| {
                    ParseError::new(f.line, f.col, "order must be a nonnegative rational").expecting(&["rational"])
                })?);
            }
            "params" => params = parse_param_grid(&f.value, f.line, f.col)?,
            "lhs" => lhs = Some(parse_expr_at(&f.value, f.line, f.col)?),
            "rhs" => rhs = Some(parse_expr_at(&f.value, f.line, f.col)?),
            _ => unreachable!("keys are checked when read"),
        }
    }
    let missing = |what: &str| ParseError::new(line, 1, format!("identity `{name}` has no `{what}` field")).expecting(&[what]);
    Ok(Identity {
        tag: tag.unwrap_or_default(),
        order: order.unwrap_or(Rational64::from_integer(DEFAULT_ORDER)),
        params,
        lhs: lhs.ok_or_else(|| missing("lhs"))?,
        rhs: rhs.ok_or_else(|| missing("rhs"))?,
        name,
        line,
    })
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || "._-".contains(c))
}

pub fn parse_catalog(src: &str) -> std::result::Result<Vec<Identity>, ParseError> {
    let mut out: Vec<Identity> = Vec::new();
    let mut current: Option<(String, usize, Vec<Field>)> = None;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = match raw.find('#') {
            Some(k) if raw[..k].matches('"').count() % 2 == 0 => &raw[..k],
            _ => raw,
        };
        if text.trim().is_empty() {
            continue;
        }
        if text.starts_with(char::is_whitespace) {
            match current.as_mut().and_then(|c| c.2.last_mut()) {
                Some(f) => {
                    f.value.push('\n');
                    f.value.push_str(text);
                    continue;
                }
                None => return Err(ParseError::new(line, 1, "continuation line outside a field")),
            }
        }
        if let Some(rest) = text.trim_end().strip_prefix('[') {
            let head = rest.strip_suffix(']').and_then(|r| r.trim().strip_prefix("identity "));
            let name = match head.map(str::trim) {
                Some(n) if valid_name(n) => n.to_string(),
                _ => return Err(ParseError::new(line, 1, "malformed record header").expecting(&["[identity NAME]"])),
            };
            if out.iter().any(|e| e.name == name) || current.as_ref().is_some_and(|c| c.0 == name) {
                return Err(ParseError::new(line, 2, format!("duplicate identity name `{name}`")));
            }
            if let Some((n, l, fs)) = current.take() {
                out.push(build(n, l, fs)?);
            }
            current = Some((name, line, Vec::new()));
            continue;
        }
        let Some((_, _, fields)) = current.as_mut() else {
            return Err(ParseError::new(line, 1, "field outside a record").expecting(&["[identity NAME]"]));
        };
        let Some(eq) = text.find('=') else {
            return Err(ParseError::new(line, text.len() + 1, "expected `key = value`").expecting(&["="]));
        };
        let key = text[..eq].trim();
        if !FIELDS.contains(&key) {
            return Err(ParseError::new(line, 1, format!("unknown field `{key}`")).expecting(&FIELDS));
        }
        let value = &text[eq + 1..];
        let col = eq + 2;
        fields.push(Field { key: key.to_string(), value: value.to_string(), line, col });
    }
    if let Some((n, l, fs)) = current.take() {
        out.push(build(n, l, fs)?);
    }
    Ok(out)
}

/// Prints a record back in catalog syntax.
pub fn format_identity(e: &Identity) -> String {
    let mut s = format!("[identity {}]\n", e.name);
    if !e.tag.is_empty() {
        s += &format!("tag = \"{}\"\n", e.tag);
    }
    s += &format!("order = {}\n", fmt_rational64(&e.order));
    if !e.params.is_empty() {
        let groups: Vec<String> = e
            .params
            .iter()
            .map(|(n, vs)| format!("{n} in {{{}}}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        s += &format!("params = {}\n", groups.join("; "));
    }
    s += &format!("lhs = {}\nrhs = {}\n", e.lhs, e.rhs);
    s
}

/// Compares both sides at one parameter point.
pub fn check_point(e: &Identity, point: &Point, order: Rational64, opts: &EvalOptions) -> Outcome {
    let b: Bindings = point.iter().cloned().collect();
    let n = order;
    let status = (|| -> Result<Status> {
        let l = eval_expr_with(&e.lhs, &b, n, opts)?;
        let r = eval_expr_with(&e.rhs, &b, n, opts)?;
        Ok(match l.first_difference(&r, n)? {
            None => Status::Pass,
            Some(d) => Status::Fail { first_diff: d },
        })
    })()
    .unwrap_or_else(|err| Status::Error(err.to_string()));
    Outcome { name: e.name.clone(), point: point.clone(), order, status }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Overrides every record's own order.
    pub order: Option<Rational64>,
    pub jobs: usize,
    pub eval: EvalOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { order: None, jobs: 1, eval: EvalOptions::default() }
    }
}

/// Checks every grid point of every record. Grid points are independent
/// work items, so a failing or erroring point never stops the batch, and
/// the outcome order does not depend on `jobs`.
pub fn verify_all(entries: &[Identity], opts: &VerifyOptions) -> Vec<Outcome> {
    let mut tasks = Vec::new();
    let mut early = Vec::new();
    for (k, e) in entries.iter().enumerate() {
        let order = opts.order.unwrap_or(e.order);
        match e.grid() {
            Ok(points) => tasks.extend(points.into_iter().map(|p| (k, p, order))),
            Err(err) => early.push((
                k,
                Outcome { name: e.name.clone(), point: Vec::new(), order, status: Status::Error(err.to_string()) },
            )),
        }
    }
    let mut done: Vec<(usize, Outcome)> =
        par_map(&tasks, opts.jobs, |(k, p, order)| (*k, check_point(&entries[*k], p, *order, &opts.eval)));
    done.extend(early);
    done.sort_by_key(|(k, _)| *k);
    done.into_iter().map(|(_, o)| o).collect()
}

pub fn verify_identity(e: &Identity, opts: &VerifyOptions) -> Vec<Outcome> {
    verify_all(std::slice::from_ref(e), opts)
}

/// Full report: a `# name [tag]` line before each record's results and a
/// closing summary.
pub fn format_report(entries: &[Identity], outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    let mut last: Option<&str> = None;
    for o in outcomes {
        if last != Some(o.name.as_str()) {
            let tag = entries.iter().find(|e| e.name == o.name).map(|e| e.tag.as_str()).unwrap_or("");
            s += &format!("# {} [{}]\n", o.name, tag);
            last = Some(o.name.as_str());
        }
        s += &format!("{o}\n");
    }
    let pass = outcomes.iter().filter(|o| o.passed()).count();
    let errors = outcomes.iter().filter(|o| matches!(o.status, Status::Error(_))).count();
    s += &format!(
        "# {pass} passed, {} failed, {errors} errors; exact coefficient comparison to the stated order at the listed parameter values only\n",
        outcomes.len() - pass - errors
    );
    s
}

/// Catalog files compiled into the library, by file name.
pub const SHIPPED: [(&str, &str); 5] = [
    ("classical.qcat", include_str!("../../catalog/classical.qcat")),
    ("multisum.qcat", include_str!("../../catalog/multisum.qcat")),
    ("bailey.qcat", include_str!("../../catalog/bailey.qcat")),
    ("examples.qcat", include_str!("../../catalog/examples.qcat")),
    ("splits.qcat", include_str!("../../catalog/splits.qcat")),
];

/// Every shipped record, in file order.
pub fn shipped_catalog() -> Vec<Identity> {
    SHIPPED
        .iter()
        .flat_map(|(file, src)| parse_catalog(src).unwrap_or_else(|e| panic!("shipped catalog {file}: {e}")))
        .collect()
}
