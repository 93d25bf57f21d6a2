//! Line-oriented text form of a series.
//!
//! ```text
//! #qseries D=2 N=10
//! -1/2	1/1
//! 3/2	-5/3
//! ```
//!
//! Each data line is `scaled_exponent/D<TAB>numerator/denominator`, sorted
//! by exponent.

use std::fmt::Write;

use super::QSeries;
use crate::error::{Error, Result};
use crate::rat::Rat;

impl QSeries {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#qseries D={} N={}\n", self.denom, self.trunc);
        for (e, c) in &self.terms {
            let _ = writeln!(out, "{}/{}\t{}", e, self.denom, c.to_fraction_string());
        }
        out
    }
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::InvalidArgument(format!("tsv line {line}: {}", msg.into()))
}

pub fn parse_tsv(text: &str) -> Result<QSeries> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let rest = header
        .trim()
        .strip_prefix("#qseries")
        .ok_or_else(|| bad(1, "header must start with #qseries"))?;
    let (mut d, mut n) = (None, None);
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("D=") {
            d = v.parse::<i64>().ok();
        } else if let Some(v) = field.strip_prefix("N=") {
            n = v.parse::<i64>().ok();
        }
    }
    let d = d.filter(|d| *d >= 1).ok_or_else(|| bad(1, "missing or invalid D"))?;
    let n = n.ok_or_else(|| bad(1, "missing or invalid N"))?;
    let mut terms = Vec::new();
    let mut prev: Option<i64> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        let (exp, coeff) = line.split_once('\t').ok_or_else(|| bad(lineno, "expected a tab separator"))?;
        let (num, den) = exp.trim().split_once('/').ok_or_else(|| bad(lineno, "exponent must be e/D"))?;
        let e: i64 = num.parse().map_err(|_| bad(lineno, "bad exponent"))?;
        if den.parse::<i64>().ok() != Some(d) {
            return Err(bad(lineno, format!("exponent denominator must be {d}")));
        }
        if e > n {
            return Err(bad(lineno, "exponent above N"));
        }
        if prev.is_some_and(|p| p >= e) {
            return Err(bad(lineno, "exponents must be strictly increasing"));
        }
        prev = Some(e);
        let c: Rat = coeff.trim().parse().map_err(|_| bad(lineno, "bad coefficient"))?;
        if c.is_zero() {
            return Err(bad(lineno, "zero coefficient"));
        }
        terms.push((e, c));
    }
    Ok(QSeries::from_sorted_unchecked(d, n, terms))
}
