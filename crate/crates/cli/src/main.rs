use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use nahm_core::bailey::{bailey_lemma_sides, verify_bailey_pair, BaileyPair, PAIR_NAMES};
use nahm_core::dsl::{
    eval_expr_with, format_report, parse_catalog, parse_expr, shipped_catalog, verify_all, Bindings, EvalOptions,
    Identity, ParseError, Status, VerifyOptions,
};
use nahm_core::exec::default_jobs;
use nahm_core::prodmake::{analyze, format_pattern, normalize_unit, scan_vectors, ScanOptions, ScanVerdict, DEFAULT_MIN_REPEATS};
use nahm_core::rat::{fmt_rational64, parse_rational64};
use nahm_core::summation::SumOptions;
use nahm_core::{Error, QSeries};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EVAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "nahm", version, about = "Exact q-series expansion and identity verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Report,
    Tsv,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Truncation order N (exponents up to q^N are compared or printed).
    #[arg(long, value_parser = rational)]
    order: Option<Rational64>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Parameter binding `name=p/q`; repeatable.
    #[arg(long = "let", value_name = "NAME=VALUE", value_parser = binding)]
    lets: Vec<(String, Rational64)>,
    #[arg(long, value_enum, default_value = "report")]
    format: Format,
    /// How many times a summation box may double before giving up.
    #[arg(long, default_value_t = SumOptions::default().doubling_limit)]
    doubling_limit: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an expression and print its coefficients.
    Expand {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify catalog files (the shipped catalog when no file is given).
    Verify {
        files: Vec<std::path::PathBuf>,
        /// Restrict to records whose name starts with this prefix; repeatable.
        #[arg(long)]
        only: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Factor a series as prod (1-q^k)^(-c_k) and look for periodic exponents.
    Prodmake {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 60)]
        maxk: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scan linear terms B of a Nahm sum f_{A,B,0} for product candidates.
    Search {
        /// Matrix A, e.g. "[[6,4,2],[4,4,2],[2,2,2]]".
        #[arg(long)]
        matrix: String,
        /// Grid of B vectors, e.g. "0..3 x 0..2 x 0..1" or "0,1/2 x 1".
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 60)]
        maxk: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the built-in Bailey pairs and the transformations built on them.
    Bailey {
        /// One of pair-1, pair-2, pair-3; all pairs when omitted.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 12)]
        depth: i64,
        #[command(flatten)]
        common: Common,
    },
}

fn rational(s: &str) -> Result<Rational64, String> {
    parse_rational64(s).map_err(|e| format!("not a rational number: {e}"))
}

fn binding(s: &str) -> Result<(String, Rational64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| "expected NAME=VALUE".to_string())?;
    let k = k.trim();
    if k.is_empty() || !k.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(format!("bad parameter name `{k}`"));
    }
    Ok((k.to_string(), rational(v)?))
}

/// Failure carried to `main` with its exit code.
struct Exit {
    code: u8,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Exit {
        Exit { code: EXIT_USAGE, message: message.into() }
    }

    fn eval(e: Error) -> Exit {
        match e {
            Error::Parse(p) => Exit::usage(p.to_string()),
            e => Exit { code: EXIT_EVAL, message: e.to_string() },
        }
    }
}

fn parse_diagnostic(source: &str, text: &str, e: &ParseError) -> String {
    let mut s = format!("{source}:{e}");
    if let Some(line) = text.lines().nth(e.line.saturating_sub(1)) {
        s += &format!("\n  | {line}\n  | {}^", " ".repeat(e.col.saturating_sub(1)));
    }
    s
}

impl Common {
    fn order(&self, default: i64) -> Rational64 {
        self.order.unwrap_or_else(|| Rational64::from_integer(default))
    }

    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(default_jobs).max(1)
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions { sum: SumOptions { doubling_limit: self.doubling_limit, ..SumOptions::default() } }
    }

    fn bindings(&self) -> Bindings {
        self.lets.iter().cloned().collect()
    }

    fn check(&self) -> Result<(), Exit> {
        if self.order.is_some_and(|n| n <= Rational64::from_integer(0)) {
            return Err(Exit::usage("--order must be positive"));
        }
        if self.jobs == Some(0) {
            return Err(Exit::usage("--jobs must be at least 1"));
        }
        Ok(())
    }
}

fn expression(text: &str) -> Result<nahm_core::dsl::Expr, Exit> {
    parse_expr(text).map_err(|e| Exit::usage(parse_diagnostic("--expr", text, &e)))
}

fn series_lines(s: &QSeries) -> String {
    s.terms().map(|(e, c)| format!("{}\t{}\n", fmt_rational64(&e), c.to_fraction_string())).collect()
}

fn cmd_expand(expr: &str, c: &Common, out: &mut String) -> Result<u8, Exit> {
    let e = expression(expr)?;
    let s = eval_expr_with(&e, &c.bindings(), c.order(40), &c.eval_options()).map_err(Exit::eval)?;
    *out += &match c.format {
        Format::Tsv => s.to_tsv(),
        Format::Report => series_lines(&s),
    };
    Ok(0)
}

fn load_catalogs(files: &[std::path::PathBuf]) -> Result<Vec<Identity>, Exit> {
    if files.is_empty() {
        return Ok(shipped_catalog());
    }
    let mut all: Vec<Identity> = Vec::new();
    for f in files {
        let name = f.display().to_string();
        let text = std::fs::read_to_string(f).map_err(|e| Exit::usage(format!("{name}: {e}")))?;
        let entries = parse_catalog(&text).map_err(|e| Exit::usage(parse_diagnostic(&name, &text, &e)))?;
        for e in entries {
            if all.iter().any(|x| x.name == e.name) {
                return Err(Exit::usage(format!("{name}:{}: identity `{}` defined twice", e.line, e.name)));
            }
            all.push(e);
        }
    }
    Ok(all)
}

fn cmd_verify(files: &[std::path::PathBuf], only: &[String], c: &Common, out: &mut String) -> Result<u8, Exit> {
    let mut entries = load_catalogs(files)?;
    if !only.is_empty() {
        entries.retain(|e| only.iter().any(|p| e.name.starts_with(p.as_str())));
        if entries.is_empty() {
            return Err(Exit::usage("no identity matches --only"));
        }
    }
    if !c.lets.is_empty() {
        // --let pins a parameter to one value in every record that has it
        for e in entries.iter_mut() {
            let mut params = e.params.clone();
            for (k, v) in &c.lets {
                if let Some(slot) = params.iter_mut().find(|(n, _)| n == k) {
                    let r = nahm_core::dsl::SExpr::Div(
                        Box::new(nahm_core::dsl::SExpr::Num(*v.numer())),
                        Box::new(nahm_core::dsl::SExpr::Num(*v.denom())),
                    );
                    slot.1 = vec![r];
                }
            }
            *e = e.with_params(params);
        }
    }
    let opts = VerifyOptions { order: c.order, jobs: c.jobs(), eval: c.eval_options() };
    let outcomes = verify_all(&entries, &opts);
    match c.format {
        Format::Report => *out += &format_report(&entries, &outcomes),
        Format::Tsv => {
            *out += "status\tname\tbindings\torder\tdetail\n";
            for o in &outcomes {
                let (status, detail) = match &o.status {
                    Status::Pass => ("PASS", String::new()),
                    Status::Fail { first_diff } => ("FAIL", format!("first_diff={}", fmt_rational64(first_diff))),
                    Status::Error(e) => ("ERROR", e.clone()),
                };
                *out += &format!(
                    "{status}\t{}\t{}\t{}\t{detail}\n",
                    o.name,
                    nahm_core::dsl::format_point(&o.point),
                    fmt_rational64(&o.order)
                );
            }
        }
    }
    if outcomes.iter().any(|o| matches!(o.status, Status::Error(_))) {
        Ok(EXIT_EVAL)
    } else if outcomes.iter().all(|o| o.passed()) {
        Ok(0)
    } else {
        Ok(EXIT_FAIL)
    }
}

fn cmd_prodmake(expr: &str, k: usize, c: &Common, out: &mut String) -> Result<u8, Exit> {
    let e = expression(expr)?;
    let kk = Rational64::from_integer(k as i64);
    let mut order = c.order(0).max(kk);
    let (lead, v, g) = loop {
        let f = eval_expr_with(&e, &c.bindings(), order, &c.eval_options()).map_err(Exit::eval)?;
        let (lead, v, g) = normalize_unit(&f).map_err(Exit::eval)?;
        if g.order() >= kk {
            break (lead, v, g);
        }
        order += kk - g.order();
    };
    let p = analyze(&g, k, DEFAULT_MIN_REPEATS).map_err(Exit::eval)?;
    match c.format {
        Format::Report => {
            *out += &format!("# f = {lead} q^({}) prod_(k<={k}) (1-q^k)^(-c_k)\n", fmt_rational64(&v));
            for (i, ck) in p.c.iter().enumerate() {
                *out += &format!("c_{}={}\n", i + 1, ck);
            }
        }
        Format::Tsv => {
            *out += "k\tc_k\n";
            for (i, ck) in p.c.iter().enumerate() {
                *out += &format!("{}\t{}\n", i + 1, ck.to_fraction_string());
            }
        }
    }
    *out += &match &p.verdict {
        Some(per) => format!(
            "PERIODIC preperiod={} period={} pattern={}\n",
            per.preperiod,
            per.period,
            format_pattern(&per.pattern)
        ),
        None if !p.all_integer() => "NOT PERIODIC (non-integer exponents)\n".to_string(),
        None => "NOT PERIODIC\n".to_string(),
    };
    Ok(0)
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<Rational64>>, Exit> {
    let bad = || Exit::usage(format!("malformed matrix `{s}`; expected e.g. [[2,1],[1,2]]"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t.strip_prefix("[[").and_then(|x| x.strip_suffix("]]")).ok_or_else(bad)?;
    let rows = inner
        .split("],[")
        .map(|row| row.split(',').map(|x| parse_rational64(x).map_err(|_| bad())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Exit::usage(format!("matrix `{s}` is not square")));
    }
    Ok(rows)
}

/// `a..b` integer ranges or comma lists, joined by `x`.
fn parse_grid(s: &str) -> Result<Vec<Vec<Rational64>>, Exit> {
    let bad = |part: &str| Exit::usage(format!("malformed grid component `{part}`; expected `a..b` or `v1,v2,...`"));
    let mut axes = Vec::new();
    for part in s.split('x').map(str::trim) {
        let values: Vec<Rational64> = match part.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad(part))?;
                let b: i64 = b.trim().parse().map_err(|_| bad(part))?;
                (a..=b).map(Rational64::from_integer).collect()
            }
            None => part.split(',').map(|x| parse_rational64(x).map_err(|_| bad(part))).collect::<Result<_, _>>()?,
        };
        axes.push(values);
    }
    let mut points: Vec<Vec<Rational64>> = vec![Vec::new()];
    for axis in &axes {
        points = points
            .iter()
            .flat_map(|p| axis.iter().map(move |v| p.iter().copied().chain([*v]).collect()))
            .collect();
    }
    Ok(points)
}

fn cmd_search(matrix: &str, grid: &str, k: usize, c: &Common, out: &mut String) -> Result<u8, Exit> {
    let a = parse_matrix(matrix)?;
    let grid = parse_grid(grid)?;
    if let Some(p) = grid.iter().find(|p| p.len() != a.len()) {
        return Err(Exit::usage(format!("grid vectors have {} entries but the matrix has size {}", p.len(), a.len())));
    }
    let opts = ScanOptions {
        order: c.order(40),
        k,
        min_repeats: DEFAULT_MIN_REPEATS,
        jobs: c.jobs(),
        sum: c.eval_options().sum,
    };
    let results = scan_vectors(&a, &grid, &opts);
    for r in &results {
        match c.format {
            Format::Report => *out += &format!("{r}\n"),
            Format::Tsv => {
                if let ScanVerdict::Candidate(p) = &r.verdict {
                    *out += &format!(
                        "{}\t{}\t{}\t{}\n",
                        nahm_core::prodmake::format_vector(&r.b),
                        p.preperiod,
                        p.period,
                        format_pattern(&p.pattern)
                    );
                }
            }
        }
    }
    let n = results.iter().filter(|r| matches!(r.verdict, ScanVerdict::Candidate(_))).count();
    if c.format == Format::Report {
        *out += &format!("# {n} candidates among {} vectors; C not determined\n", results.len());
    }
    Ok(0)
}

fn cmd_bailey(pair: Option<&str>, depth: i64, c: &Common, out: &mut String) -> Result<u8, Exit> {
    let pairs = match pair {
        Some(name) => vec![BaileyPair::builtin(name)
            .ok_or_else(|| Exit::usage(format!("unknown pair `{name}`; known: {}", PAIR_NAMES.join(", "))))?],
        None => BaileyPair::registry(),
    };
    let order = c.order(60);
    let mut all_pass = true;
    let mut line = |ok: bool, what: String, diff: Option<Rational64>| {
        all_pass &= ok;
        let mut s = format!("{} {what} order={}", if ok { "PASS" } else { "FAIL" }, fmt_rational64(&order));
        if let Some(d) = diff {
            s += &format!(" first_diff={}", fmt_rational64(&d));
        }
        s + "\n"
    };
    for p in pairs {
        for base in [1, 2] {
            let q = p.clone().with_base(base).map_err(Exit::eval)?;
            let checks = verify_bailey_pair(&q, depth, order).map_err(Exit::eval)?;
            let bad = checks.iter().find(|x| !x.holds);
            *out += &line(bad.is_none(), format!("{} definition n=0..{depth}", q.label().replace(' ', "")), bad.and_then(|x| x.first_difference));
            for which in 1..=3u8 {
                match bailey_lemma_sides(&q, which, order) {
                    Ok((l, r)) => {
                        let d = l.first_difference(&r, order).map_err(Exit::eval)?;
                        *out += &line(d.is_none(), format!("{} transformation={which}", q.label().replace(' ', "")), d);
                    }
                    Err(Error::RelativityMismatch { .. }) => {}
                    Err(e) => return Err(Exit::eval(e)),
                }
            }
        }
    }
    Ok(if all_pass { 0 } else { EXIT_FAIL })
}

fn run(cli: Cli, out: &mut String) -> Result<u8, Exit> {
    match &cli.command {
        Command::Expand { expr, common } => {
            common.check()?;
            cmd_expand(expr, common, out)
        }
        Command::Verify { files, only, common } => {
            common.check()?;
            cmd_verify(files, only, common, out)
        }
        Command::Prodmake { expr, maxk, common } => {
            common.check()?;
            cmd_prodmake(expr, *maxk, common, out)
        }
        Command::Search { matrix, grid, maxk, common } => {
            common.check()?;
            cmd_search(matrix, grid, *maxk, common, out)
        }
        Command::Bailey { pair, depth, common } => {
            common.check()?;
            cmd_bailey(pair.as_deref(), *depth, common, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code)
}
