use std::path::PathBuf;
use std::process::{Command, Output};

use nahm_core::dsl::{eval_expr, parse_expr, Bindings};
use nahm_core::series::parse_tsv;
use num_rational::Rational64;

fn nahm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nahm")).args(args).output().expect("run nahm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nahm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn expand_pentagonal() {
    let o = nahm(&["expand", "--expr", "J(1)", "--order", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\t1/1\n1\t-1/1\n2\t-1/1\n5\t1/1\n");
}

#[test]
fn expand_fractional_exponent() {
    let o = nahm(&["expand", "--expr", "q^(-1/24)", "--order", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "-1/24\t1/1\n");
}

#[test]
fn expand_with_binding() {
    let o = nahm(&["expand", "--expr", "J(a, 5)", "--let", "a=2", "--order", "6"]);
    assert_eq!(stdout(&o), "0\t1/1\n2\t-1/1\n3\t-1/1\n");
}

#[test]
fn expand_tsv_reads_back() {
    let src = "sum(n >= 0; expo = n^2/2; den = poch(q;q;n))";
    let o = nahm(&["expand", "--expr", src, "--order", "20", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let back = parse_tsv(&stdout(&o)).unwrap();
    let direct = eval_expr(&parse_expr(src).unwrap(), &Bindings::new(), Rational64::from_integer(20)).unwrap();
    assert_eq!(back, direct);
}

#[test]
fn exit_codes() {
    let o = nahm(&["expand", "--expr", "poch(q;q;inf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:13"), "{}", stderr(&o));
    assert_eq!(nahm(&["expand", "--expr", "1/poch(1;q;inf)"]).status.code(), Some(3));
    assert_eq!(nahm(&["expand", "--expr", "J(1)", "--order", "x"]).status.code(), Some(2));
    assert_eq!(nahm(&["frobnicate"]).status.code(), Some(2));
    let missing = nahm(&["verify", "/definitely/not/here.qcat"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("here.qcat"));
}

#[test]
fn parse_failure_names_file_and_line() {
    let p = scratch("broken.qcat", "[identity x]\nlhs = poch(q;q;\nrhs = 1\n");
    let o = nahm(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&format!("{}:2:", p.display())), "{}", stderr(&o));
}

#[test]
fn shipped_catalog_passes() {
    let o = nahm(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(!out.lines().any(|l| l.starts_with("FAIL") || l.starts_with("ERROR")));
    assert!(out.lines().last().unwrap().contains(" 0 failed, 0 errors"));
}

#[test]
fn quick_mode() {
    let o = nahm(&["verify", "--order", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("order=5")));
}

#[test]
fn corrupted_entry_is_isolated() {
    let cat = "[identity good]
order = 30
lhs = sum(n >= 0; expo = n^2; den = poch(q;q;n))
rhs = 1/(poch(q;q^5;inf)*poch(q^4;q^5;inf))

[identity bad]
order = 30
lhs = sum(n >= 0; expo = n^2 + n; den = poch(q;q;n))
rhs = 1/(poch(q^2;q^5;inf)*poch(q^3;q^5;inf)) + q^9

[identity also-good]
order = 30
params = d in {0, 2}
lhs = sum(j, k >= 0; expo = j*k; den = poch(q;q;j)*poch(q;q;k); constraint = j - k = d)
rhs = 1/J(1)
";
    let p = scratch("corrupt.qcat", cat);
    let o = nahm(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let fail: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fail, ["FAIL bad - order=30 first_diff=9"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    assert!(out.contains("# 3 passed, 1 failed, 0 errors"));

    let tsv = stdout(&nahm(&["verify", p.to_str().unwrap(), "--format", "tsv"]));
    assert!(tsv.lines().any(|l| l == "FAIL\tbad\t-\t30\tfirst_diff=9"), "{tsv}");
}

#[test]
fn reports_do_not_depend_on_jobs() {
    let runs: Vec<Vec<u8>> = ["1", "3", "8"].iter().map(|j| nahm(&["verify", "--jobs", j]).stdout).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let grid = ["search", "--matrix", "[[6,4,2],[4,4,2],[2,2,2]]", "--grid", "0..3 x 0..2 x 0..1", "--order", "40", "--maxk", "60"];
    let a = nahm(&[&grid[..], &["--jobs", "1"]].concat()).stdout;
    let b = nahm(&[&grid[..], &["--jobs", "6"]].concat()).stdout;
    assert_eq!(a, b);
}

#[test]
fn prodmake_rogers_ramanujan() {
    let o = nahm(&["prodmake", "--expr", "sum(n>=0; expo=n^2; den=poch(q;q;n))", "--maxk", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PERIODIC preperiod=0 period=5 pattern=(1,0,0,1,0)"));
}

#[test]
fn search_flags_four_vectors() {
    let o = nahm(&["search", "--matrix", "[[6,4,2],[4,4,2],[2,2,2]]", "--grid", "0..3 x 0..2 x 0..1", "--order", "40", "--maxk", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let flagged: Vec<&str> =
        out.lines().filter(|l| l.starts_with("CANDIDATE")).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(flagged, ["B=(0,0,0)", "B=(1,0,0)", "B=(2,1,0)", "B=(3,2,1)"]);
}

#[test]
fn inadmissible_search_is_not_an_error() {
    let o = nahm(&["search", "--matrix", "[[-1,0],[0,1]]", "--grid", "0..1 x 0", "--order", "10", "--maxk", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains("skipped")).count(), 2);
    assert!(out.contains("# 0 candidates among 2 vectors"));
}

#[test]
fn bailey_suite() {
    let o = nahm(&["bailey", "--order", "30", "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS") || l.starts_with('#')), "{out}");
    assert!(out.lines().filter(|l| l.contains("transformation")).count() >= 5);
    assert_eq!(nahm(&["bailey", "--pair", "pair-7"]).status.code(), Some(2));
}
