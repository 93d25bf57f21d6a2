//! Product factorization `f = prod_k (1 - q^k)^{-c_k}`, periodicity of the
//! exponents, and a scan over linear terms of a Nahm sum.

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::rat::{fmt_rational64, Rat};
use crate::series::QSeries;
use crate::summation::{multi_sum_with, NahmDatum, SumOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
    /// `c_{p+1}, ..., c_{p+m}`.
    pub pattern: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductExponents {
    /// `c[k-1] = c_k` for `k = 1..=K`.
    pub c: Vec<Rat>,
    pub verdict: Option<Periodicity>,
}

impl ProductExponents {
    pub fn all_integer(&self) -> bool {
        self.c.iter().all(Rat::is_integer)
    }
}

/// Splits `f = c q^v g` with `g` having constant term 1.
pub fn normalize_unit(f: &QSeries) -> Result<(Rat, Rational64, QSeries)> {
    let (v, c) = match f.leading() {
        Some((v, c)) => (v, c.clone()),
        None => return Err(Error::Prodmake("series vanishes to its known order".into())),
    };
    let g = f.shift(-v).scale(&c.recip()).reduce_denom();
    Ok((c, v, g))
}

/// Exponents `c_1..c_K` with `f = prod (1 - q^k)^{-c_k}` to order `K`.
///
/// Uses the logarithmic derivative: with `q f'/f = sum a_n q^n` one has
/// `n f_n = sum_{j=1}^n a_j f_{n-j}` and `a_n = sum_{d | n} d c_d`.
pub fn prodmake(f: &QSeries, k: usize) -> Result<Vec<Rat>> {
    if f.denom() != 1 {
        return Err(Error::Prodmake(format!("fractional exponents (denominator {})", f.denom())));
    }
    let kk = k as i64;
    if f.order() < Rational64::from_integer(kk) {
        return Err(Error::Prodmake(format!("series known only to order {}, need {k}", fmt_rational64(&f.order()))));
    }
    if f.valuation().is_some_and(|v| v < Rational64::zero()) || f.coefficient(Rational64::zero())? != Rat::ONE {
        return Err(Error::Prodmake("constant term must be 1".into()));
    }
    let mut fc = vec![Rat::ZERO; k + 1];
    for (e, c) in f.terms() {
        let e = e.to_integer();
        if e <= kk {
            fc[e as usize] = c.clone();
        }
    }
    let mut a = vec![Rat::ZERO; k + 1];
    let mut c = vec![Rat::ZERO; k + 1];
    for n in 1..=k {
        // a_n = n f_n - sum_{j<n} a_j f_{n-j}
        let mut an = &Rat::int(n as i64) * &fc[n];
        for j in 1..n {
            if !a[j].is_zero() && !fc[n - j].is_zero() {
                an -= &(&a[j] * &fc[n - j]);
            }
        }
        let mut rest = an.clone();
        for d in 1..n {
            if n % d == 0 && !c[d].is_zero() {
                rest -= &(&Rat::int(d as i64) * &c[d]);
            }
        }
        c[n] = &rest / &Rat::int(n as i64);
        a[n] = an;
    }
    c.remove(0);
    Ok(c)
}

/// Rebuilds `prod_{k <= K} (1 - q^k)^{-c_k}` for integer exponents.
pub fn product_from_exponents(c: &[Rat], order: i64) -> Result<QSeries> {
    let n = Rational64::from_integer(order);
    let mut acc = QSeries::one(n);
    for (i, ck) in c.iter().enumerate() {
        let e = ck.to_i64().ok_or_else(|| Error::Prodmake(format!("exponent c_{} = {ck} is not an integer", i + 1)))?;
        if e == 0 {
            continue;
        }
        let k = Rational64::from_integer(i as i64 + 1);
        let binom = QSeries::one(n).sub(&QSeries::monomial(Rat::ONE, k, n));
        acc = acc.mul(&binom.pow(-e)?);
    }
    Ok(acc)
}

/// Smallest preperiod, then smallest period, such that the tail of `c`
/// repeats at least `min_repeats` times. Periods above `K/5` and
/// preperiods above `K/2` are not considered, so a short window cannot pass
/// for a long period and a few trailing zeros do not count as a tail.
pub fn detect_period(c: &[Rat], min_repeats: usize) -> Option<Periodicity> {
    let k = c.len();
    let reps = min_repeats.max(1);
    let max_period = (k / 5).max(1);
    for p in 0..=k / 2 {
        for m in 1..=max_period {
            if k < p + reps * m {
                break;
            }
            if (p..k - m).all(|i| c[i] == c[i + m]) {
                return Some(Periodicity { preperiod: p, period: m, pattern: c[p..p + m].to_vec() });
            }
        }
    }
    None
}

pub const DEFAULT_MIN_REPEATS: usize = 3;

pub fn analyze(f: &QSeries, k: usize, min_repeats: usize) -> Result<ProductExponents> {
    let c = prodmake(f, k)?;
    let verdict = if c.iter().all(Rat::is_integer) { detect_period(&c, min_repeats) } else { None };
    Ok(ProductExponents { c, verdict })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanVerdict {
    Candidate(Periodicity),
    NotPeriodic,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub b: Vec<Rational64>,
    pub verdict: ScanVerdict,
}

pub fn format_vector(v: &[Rational64]) -> String {
    format!("({})", v.iter().map(fmt_rational64).collect::<Vec<_>>().join(","))
}

pub fn format_pattern(p: &[Rat]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

impl std::fmt::Display for ScanResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let b = format_vector(&self.b);
        match &self.verdict {
            ScanVerdict::Candidate(p) => write!(
                f,
                "CANDIDATE B={b} preperiod={} period={} pattern={}",
                p.preperiod,
                p.period,
                format_pattern(&p.pattern)
            ),
            ScanVerdict::NotPeriodic => write!(f, "# B={b} no periodic product"),
            ScanVerdict::Skipped(note) => write!(f, "# B={b} skipped: {note}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub order: Rational64,
    pub k: usize,
    pub min_repeats: usize,
    pub jobs: usize,
    pub sum: SumOptions,
}

/// For every `B`, expands `f_{A,B,0}`, factors it and reports whether the
/// exponents become periodic. `C` is not determined.
pub fn scan_vectors(a: &[Vec<Rational64>], grid: &[Vec<Rational64>], opts: &ScanOptions) -> Vec<ScanResult> {
    let order = opts.order.max(Rational64::from_integer(opts.k as i64));
    par_map(grid, opts.jobs, |b| {
        let verdict = (|| -> Result<ScanVerdict> {
            let d = NahmDatum { a: a.to_vec(), b: b.clone(), c: Rational64::zero() };
            if d.a.len() != d.rank() || d.a.iter().any(|r| r.len() != d.rank()) {
                return Err(Error::InvalidArgument("matrix and vector sizes differ".into()));
            }
            let f = multi_sum_with(&d.to_sum_spec(), order, &opts.sum)?;
            let (_, _, g) = normalize_unit(&f)?;
            let e = analyze(&g, opts.k, opts.min_repeats)?;
            Ok(match e.verdict {
                Some(p) => ScanVerdict::Candidate(p),
                None => ScanVerdict::NotPeriodic,
            })
        })();
        ScanResult { b: b.clone(), verdict: verdict.unwrap_or_else(|e| ScanVerdict::Skipped(e.to_string())) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{pochhammer_finite_inv, pochhammer_inf_inv};
    use crate::summation::multi_sum;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn ints(c: &[Rat]) -> Vec<i64> {
        c.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn geometric_series() {
        let f = pochhammer_finite_inv(1, r(1), r(1), 1, r(20)).unwrap();
        let c = prodmake(&f, 20).unwrap();
        assert_eq!(ints(&c)[..4], [1, 0, 0, 0]);
        assert!(c[1..].iter().all(Rat::is_zero));
        let p = detect_period(&c, 3).unwrap();
        assert_eq!((p.preperiod, p.period, ints(&p.pattern)), (1, 1, vec![0]));
    }

    #[test]
    fn rogers_ramanujan_sum() {
        let spec = NahmDatum { a: vec![vec![r(2)]], b: vec![r(0)], c: r(0) }.to_sum_spec();
        let f = multi_sum(&spec, r(30)).unwrap();
        let c = prodmake(&f, 30).unwrap();
        for (i, x) in ints(&c).iter().enumerate() {
            let k = i + 1;
            assert_eq!(*x, i64::from(k % 5 == 1 || k % 5 == 4), "c_{k}");
        }
        let p = detect_period(&c, 3).unwrap();
        assert_eq!((p.preperiod, p.period, ints(&p.pattern)), (0, 5, vec![1, 0, 0, 1, 0]));
    }

    #[test]
    fn nine_periodic_product() {
        // (q^4, q^5, q^9; q^9)_inf / (q;q)_inf
        let n = r(45);
        let mut f = pochhammer_inf_inv(1, r(1), r(1), n).unwrap();
        for a in [4, 5, 9] {
            f = f.mul(&crate::products::pochhammer_inf(1, r(a), r(9), n).unwrap());
        }
        let c = prodmake(&f, 45).unwrap();
        for (i, x) in ints(&c).iter().enumerate() {
            let k = (i + 1) % 9;
            assert_eq!(*x, i64::from(![0, 4, 5].contains(&k)));
        }
        assert_eq!(detect_period(&c, 3).unwrap().period, 9);
    }

    #[test]
    fn reconstruction() {
        let spec = NahmDatum { a: vec![vec![r(2), r(1)], vec![r(1), r(2)]], b: vec![r(0), r(1)], c: r(0) }.to_sum_spec();
        let f = multi_sum(&spec, r(25)).unwrap();
        let c = prodmake(&f, 25).unwrap();
        let g = product_from_exponents(&c, 25).unwrap();
        assert!(f.equal_up_to(&g, r(25)).unwrap());
    }

    #[test]
    fn rational_exponents() {
        // sqrt(1/(1-q)) has c_1 = 1/2
        let f = QSeries::make(1, r(6), &[
            (r(0), Rat::ONE),
            (r(1), Rat::new(1, 2)),
            (r(2), Rat::new(3, 8)),
            (r(3), Rat::new(5, 16)),
            (r(4), Rat::new(35, 128)),
            (r(5), Rat::new(63, 256)),
            (r(6), Rat::new(231, 1024)),
        ])
        .unwrap();
        let c = prodmake(&f, 6).unwrap();
        assert_eq!(c[0], Rat::new(1, 2));
        assert!(c[1..].iter().all(Rat::is_zero));
        assert!(analyze(&f, 6, 3).unwrap().verdict.is_none());
    }

    #[test]
    fn preconditions() {
        let f = QSeries::make(1, r(10), &[(r(0), Rat::int(2))]).unwrap();
        assert!(prodmake(&f, 5).is_err());
        let g = QSeries::make(2, r(10), &[(r(0), Rat::ONE), (Rational64::new(1, 2), Rat::ONE)]).unwrap();
        assert!(prodmake(&g, 5).is_err());
        assert!(prodmake(&QSeries::one(r(3)), 5).is_err());
    }

    #[test]
    fn no_period_in_short_window() {
        let c: Vec<Rat> = [1, 2, 3, 4, 5, 6].iter().map(|x| Rat::int(*x)).collect();
        assert_eq!(detect_period(&c, 3), None);
        assert!(scan_vectors(&[vec![r(2)]], &[], &ScanOptions {
            order: r(10),
            k: 10,
            min_repeats: 3,
            jobs: 1,
            sum: SumOptions::default()
        })
        .is_empty());
    }

    #[test]
    fn trailing_zeros_are_not_a_tail() {
        let mut c: Vec<Rat> = (1..=57).map(|i| Rat::int((i * i % 7) as i64 - 3)).collect();
        c.extend([Rat::ZERO, Rat::ZERO, Rat::ZERO]);
        assert_eq!(detect_period(&c, 3), None);
    }

    #[test]
    fn divergent_scan_point_is_skipped() {
        let opts = ScanOptions { order: r(10), k: 10, min_repeats: 3, jobs: 2, sum: SumOptions::default() };
        let out = scan_vectors(&[vec![r(-1)]], &[vec![r(0)], vec![r(1)]], &opts);
        assert!(out.iter().all(|x| matches!(x.verdict, ScanVerdict::Skipped(_))));
    }
}
