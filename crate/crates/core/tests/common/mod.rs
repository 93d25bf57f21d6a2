// Naive integer power-series arithmetic, used as an oracle independent of
// the engine. Index = exponent, everything truncated at `n`.
#![allow(dead_code)]

use nahm_core::QSeries;
use num_rational::Rational64;

pub type Naive = Vec<i128>;

pub fn one(n: usize) -> Naive {
    let mut v = vec![0; n + 1];
    v[0] = 1;
    v
}

pub fn mul(a: &Naive, b: &Naive) -> Naive {
    let n = a.len() - 1;
    let mut out = vec![0; n + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of a series with constant term 1, by long division.
pub fn inv(a: &Naive) -> Naive {
    assert_eq!(a[0], 1);
    let n = a.len() - 1;
    let mut out = vec![0i128; n + 1];
    out[0] = 1;
    for k in 1..=n {
        out[k] = -(1..=k).map(|i| a[i] * out[k - i]).sum::<i128>();
    }
    out
}

/// `prod_{k>=0} (1 - s q^(a + m k))` with `a >= 1`.
pub fn poch_inf(s: i128, a: usize, m: usize, n: usize) -> Naive {
    let mut acc = one(n);
    let mut e = a;
    while e <= n {
        let mut f = one(n);
        f[e] = -s;
        acc = mul(&acc, &f);
        e += m;
    }
    acc
}

/// Partition counts p(0..=n) by the standard dynamic program.
pub fn partitions(n: usize) -> Naive {
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for k in part..=n {
            p[k] += p[k - part];
        }
    }
    p
}

/// Partitions into distinct parts.
pub fn distinct_partitions(n: usize) -> Naive {
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for k in (part..=n).rev() {
            p[k] += p[k - part];
        }
    }
    p
}

/// Integer coefficients of `s` at exponents 0..=n; panics on anything else.
pub fn coeffs(s: &QSeries, n: usize) -> Naive {
    let mut v = vec![0i128; n + 1];
    for (e, c) in s.terms() {
        assert!(e.is_integer() && *e.numer() >= 0, "exponent {e}");
        let e = *e.numer() as usize;
        if e <= n {
            v[e] = c.to_i64().unwrap_or_else(|| panic!("coefficient {c} at q^{e}")) as i128;
        }
    }
    v
}

pub fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}
