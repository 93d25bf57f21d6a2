//! q-Pochhammer symbols, Gaussian binomials, theta products and the
//! `J_m`, `J_{a,m}` shorthands.
//!
//! Signs follow `(sign * q^a; q^m)_n = prod_{k<n} (1 - sign * q^{a+km})`,
//! so `sign = -1` gives `(-q^a; q^m)_n`.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{fmt_rational64, Rat};
use crate::series::{scaled_exponent, scaled_order, QSeries};

/// Dense coefficient buffer over scaled exponents `lo..=hi`.
struct Dense {
    d: i64,
    lo: i64,
    v: Vec<Rat>,
}

impl Dense {
    fn one(d: i64, lo: i64, hi: i64) -> Dense {
        let mut v = vec![Rat::ZERO; (hi - lo + 1).max(0) as usize];
        if lo <= 0 && 0 <= hi {
            v[(-lo) as usize] = Rat::ONE;
        }
        Dense { d, lo, v }
    }

    /// In-place multiplication by `1 - s q^e`.
    fn mul_binomial(&mut self, s: i64, e: i64) {
        let len = self.v.len() as i64;
        if e > 0 {
            for i in (e..len).rev() {
                let src = self.v[(i - e) as usize].clone();
                if !src.is_zero() {
                    self.v[i as usize].add_mul(&Rat::int(-s), &src);
                }
            }
        } else if e < 0 {
            for i in 0..len + e {
                let src = self.v[(i - e) as usize].clone();
                if !src.is_zero() {
                    self.v[i as usize].add_mul(&Rat::int(-s), &src);
                }
            }
        } else {
            let f = Rat::int(1 - s);
            for c in self.v.iter_mut() {
                *c *= &f;
            }
        }
    }

    /// In-place exact division of a polynomial of degree `deg` (relative
    /// to `lo`) by `1 - q^e`, e > 0. Returns false on a nonzero remainder.
    fn div_one_minus(&mut self, e: i64, deg: i64) -> bool {
        for i in e..=deg {
            let prev = self.v[(i - e) as usize].clone();
            if !prev.is_zero() {
                self.v[i as usize] += &prev;
            }
        }
        // Past deg - e the quotient series repeats with period e, so the
        // division is exact iff that window is zero.
        self.v[((deg - e + 1).max(0) as usize)..=(deg as usize)].iter().all(|c| c.is_zero())
    }

    fn into_series(self, trunc: i64) -> QSeries {
        let lo = self.lo;
        QSeries::from_scaled(
            self.d,
            trunc,
            self.v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64 + lo, c)),
        )
    }
}

fn check_sign(sign: i64) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("sign must be +1 or -1, found {sign}")))
    }
}

fn check_step(m: Rational64) -> Result<()> {
    if m.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step {} must be positive", fmt_rational64(&m))))
    }
}

fn denom_for(xs: &[Rational64]) -> i64 {
    xs.iter().fold(1i64, |acc, x| acc.lcm(x.denom()))
}

/// `prod_{k=0}^{n-1} (1 - sign q^{a+km})` known up to `order`.
pub fn pochhammer_finite(sign: i64, a: Rational64, m: Rational64, n: i64, order: Rational64) -> Result<QSeries> {
    check_sign(sign)?;
    check_step(m)?;
    if n < 0 {
        return Err(Error::NegativeLength(n));
    }
    let d = denom_for(&[a, m, order]);
    let (sa, sm) = (scaled_exponent(a, d)?, scaled_exponent(m, d)?);
    let trunc = scaled_order(order, d);
    let exps: Vec<i64> = (0..n).map(|k| sa + k * sm).collect();
    Ok(product_of_binomials(d, sign, &exps, trunc))
}

/// Multiplies out `prod (1 - sign q^e)` over scaled exponents, keeping
/// everything that can still reach `trunc`.
fn product_of_binomials(d: i64, sign: i64, exps: &[i64], trunc: i64) -> QSeries {
    let neg: i64 = exps.iter().filter(|e| **e < 0).sum();
    let cap = trunc - neg;
    let mut buf = Dense::one(d, neg, cap);
    for e in exps {
        if *e <= cap - neg {
            buf.mul_binomial(sign, *e);
        }
    }
    buf.into_series(trunc)
}

/// `1 / prod_{k=0}^{n-1} (1 - sign q^{a+km})`, computed by repeated
/// geometric division rather than a general series inverse.
pub fn pochhammer_finite_inv(sign: i64, a: Rational64, m: Rational64, n: i64, order: Rational64) -> Result<QSeries> {
    check_sign(sign)?;
    check_step(m)?;
    if n < 0 {
        return Err(Error::NegativeLength(n));
    }
    let d = denom_for(&[a, m, order]);
    let (sa, sm) = (scaled_exponent(a, d)?, scaled_exponent(m, d)?);
    let exps: Vec<i64> = (0..n).map(|k| sa + k * sm).collect();
    inverse_of_binomials(d, sign, &exps, scaled_order(order, d))
}

/// `1 / prod_{k>=0} (1 - sign q^{a+km})` for `a >= 0`.
pub fn pochhammer_inf_inv(sign: i64, a: Rational64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_sign(sign)?;
    check_step(m)?;
    let d = denom_for(&[a, m, order]);
    let (sa, sm) = (scaled_exponent(a, d)?, scaled_exponent(m, d)?);
    let trunc = scaled_order(order, d);
    let exps: Vec<i64> = (0..).map(|k| sa + k * sm).take_while(|e| *e <= trunc.max(0)).collect();
    inverse_of_binomials(d, sign, &exps, trunc)
}

fn inverse_of_binomials(d: i64, sign: i64, exps: &[i64], trunc: i64) -> Result<QSeries> {
    if exps.iter().any(|e| *e < 0) {
        return Err(Error::InvalidArgument("direct inverse needs nonnegative exponents".into()));
    }
    let mut buf = Dense::one(d, 0, trunc);
    let len = buf.v.len() as i64;
    let s = Rat::int(sign);
    for &e in exps {
        if e == 0 {
            if sign == 1 {
                return Err(Error::NotInvertible);
            }
            let half = Rat::new(1, 2);
            for c in buf.v.iter_mut() {
                *c *= &half;
            }
            continue;
        }
        for i in e..len {
            let prev = buf.v[(i - e) as usize].clone();
            if !prev.is_zero() {
                buf.v[i as usize].add_mul(&s, &prev);
            }
        }
    }
    Ok(buf.into_series(trunc))
}

/// `prod_{k>=0} (1 - sign q^{a+km})` known up to `order`.
///
/// The argument exponent may be zero or negative as long as no factor is
/// `1 - q^0`; those cases produce a constant factor 2 or Laurent terms.
pub fn pochhammer_inf(sign: i64, a: Rational64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_sign(sign)?;
    check_step(m)?;
    let d = denom_for(&[a, m, order]);
    let (sa, sm) = (scaled_exponent(a, d)?, scaled_exponent(m, d)?);
    if sign == 1 && sa <= 0 && (-sa) % sm == 0 {
        return Err(Error::VanishingProduct);
    }
    let trunc = scaled_order(order, d);
    let neg: i64 = (0..).map(|k| sa + k * sm).take_while(|e| *e < 0).sum();
    let cap = trunc - neg;
    let exps: Vec<i64> = (0..).map(|k| sa + k * sm).take_while(|e| *e <= cap - neg).collect();
    Ok(product_of_binomials(d, sign, &exps, trunc))
}

/// Gaussian binomial `[n, k]` in base `q^m`; zero outside `0 <= k <= n`.
pub fn q_binomial(n: i64, k: i64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_step(m)?;
    let d = denom_for(&[m, order]);
    let sm = scaled_exponent(m, d)?;
    let trunc = scaled_order(order, d);
    if n < 0 || k < 0 || k > n {
        return Ok(QSeries::from_scaled(d, trunc, []));
    }
    let k = k.min(n - k);
    let mut deg = sm * (k * n - k * (k - 1) / 2);
    if deg > 4 * trunc.max(0) + 256 {
        // The full polynomial is far longer than needed: divide the
        // truncated numerator by the unit denominator instead.
        let mut buf = Dense::one(d, 0, trunc);
        for j in (n - k + 1)..=n {
            if j * sm <= trunc {
                buf.mul_binomial(1, j * sm);
            }
        }
        let len = buf.v.len() as i64;
        for j in 1..=k {
            let e = j * sm;
            for i in e..len {
                let prev = buf.v[(i - e) as usize].clone();
                if !prev.is_zero() {
                    buf.v[i as usize] += &prev;
                }
            }
        }
        return Ok(buf.into_series(trunc));
    }
    let mut buf = Dense::one(d, 0, deg);
    for j in (n - k + 1)..=n {
        buf.mul_binomial(1, j * sm);
    }
    for j in 1..=k {
        if !buf.div_one_minus(j * sm, deg) {
            return Err(Error::Eval(format!("inexact division computing [{n}, {k}]")));
        }
        deg -= j * sm;
    }
    Ok(buf.into_series(trunc))
}

/// `(q^a, q^{m-a}, q^m; q^m)_inf`.
pub fn theta_product(a: Rational64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_step(m)?;
    let x = pochhammer_inf(1, a, m, order)?;
    let y = pochhammer_inf(1, m - a, m, order)?;
    let z = pochhammer_inf(1, m, m, order)?;
    Ok(&(&x * &y) * &z)
}

/// `sum_{n in Z} (-1)^n q^{m n(n-1)/2 + a n}`.
pub fn theta_sum(a: Rational64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_step(m)?;
    let d = denom_for(&[a, m, order]);
    let trunc = scaled_order(order, d);
    let expo = |n: i64| m * Rational64::from_integer(n * (n - 1) / 2) + a * Rational64::from_integer(n);
    // the exponent is convex in n with its minimum near 1/2 - a/m
    let center = (Rational64::new(1, 2) - a / m).round().to_integer();
    let mut terms = Vec::new();
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { center } else { center - 1 };
        loop {
            let e = expo(n);
            let s = (e * Rational64::from_integer(d)).to_integer();
            if s > trunc {
                break;
            }
            terms.push((s, if n.rem_euclid(2) == 0 { Rat::ONE } else { Rat::int(-1) }));
            n += dir;
        }
    }
    Ok(QSeries::from_scaled(d, trunc, terms))
}

/// `J_m = (q^m; q^m)_inf`.
pub fn eta_j(m: Rational64, order: Rational64) -> Result<QSeries> {
    pochhammer_inf(1, m, m, order)
}

/// One factor `(sign q^a; q^m)_inf ^ power` of a [`ProductSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductFactor {
    pub sign: i64,
    pub a: Rational64,
    pub m: Rational64,
    pub power: i64,
}

/// `c q^t prod (sign q^a; q^m)_inf^power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpec {
    pub c: Rat,
    pub t: Rational64,
    pub factors: Vec<ProductFactor>,
}

impl ProductSpec {
    pub fn new(c: Rat, t: Rational64) -> ProductSpec {
        ProductSpec { c, t, factors: Vec::new() }
    }

    pub fn with(mut self, sign: i64, a: Rational64, m: Rational64, power: i64) -> ProductSpec {
        self.factors.push(ProductFactor { sign, a, m, power });
        self
    }

    /// Adds `J_m ^ power`.
    pub fn j(self, m: i64, power: i64) -> ProductSpec {
        let m = Rational64::from_integer(m);
        self.with(1, m, m, power)
    }

    /// Adds `J_{a,m} ^ power`.
    pub fn j2(self, a: i64, m: i64, power: i64) -> ProductSpec {
        let (a, m) = (Rational64::from_integer(a), Rational64::from_integer(m));
        self.with(1, a, m, power).with(1, m - a, m, power).with(1, m, m, power)
    }
}

pub fn eval_product_spec(p: &ProductSpec, order: Rational64) -> Result<QSeries> {
    if p.c.is_zero() {
        return Ok(QSeries::zero(order));
    }
    // Negative-valuation factors eat into the known order of the product,
    // so evaluate them further out.
    let mut slack = Rational64::zero();
    for f in &p.factors {
        if f.a.is_negative() {
            let mut e = f.a;
            while e.is_negative() {
                slack -= e * Rational64::from_integer(f.power.abs());
                e += f.m;
            }
        }
    }
    let inner = order - p.t + slack;
    let mut acc = QSeries::one(inner);
    for f in &p.factors {
        if f.power == 0 {
            continue;
        }
        let base = if f.power > 0 {
            pochhammer_inf(f.sign, f.a, f.m, inner)?
        } else if f.a.is_negative() || (f.a.is_zero() && f.sign == 1) {
            pochhammer_inf(f.sign, f.a, f.m, inner)?.invert().map_err(|_| Error::NonUnit)?
        } else {
            pochhammer_inf_inv(f.sign, f.a, f.m, inner)?
        };
        acc = acc.mul_capped(&base.pow(f.power.abs())?, inner);
    }
    Ok(acc.scale(&p.c).shift(p.t).truncate(order))
}
