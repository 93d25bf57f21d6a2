//! Bressoud polynomials, the `L_n`/`R_n` pair, the built-in Bailey pairs
//! and the three Bailey-lemma transformations used with them.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::products::{pochhammer_finite, pochhammer_finite_inv, pochhammer_inf, pochhammer_inf_inv, q_binomial};
use crate::rat::Rat;
use crate::series::{scaled_order, QSeries};

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn check_kind(kind: u8) -> Result<()> {
    if kind == 1 || kind == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Bressoud polynomial kind must be 1 or 2, got {kind}")))
    }
}

/// `sum_k q^{m(k^2)} [n, k]_{q^m}` (kind 1) or `sum_k q^{m(k^2+k)} [n, k]_{q^m}`
/// (kind 2), truncated at `order`.
pub fn bressoud_poly(kind: u8, n: i64, m: Rational64, order: Rational64) -> Result<QSeries> {
    check_kind(kind)?;
    if n < 0 {
        return Err(Error::NegativeLength(n));
    }
    let mut acc = QSeries::zero(order);
    for k in 0..=n {
        let e = m * ri(k * k + if kind == 2 { k } else { 0 });
        if e > order {
            break;
        }
        acc = &acc + &q_binomial(n, k, m, order - e)?.shift(e);
    }
    Ok(acc)
}

/// `L_n = B^{(2)}_n / (q;q)_n`.
pub fn bressoud_l(n: i64, order: Rational64) -> Result<QSeries> {
    let b = bressoud_poly(2, n, ri(1), order)?;
    Ok(&b * &pochhammer_finite_inv(1, ri(1), ri(1), n, order)?)
}

/// `sum_k (-1)^k q^{e(k)} [top, shift + k]` with `e(k)` from `expo`.
fn signed_binomial_sum(top: i64, shift: i64, expo: impl Fn(i64) -> i64, order: Rational64) -> Result<QSeries> {
    let mut acc = QSeries::zero(order);
    for k in -shift..=(top - shift) {
        let e = ri(expo(k));
        if e > order {
            continue;
        }
        let mut t = q_binomial(top, shift + k, ri(1), order - e)?.shift(e);
        if k % 2 != 0 {
            t = t.neg();
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// `R_n = (1/(q;q)_{2n}) sum_k (-1)^k q^{k(5k+3)/2} [2n, n+k]`.
pub fn bressoud_r(n: i64, order: Rational64) -> Result<QSeries> {
    if n < 0 {
        return Err(Error::NegativeLength(n));
    }
    let s = signed_binomial_sum(2 * n, n, |k| k * (5 * k + 3) / 2, order)?;
    Ok(&s * &pochhammer_finite_inv(1, ri(1), ri(1), 2 * n, order)?)
}

/// The symmetric form `(1/(2 (q;q)_{2n})) sum_k (-1)^k q^{k(5k-3)/2} (1 + q^{3k}) [2n, n+k]`.
pub fn bressoud_r_symmetric(n: i64, order: Rational64) -> Result<QSeries> {
    if n < 0 {
        return Err(Error::NegativeLength(n));
    }
    let a = signed_binomial_sum(2 * n, n, |k| k * (5 * k - 3) / 2, order)?;
    let b = signed_binomial_sum(2 * n, n, |k| k * (5 * k + 3) / 2, order)?;
    let s = (&a + &b).scale(&Rat::new(1, 2));
    Ok(&s * &pochhammer_finite_inv(1, ri(1), ri(1), 2 * n, order)?)
}

/// Both sides of the classical Bressoud identities, cleared of
/// denominators:
///
/// kind 1: `(q;q)_{2n} B^{(1)}_n` against `(q;q)_n sum_k (-1)^k q^{k(5k+1)/2} [2n, n+k]`,
/// kind 2: `(q;q)_{2n+1} B^{(2)}_n` against `(q;q)_n sum_k (-1)^k q^{k(5k+3)/2} [2n+1, n+k+1]`.
pub fn bressoud_identity_sides(kind: u8, n: i64, order: Rational64) -> Result<(QSeries, QSeries)> {
    check_kind(kind)?;
    let one = ri(1);
    let b = bressoud_poly(kind, n, one, order)?;
    let (top, expo): (i64, fn(i64) -> i64) =
        if kind == 1 { (2 * n, |k| k * (5 * k + 1) / 2) } else { (2 * n + 1, |k| k * (5 * k + 3) / 2) };
    let lhs = &b * &pochhammer_finite(1, one, one, top, order)?;
    let shift = if kind == 1 { n } else { n + 1 };
    let s = signed_binomial_sum(top, shift, expo, order)?;
    let rhs = &s * &pochhammer_finite(1, one, one, n, order)?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XKind {
    /// `x = 1`
    One,
    /// `x = q` (in the pair's own base)
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Family {
    One,
    Two,
    Three,
}

/// One of the built-in Bailey pairs, possibly with `q` replaced by `q^base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaileyPair {
    pub name: String,
    pub x_kind: XKind,
    pub base: i64,
    family: Family,
}

pub const PAIR_NAMES: [&str; 3] = ["pair-1", "pair-2", "pair-3"];

impl BaileyPair {
    /// Looks up `pair-1`, `pair-2` or `pair-3`.
    pub fn builtin(name: &str) -> Option<BaileyPair> {
        let (family, x_kind) = match name {
            "pair-1" => (Family::One, XKind::One),
            "pair-2" => (Family::Two, XKind::One),
            "pair-3" => (Family::Three, XKind::Q),
            _ => return None,
        };
        Some(BaileyPair { name: name.to_string(), x_kind, base: 1, family })
    }

    pub fn registry() -> Vec<BaileyPair> {
        PAIR_NAMES.iter().map(|n| BaileyPair::builtin(n).expect("registered")).collect()
    }

    /// The same pair with `q` replaced by `q^b`.
    pub fn with_base(mut self, b: i64) -> Result<BaileyPair> {
        if b < 1 {
            return Err(Error::InvalidArgument(format!("pair base must be positive, got {b}")));
        }
        self.base = b;
        Ok(self)
    }

    /// Exponent of `x` as a power of `q`.
    pub fn x_exponent(&self) -> i64 {
        match self.x_kind {
            XKind::One => 0,
            XKind::Q => self.base,
        }
    }

    pub fn label(&self) -> String {
        if self.base == 1 {
            self.name.clone()
        } else {
            format!("{} (q -> q^{})", self.name, self.base)
        }
    }

    pub fn alpha(&self, r: i64, order: Rational64) -> Result<QSeries> {
        if r < 0 {
            return Err(Error::NegativeLength(r));
        }
        let b = self.base;
        let sign = if r % 2 == 0 { Rat::ONE } else { Rat::int(-1) };
        let (lead, extra): (i64, Vec<i64>) = match self.family {
            Family::One | Family::Two if r == 0 => return Ok(QSeries::one(order)),
            Family::One => (r * (5 * r - 1) / 2, vec![0, r]),
            Family::Two => (r * (5 * r - 3) / 2, vec![0, 3 * r]),
            // (1 - q^{2r+1}) / (1 - q) = 1 + q + ... + q^{2r}
            Family::Three => (r * (5 * r + 3) / 2, (0..=2 * r).collect()),
        };
        let d = *order.denom();
        let terms = extra.iter().map(|e| (b * (lead + e) * d, sign.clone()));
        Ok(QSeries::from_scaled(d, scaled_order(order, d), terms).reduce_denom())
    }

    pub fn beta(&self, n: i64, order: Rational64) -> Result<QSeries> {
        let kind = match self.family {
            Family::One => 1,
            Family::Two | Family::Three => 2,
        };
        let b = ri(self.base);
        let poly = bressoud_poly(kind, n, b, order)?;
        Ok(&poly * &pochhammer_finite_inv(1, b, b, n, order)?)
    }

    /// Right side of the defining relation:
    /// `sum_{r<=n} alpha_r / ((q;q)_{n-r} (xq;q)_{n+r})` in the pair's base.
    pub fn beta_from_alpha(&self, n: i64, order: Rational64) -> Result<QSeries> {
        let b = ri(self.base);
        let xq = ri(self.x_exponent()) + b;
        let mut acc = QSeries::zero(order);
        for r in 0..=n {
            let a = self.alpha(r, order)?;
            if a.is_empty() {
                continue;
            }
            let den = &pochhammer_finite_inv(1, b, b, n - r, order)? * &pochhammer_finite_inv(1, xq, b, n + r, order)?;
            acc = &acc + &(&a * &den);
        }
        Ok(acc)
    }
}

/// Outcome of the defining relation at one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCheck {
    pub n: i64,
    pub holds: bool,
    pub first_difference: Option<Rational64>,
}

/// Checks `beta_n` against the defining relation for `0 <= n <= depth`.
pub fn verify_bailey_pair(p: &BaileyPair, depth: i64, order: Rational64) -> Result<Vec<PairCheck>> {
    (0..=depth)
        .map(|n| {
            let lhs = p.beta(n, order)?;
            let rhs = p.beta_from_alpha(n, order)?;
            let diff = lhs.first_difference(&rhs, order)?;
            Ok(PairCheck { n, holds: diff.is_none(), first_difference: diff })
        })
        .collect()
}

fn mismatch(p: &BaileyPair, which: u8, reason: &str) -> Error {
    Error::RelativityMismatch { pair: p.label(), which, reason: reason.to_string() }
}

/// Both sides of Bailey-lemma transformation `which` applied to `p`:
///
/// 1. `sum x^n q^{n^2} (-q;q^2)_n beta_n(x,q^2)`
///    `= (-xq;q^2)_inf/(xq^2;q^2)_inf sum x^r q^{r^2} (-q;q^2)_r/(-xq;q^2)_r alpha_r(x,q^2)`,
///    for a pair in base 2;
/// 2. `sum q^{n(n+1)/2} (-1;q)_n beta_n(1,q)`
///    `= 2 (q^2;q^2)_inf/(q;q)_inf^2 sum q^{r(r+1)/2}/(1+q^r) alpha_r(1,q)`;
/// 3. `1/(1-q) sum q^{n(n+1)/2} (-q;q)_n beta_n(q,q)`
///    `= (q^2;q^2)_inf/(q;q)_inf^2 sum q^{r(r+1)/2} alpha_r(q,q)`.
pub fn bailey_lemma_sides(p: &BaileyPair, which: u8, order: Rational64) -> Result<(QSeries, QSeries)> {
    let one = ri(1);
    let two = ri(2);
    match which {
        1 => {
            if p.base != 2 {
                return Err(mismatch(p, 1, "the pair must have q replaced by q^2"));
            }
            let x = p.x_exponent();
            let mut lhs = QSeries::zero(order);
            let mut rhs_sum = QSeries::zero(order);
            let mut n = 0;
            while ri(x * n + n * n) <= order {
                let e = ri(x * n + n * n);
                let rest = order - e;
                let w = pochhammer_finite(-1, one, two, n, rest)?;
                lhs = &lhs + &(&w * &p.beta(n, rest)?).shift(e);
                let ratio = &w * &pochhammer_finite_inv(-1, ri(x + 1), two, n, rest)?;
                rhs_sum = &rhs_sum + &(&ratio * &p.alpha(n, rest)?).shift(e);
                n += 1;
            }
            let pre = &pochhammer_inf(-1, ri(x + 1), two, order)? * &pochhammer_inf_inv(1, ri(x + 2), two, order)?;
            Ok((lhs, &pre * &rhs_sum))
        }
        2 | 3 => {
            let want = if which == 2 { XKind::One } else { XKind::Q };
            if p.base != 1 {
                return Err(mismatch(p, which, "the pair must be in base q"));
            }
            if p.x_kind != want {
                let reason = if which == 2 { "needs a pair relative to x = 1" } else { "needs a pair relative to x = q" };
                return Err(mismatch(p, which, reason));
            }
            // (-1;q)_n for which = 2, (-q;q)_n for which = 3
            let a0 = if which == 2 { ri(0) } else { one };
            let mut lhs = QSeries::zero(order);
            let mut rhs_sum = QSeries::zero(order);
            let mut n = 0;
            while ri(n * (n + 1) / 2) <= order {
                let e = ri(n * (n + 1) / 2);
                let rest = order - e;
                let w = pochhammer_finite(-1, a0, one, n, rest)?;
                lhs = &lhs + &(&w * &p.beta(n, rest)?).shift(e);
                let mut a = p.alpha(n, rest)?;
                if which == 2 {
                    a = if n == 0 {
                        a.scale(&Rat::new(1, 2))
                    } else {
                        &a * &pochhammer_finite_inv(-1, ri(n), one, 1, rest)?
                    };
                }
                rhs_sum = &rhs_sum + &a.shift(e);
                n += 1;
            }
            let mut pre = &pochhammer_inf(1, two, two, order)? * &pochhammer_inf_inv(1, one, one, order)?.pow(2)?;
            if which == 2 {
                pre = pre.scale(&Rat::int(2));
            } else {
                lhs = &lhs * &pochhammer_finite_inv(1, one, one, 1, order)?;
            }
            Ok((lhs, &pre * &rhs_sum))
        }
        _ => Err(Error::InvalidArgument(format!("transformation must be 1, 2 or 3, got {which}"))),
    }
}
