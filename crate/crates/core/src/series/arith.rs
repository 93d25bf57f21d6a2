use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;

use super::{scaled_order, QSeries};
use crate::error::{Error, Result};
use crate::rat::Rat;

fn common(a: &QSeries, b: &QSeries) -> (QSeries, QSeries) {
    let d = a.denom.lcm(&b.denom);
    (a.lift(d), b.lift(d))
}

fn merge(a: &[(i64, Rat)], b: &[(i64, Rat)], trunc: i64, negate_b: bool) -> Vec<(i64, Rat)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let pick_b = |c: &Rat| if negate_b { -c } else { c.clone() };
    while i < a.len() || j < b.len() {
        let ea = a.get(i).map(|t| t.0).unwrap_or(i64::MAX);
        let eb = b.get(j).map(|t| t.0).unwrap_or(i64::MAX);
        let e = ea.min(eb);
        if e > trunc {
            break;
        }
        let c = if ea == eb {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            i += 1;
            j += 1;
            c
        } else if ea < eb {
            i += 1;
            a[i - 1].1.clone()
        } else {
            j += 1;
            pick_b(&b[j - 1].1)
        };
        if !c.is_zero() {
            out.push((e, c));
        }
    }
    out
}

impl QSeries {
    pub fn add(&self, other: &QSeries) -> QSeries {
        let (a, b) = common(self, other);
        let t = a.trunc.min(b.trunc);
        QSeries::from_sorted_unchecked(a.denom, t, merge(&a.terms, &b.terms, t, false))
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let (a, b) = common(self, other);
        let t = a.trunc.min(b.trunc);
        QSeries::from_sorted_unchecked(a.denom, t, merge(&a.terms, &b.terms, t, true))
    }

    pub fn neg(&self) -> QSeries {
        QSeries::from_sorted_unchecked(self.denom, self.trunc, self.terms.iter().map(|(e, c)| (*e, -c)).collect())
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let (a, b) = common(self, other);
        let t = (a.trunc.saturating_add(b.valuation_scaled())).min(b.trunc.saturating_add(a.valuation_scaled()));
        mul_scaled(&a, &b, t)
    }

    /// Product, additionally discarding everything above `order`.
    pub fn mul_capped(&self, other: &QSeries, order: Rational64) -> QSeries {
        let d = self.denom.lcm(&other.denom).lcm(order.denom());
        let (a, b) = (self.lift(d), other.lift(d));
        let t = (a.trunc.saturating_add(b.valuation_scaled()))
            .min(b.trunc.saturating_add(a.valuation_scaled()))
            .min(scaled_order(order, d));
        mul_scaled(&a, &b, t)
    }

    /// Multiplicative inverse of a Laurent unit `c q^v (1 + h)`.
    pub fn invert(&self) -> Result<QSeries> {
        let (v, c) = match self.terms.first() {
            Some((v, c)) => (*v, c.clone()),
            None => return Err(Error::NotInvertible),
        };
        let rel = self.trunc - v;
        let cinv = c.recip();
        // Work in steps of the gcd of the relative exponents.
        let mut step = 0i64;
        for (e, _) in &self.terms[1..] {
            step = step.gcd(&(e - v));
        }
        if step == 0 {
            step = rel.max(1);
        }
        let h: Vec<(usize, Rat)> = self.terms[1..]
            .iter()
            .map(|(e, x)| (((e - v) / step) as usize, x * &cinv))
            .collect();
        let len = (rel / step) as usize + 1;
        let mut w: Vec<Rat> = vec![Rat::ZERO; len];
        w[0] = Rat::ONE;
        for k in 1..len {
            let mut acc = Rat::ZERO;
            for (j, hj) in &h {
                if *j > k {
                    break;
                }
                let wk = &w[k - j];
                if !wk.is_zero() {
                    acc.add_mul(hj, wk);
                }
            }
            w[k] = -acc;
        }
        let terms = w
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k as i64 * step - v, &x * &cinv))
            .collect();
        Ok(QSeries::from_sorted_unchecked(self.denom, self.trunc - 2 * v, terms))
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&other.invert()?))
    }
}

/// Convolution over a shared denominator, keeping exponents `<= t`.
fn mul_scaled(a: &QSeries, b: &QSeries, t: i64) -> QSeries {
    let d = a.denom;
    if a.terms.is_empty() || b.terms.is_empty() {
        return QSeries::from_sorted_unchecked(d, t, Vec::new());
    }
    let lo = a.terms[0].0 + b.terms[0].0;
    if lo > t {
        return QSeries::from_sorted_unchecked(d, t, Vec::new());
    }
    let span = (t - lo + 1) as u128;
    let pairs = a.terms.len() as u128 * b.terms.len() as u128;
    let (x, y) = if a.terms.len() <= b.terms.len() { (a, b) } else { (b, a) };
    if pairs.min(span) * 4 > span {
        let mut acc: Vec<Rat> = vec![Rat::ZERO; span as usize];
        for (ea, ca) in &x.terms {
            let lim = t - ea;
            for (eb, cb) in &y.terms {
                if *eb > lim {
                    break;
                }
                acc[(ea + eb - lo) as usize].add_mul(ca, cb);
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64 + lo, c))
            .collect();
        QSeries::from_sorted_unchecked(d, t, terms)
    } else {
        let mut acc: BTreeMap<i64, Rat> = BTreeMap::new();
        for (ea, ca) in &x.terms {
            let lim = t - ea;
            for (eb, cb) in &y.terms {
                if *eb > lim {
                    break;
                }
                acc.entry(ea + eb).or_insert(Rat::ZERO).add_mul(ca, cb);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        QSeries::from_sorted_unchecked(d, t, terms)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                QSeries::$m(self, rhs)
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                QSeries::$m(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(&self)
    }
}
