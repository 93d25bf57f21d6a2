//! Truncated Laurent/Puiseux series in one formal variable `q`.
//!
//! A [`QSeries`] stores exponents scaled by a per-series denominator `D`,
//! so the true exponent of a stored key `e` is `e / D`. Coefficients are
//! known exactly for every scaled exponent `<= trunc`; anything above is
//! unknown rather than zero.
//!
//! Invariants:
//! - `denom >= 1`
//! - terms are sorted by exponent, every exponent is `<= trunc`
//! - no stored coefficient is zero

mod arith;
mod tsv;

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{fmt_rational64, Rat};

pub use tsv::parse_tsv;

#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    denom: i64,
    trunc: i64,
    terms: Vec<(i64, Rat)>,
}

/// Scaled truncation index for a rational order `n` under denominator `d`.
pub fn scaled_order(order: Rational64, d: i64) -> i64 {
    (order * Rational64::from_integer(d)).floor().to_integer()
}

/// Exact scaled exponent, or an error when `e` is not a multiple of `1/d`.
pub fn scaled_exponent(e: Rational64, d: i64) -> Result<i64> {
    let s = e * Rational64::from_integer(d);
    if !s.is_integer() {
        return Err(Error::ExponentDenominator { exponent: fmt_rational64(&e), denom: d });
    }
    Ok(s.to_integer())
}

impl QSeries {
    /// Normalizing constructor over scaled exponents: sums duplicate
    /// exponents, drops zeros and anything above `trunc`.
    pub fn from_scaled(denom: i64, trunc: i64, terms: impl IntoIterator<Item = (i64, Rat)>) -> QSeries {
        assert!(denom >= 1, "series denominator must be positive");
        let mut v: Vec<(i64, Rat)> = terms.into_iter().filter(|(e, _)| *e <= trunc).collect();
        v.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i64, Rat)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += &c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        QSeries { denom, trunc, terms: out }
    }

    /// Like [`QSeries::from_scaled`] but trusts that `terms` is sorted,
    /// duplicate-free, nonzero and within `trunc`.
    pub(crate) fn from_sorted_unchecked(denom: i64, trunc: i64, terms: Vec<(i64, Rat)>) -> QSeries {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(e, c)| *e <= trunc && !c.is_zero()));
        QSeries { denom, trunc, terms }
    }

    /// Builds a series from rational exponents. Exponents must be multiples
    /// of `1/d` and must not exceed `order`.
    pub fn make(d: i64, order: Rational64, terms: &[(Rational64, Rat)]) -> Result<QSeries> {
        if d < 1 {
            return Err(Error::InvalidArgument(format!("denominator {d} must be positive")));
        }
        let trunc = scaled_order(order, d);
        let mut scaled = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            let s = scaled_exponent(*e, d)?;
            if *e > order {
                return Err(Error::AboveTruncation { exponent: fmt_rational64(e), order: fmt_rational64(&order) });
            }
            scaled.push((s, c.clone()));
        }
        Ok(QSeries::from_scaled(d, trunc, scaled))
    }

    pub fn zero(order: Rational64) -> QSeries {
        let d = *order.denom();
        QSeries { denom: d, trunc: scaled_order(order, d), terms: Vec::new() }
    }

    pub fn constant(c: Rat, order: Rational64) -> QSeries {
        let d = *order.denom();
        let trunc = scaled_order(order, d);
        QSeries::from_scaled(d, trunc, [(0, c)])
    }

    pub fn one(order: Rational64) -> QSeries {
        QSeries::constant(Rat::ONE, order)
    }

    /// `c * q^e` known up to `order`.
    pub fn monomial(c: Rat, e: Rational64, order: Rational64) -> QSeries {
        let d = e.denom().lcm(order.denom());
        let s = (e * Rational64::from_integer(d)).to_integer();
        QSeries::from_scaled(d, scaled_order(order, d), [(s, c)])
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn trunc_scaled(&self) -> i64 {
        self.trunc
    }

    /// Largest true exponent whose coefficient is known.
    pub fn order(&self) -> Rational64 {
        Rational64::new(self.trunc, self.denom)
    }

    pub fn scaled_terms(&self) -> &[(i64, Rat)] {
        &self.terms
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &Rat)> + '_ {
        self.terms.iter().map(move |(e, c)| (Rational64::new(*e, self.denom), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Scaled least exponent with a nonzero coefficient; `trunc + 1` when
    /// the series is zero up to its truncation.
    pub fn valuation_scaled(&self) -> i64 {
        self.terms.first().map(|(e, _)| *e).unwrap_or(self.trunc + 1)
    }

    pub fn valuation(&self) -> Option<Rational64> {
        self.terms.first().map(|(e, _)| Rational64::new(*e, self.denom))
    }

    pub fn leading(&self) -> Option<(Rational64, &Rat)> {
        self.terms.first().map(|(e, c)| (Rational64::new(*e, self.denom), c))
    }

    /// Same series over denominator `d`, which must be a multiple of the
    /// current one.
    pub fn lift(&self, d: i64) -> QSeries {
        assert!(d % self.denom == 0, "lift target {d} is not a multiple of {}", self.denom);
        if d == self.denom {
            return self.clone();
        }
        let k = d / self.denom;
        QSeries {
            denom: d,
            trunc: self.trunc * k,
            terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// Smallest denominator that still represents every exponent and the
    /// truncation bound exactly.
    pub fn reduce_denom(&self) -> QSeries {
        let mut g = self.denom.gcd(&self.trunc);
        for (e, _) in &self.terms {
            if g == 1 {
                break;
            }
            g = g.gcd(e);
        }
        if g <= 1 {
            return self.clone();
        }
        QSeries {
            denom: self.denom / g,
            trunc: self.trunc / g,
            terms: self.terms.iter().map(|(e, c)| (e / g, c.clone())).collect(),
        }
    }

    /// Coefficient of `q^e`; zero for absent exponents inside the known range.
    pub fn coefficient(&self, e: Rational64) -> Result<Rat> {
        if e > self.order() {
            return Err(Error::BeyondTruncation { exponent: fmt_rational64(&e), order: fmt_rational64(&self.order()) });
        }
        let s = e * Rational64::from_integer(self.denom);
        if !s.is_integer() {
            return Ok(Rat::ZERO);
        }
        let s = s.to_integer();
        Ok(match self.terms.binary_search_by_key(&s, |(k, _)| *k) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rat::ZERO,
        })
    }

    /// Drops everything above `order`. Never raises the known order.
    pub fn truncate(&self, order: Rational64) -> QSeries {
        let d = self.denom.lcm(order.denom());
        let s = self.lift(d);
        let t = scaled_order(order, d).min(s.trunc);
        let terms = s.terms.into_iter().filter(|(e, _)| *e <= t).collect();
        QSeries { denom: d, trunc: t, terms }.reduce_to(self.denom)
    }

    /// Re-expresses over `d` (a divisor of the current denominator) when
    /// that is exact, otherwise returns `self` unchanged.
    fn reduce_to(self, d: i64) -> QSeries {
        if d == self.denom || self.denom % d != 0 {
            return self;
        }
        let k = self.denom / d;
        if self.trunc % k != 0 || self.terms.iter().any(|(e, _)| e % k != 0) {
            return self;
        }
        QSeries {
            denom: d,
            trunc: self.trunc / k,
            terms: self.terms.into_iter().map(|(e, c)| (e / k, c)).collect(),
        }
    }

    /// Exact comparison of every coefficient with exponent `<= order`.
    pub fn equal_up_to(&self, other: &QSeries, order: Rational64) -> Result<bool> {
        Ok(self.first_difference(other, order)?.is_none())
    }

    /// Least exponent `<= order` where the two series differ.
    pub fn first_difference(&self, other: &QSeries, order: Rational64) -> Result<Option<Rational64>> {
        for s in [self, other] {
            if order > s.order() {
                return Err(Error::BeyondTruncation {
                    exponent: fmt_rational64(&order),
                    order: fmt_rational64(&s.order()),
                });
            }
        }
        let d = self.denom.lcm(&other.denom).lcm(order.denom());
        let (a, b) = (self.lift(d), other.lift(d));
        let t = scaled_order(order, d);
        let mut i = 0;
        let mut j = 0;
        loop {
            let x = a.terms.get(i).filter(|(e, _)| *e <= t);
            let y = b.terms.get(j).filter(|(e, _)| *e <= t);
            match (x, y) {
                (None, None) => return Ok(None),
                (Some((e, _)), None) | (None, Some((e, _))) => return Ok(Some(Rational64::new(*e, d))),
                (Some((ea, ca)), Some((eb, cb))) => {
                    if ea < eb {
                        return Ok(Some(Rational64::new(*ea, d)));
                    } else if eb < ea {
                        return Ok(Some(Rational64::new(*eb, d)));
                    } else if ca != cb {
                        return Ok(Some(Rational64::new(*ea, d)));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    /// Replaces every exponent `e` by `k * e` for positive rational `k`.
    pub fn rescale_exponents(&self, k: Rational64) -> Result<QSeries> {
        if k <= Rational64::zero() {
            return Err(Error::InvalidArgument(format!("rescale factor {} must be positive", fmt_rational64(&k))));
        }
        // e/D -> k e / D = (num * e) / (D * den)
        let (num, den) = (*k.numer(), *k.denom());
        let s = QSeries {
            denom: self.denom * den,
            trunc: self.trunc * num,
            terms: self.terms.iter().map(|(e, c)| (e * num, c.clone())).collect(),
        };
        Ok(s.reduce_denom())
    }

    /// The substitution `q -> -q`; defined for integer exponents only.
    pub fn substitute_neg_q(&self) -> Result<QSeries> {
        if self.denom != 1 {
            return Err(Error::FractionalExponents(self.denom));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, if e.rem_euclid(2) == 1 { -c } else { c.clone() }))
            .collect();
        Ok(QSeries { denom: 1, trunc: self.trunc, terms })
    }

    /// Multiplies by `q^e` (the known order shifts with it).
    pub fn shift(&self, e: Rational64) -> QSeries {
        let d = self.denom.lcm(e.denom());
        let s = self.lift(d);
        let k = (e * Rational64::from_integer(d)).to_integer();
        QSeries {
            denom: d,
            trunc: s.trunc + k,
            terms: s.terms.into_iter().map(|(x, c)| (x + k, c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> QSeries {
        if c.is_zero() {
            return QSeries { denom: self.denom, trunc: self.trunc, terms: Vec::new() };
        }
        QSeries {
            denom: self.denom,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Raises to an integer power; negative powers go through [`QSeries::invert`].
    pub fn pow(&self, n: i64) -> Result<QSeries> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut result = QSeries::one(self.order()).lift(self.denom);
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    fn fmt_exponent(&self, e: i64) -> String {
        fmt_rational64(&Rational64::new(e, self.denom))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let exp = self.fmt_exponent(*e);
            let coeff = if abs.is_one() && *e != 0 { String::new() } else { abs.to_string() };
            let sep = if coeff.is_empty() || *e == 0 { "" } else { "*" };
            let mono = match exp.as_str() {
                "0" => String::new(),
                "1" => "q".to_string(),
                x if x.contains('/') || x.starts_with('-') => format!("q^({x})"),
                x => format!("q^{x}"),
            };
            write!(f, "{coeff}{sep}{mono}")?;
        }
        let big_o = Rational64::new(self.trunc + 1, self.denom);
        let o = fmt_rational64(&big_o);
        let o = if o.contains('/') || o.starts_with('-') { format!("({o})") } else { o };
        if first {
            write!(f, "O(q^{o})")
        } else {
            write!(f, " + O(q^{o})")
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[D={}] {}", self.denom, self)
    }
}

impl QSeries {
    /// True when every known coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    pub fn is_one_up_to_order(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

}

#[cfg(test)]
mod tests;
