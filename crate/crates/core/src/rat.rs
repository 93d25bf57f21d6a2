//! Exact rational numbers used as series coefficients.
//!
//! Nearly every coefficient met in practice is a machine-sized integer, so
//! [`Rat`] keeps a reduced `i64` fraction inline and only promotes to a
//! heap-allocated [`BigRational`] when an operation would overflow. Every
//! value is kept in canonical form: a value that fits the small
//! representation is never stored as `Big`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub enum Rat {
    /// Reduced fraction with `den > 0`.
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

impl Rat {
    pub const ZERO: Rat = Rat::Small { num: 0, den: 1 };
    pub const ONE: Rat = Rat::Small { num: 1, den: 1 };

    #[inline]
    pub fn int(n: i64) -> Rat {
        Rat::Small { num: n, den: 1 }
    }

    /// Builds `num/den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = gcd_i128(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rat::Small { num: n, den: d },
            _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(num), BigInt::from(den)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        // BigRational arithmetic already reduces.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rat::Small { num: n, den: d };
        }
        Rat::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small { num: 1, den: 1 })
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small { den, .. } => *den == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small { num, .. } => *num < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    /// Returns the value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small { num, den: 1 } => Some(*num),
            _ => None,
        }
    }

    pub fn to_rational64(&self) -> Option<Rational64> {
        match self {
            Rat::Small { num, den } => Some(Rational64::new_raw(*num, *den)),
            Rat::Big(_) => None,
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rat::Small { num, den } => Rat::from_i128(*den as i128, *num as i128),
            Rat::Big(b) => Rat::from_big(b.recip()),
        }
    }

    pub fn numer_string(&self) -> String {
        match self {
            Rat::Small { num, .. } => num.to_string(),
            Rat::Big(b) => b.numer().to_string(),
        }
    }

    pub fn denom_string(&self) -> String {
        match self {
            Rat::Small { den, .. } => den.to_string(),
            Rat::Big(b) => b.denom().to_string(),
        }
    }

    /// Always `p/q`, even for integers.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer_string(), self.denom_string())
    }

    /// `self += a * b` without intermediate allocation on the small path.
    #[inline]
    pub fn add_mul(&mut self, a: &Rat, b: &Rat) {
        if let (
            Rat::Small { num: s, den: 1 },
            Rat::Small { num: x, den: 1 },
            Rat::Small { num: y, den: 1 },
        ) = (&*self, a, b)
        {
            if let Some(p) = x.checked_mul(*y) {
                if let Some(t) = s.checked_add(p) {
                    *self = Rat::Small { num: t, den: 1 };
                    return;
                }
            }
        }
        let p = a * b;
        *self += &p;
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a == 0 {
        return b as i128;
    }
    if b == 0 {
        return a as i128;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            break;
        }
    }
    (a << shift) as i128
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl From<Rational64> for Rat {
    fn from(r: Rational64) -> Self {
        Rat::new(*r.numer(), *r.denom())
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat::from_big(r)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rat::Small { num: a, den: b }, Rat::Small { num: c, den: d }) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl std::hash::Hash for Rat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small { num: a, den: b }, Rat::Small { num: c, den: d }) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    #[inline]
    fn add(self, rhs: &'a Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small { num: a, den: 1 }, Rat::Small { num: c, den: 1 }) => match a.checked_add(*c) {
                Some(s) => Rat::Small { num: s, den: 1 },
                None => Rat::from_i128(*a as i128 + *c as i128, 1),
            },
            (Rat::Small { num: a, den: b }, Rat::Small { num: c, den: d }) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    Rat::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &'a Rat) -> Rat {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    #[inline]
    fn mul(self, rhs: &'a Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small { num: a, den: 1 }, Rat::Small { num: c, den: 1 }) => match a.checked_mul(*c) {
                Some(p) => Rat::Small { num: p, den: 1 },
                None => Rat::from_i128(*a as i128 * *c as i128, 1),
            },
            (Rat::Small { num: a, den: b }, Rat::Small { num: c, den: d }) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        self * &rhs.recip()
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small { num, den } => match num.checked_neg() {
                Some(n) => Rat::Small { num: n, den: *den },
                None => Rat::from_i128(-(*num as i128), *den as i128),
            },
            Rat::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Rat> for Rat {
    #[inline]
    fn add_assign(&mut self, rhs: &Rat) {
        if let (Rat::Small { num: a, den: 1 }, Rat::Small { num: c, den: 1 }) = (&*self, rhs) {
            if let Some(s) = a.checked_add(*c) {
                *self = Rat::Small { num: s, den: 1 };
                return;
            }
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self += &(-rhs);
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small { num, den: 1 } => write!(f, "{num}"),
            Rat::Small { num, den } => write!(f, "{num}/{den}"),
            Rat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational `{}`", self.0)
    }
}

impl std::error::Error for ParseRatError {}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rat::from_big(BigRational::new(n, d)))
    }
}

/// Parses `p` or `p/q` into a [`Rational64`].
pub fn parse_rational64(s: &str) -> Result<Rational64, ParseRatError> {
    let t = s.trim();
    let err = || ParseRatError(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i64 = n.parse().map_err(|_| err())?;
    let d: i64 = d.parse().map_err(|_| err())?;
    if d == 0 {
        return Err(err());
    }
    Ok(Rational64::new(n, d))
}

/// Formats a [`Rational64`] as `p` or `p/q`.
pub fn fmt_rational64(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of positive integers.
pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

impl Zero for Rat {
    fn zero() -> Self {
        Rat::ZERO
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
}

impl One for Rat {
    fn one() -> Self {
        Rat::ONE
    }
}
