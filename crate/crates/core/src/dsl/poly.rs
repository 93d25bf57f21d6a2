//! Scalar expressions as polynomials in the summation indices, with
//! parameters substituted.

use std::collections::{BTreeMap, HashMap};

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::ast::SExpr;
use crate::error::{Error, Result};
use crate::rat::fmt_rational64;

/// Parameter values by name.
pub type Bindings = BTreeMap<String, Rational64>;

/// Sparse polynomial keyed by exponent vectors over a fixed variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: HashMap<Vec<u32>, Rational64>,
}

impl Poly {
    pub fn constant(c: Rational64, nvars: usize) -> Poly {
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { nvars, terms }
    }

    pub fn var(i: usize, nvars: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly { nvars, terms: HashMap::from([(e, Rational64::one())]) }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Rational64> {
        match self.degree() {
            0 => Some(self.coeff(&vec![0; self.nvars])),
            _ => None,
        }
    }

    pub fn coeff(&self, e: &[u32]) -> Rational64 {
        self.terms.get(e).copied().unwrap_or_else(Rational64::zero)
    }

    /// Coefficient of `x_i x_j` (or `x_i^2` when `i == j`).
    pub fn quadratic(&self, i: usize, j: usize) -> Rational64 {
        let mut e = vec![0; self.nvars];
        e[i] += 1;
        e[j] += 1;
        self.coeff(&e)
    }

    pub fn linear(&self, i: usize) -> Rational64 {
        let mut e = vec![0; self.nvars];
        e[i] = 1;
        self.coeff(&e)
    }

    pub fn constant_term(&self) -> Rational64 {
        self.coeff(&vec![0; self.nvars])
    }

    fn insert(&mut self, e: Vec<u32>, c: Rational64) {
        let slot = self.terms.entry(e).or_insert_with(Rational64::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn add(&self, other: &Poly, sign: i64) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c * Rational64::from_integer(sign));
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::constant(Rational64::zero(), self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: Rational64) -> Poly {
        let mut out = Poly::constant(Rational64::zero(), self.nvars);
        for (e, x) in &self.terms {
            out.insert(e.clone(), x * c);
        }
        out
    }
}

/// Evaluates `e` with parameters from `b`; names listed in `vars` stay
/// symbolic and become the polynomial variables.
pub fn to_poly(e: &SExpr, b: &Bindings, vars: &[String]) -> Result<Poly> {
    let n = vars.len();
    Ok(match e {
        SExpr::Num(k) => Poly::constant(Rational64::from_integer(*k), n),
        SExpr::Var(v) => match vars.iter().position(|x| x == v) {
            Some(i) => Poly::var(i, n),
            None => match b.get(v) {
                Some(x) => Poly::constant(*x, n),
                None => return Err(Error::UnboundParameter(v.clone())),
            },
        },
        SExpr::Neg(a) => to_poly(a, b, vars)?.scale(-Rational64::one()),
        SExpr::Add(x, y) => to_poly(x, b, vars)?.add(&to_poly(y, b, vars)?, 1),
        SExpr::Sub(x, y) => to_poly(x, b, vars)?.add(&to_poly(y, b, vars)?, -1),
        SExpr::Mul(x, y) => to_poly(x, b, vars)?.mul(&to_poly(y, b, vars)?),
        SExpr::Div(x, y) => {
            let d = to_poly(y, b, vars)?
                .as_constant()
                .ok_or_else(|| Error::Eval(format!("division by the non-constant `{y}`")))?;
            if d.is_zero() {
                return Err(Error::Eval(format!("division by zero in `{e}`")));
            }
            to_poly(x, b, vars)?.scale(d.recip())
        }
        SExpr::Pow(x, y) => {
            let k = to_poly(y, b, vars)?
                .as_constant()
                .filter(|k| k.is_integer())
                .ok_or_else(|| Error::Eval(format!("exponent `{y}` is not an integer constant")))?
                .to_integer();
            let base = to_poly(x, b, vars)?;
            if k < 0 {
                let c = base
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| Error::Eval(format!("negative power of `{x}`")))?;
                Poly::constant(c.recip().pow(-k as i32), n)
            } else {
                let mut acc = Poly::constant(Rational64::one(), n);
                for _ in 0..k {
                    acc = acc.mul(&base);
                }
                acc
            }
        }
    })
}

/// A scalar with every variable bound.
pub fn eval_const(e: &SExpr, b: &Bindings) -> Result<Rational64> {
    to_poly(e, b, &[])?
        .as_constant()
        .ok_or_else(|| Error::Eval(format!("`{e}` is not constant")))
}

pub fn eval_int(e: &SExpr, b: &Bindings, what: &str) -> Result<i64> {
    let v = eval_const(e, b)?;
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::Eval(format!("{what} `{e}` evaluates to {}, not an integer", fmt_rational64(&v))))
    }
}
