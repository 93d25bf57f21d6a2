//! Evaluation of an enumerated lattice sum.
//!
//! Factors are grouped by the highest index they depend on. The sum is
//! accumulated level by level: the innermost level adds `sign * q^e * F`
//! by shifting, and an outer level multiplies the accumulated inner sum
//! by its own factors once per value of its index. Factor series are
//! cached by their evaluated parameters.

use std::collections::HashMap;
use std::rc::Rc;

use num_rational::Rational64;

use super::enumerate::Compiled;
use super::{FactorKind, Length, SumFactor, SumOptions, SumSpec};
use crate::error::{Error, Result};
use crate::products::{pochhammer_finite, pochhammer_finite_inv, pochhammer_inf, pochhammer_inf_inv, q_binomial};
use crate::rat::{fmt_rational64, Rat};
use crate::series::QSeries;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Poch { sign: i64, arg: Rational64, step: Rational64, len: Option<i64>, den: bool },
    QBin { top: i64, bottom: i64, base: Rational64, den: bool },
}

type Terms = Rc<Vec<(i64, Rat)>>;

struct Evaluator<'a> {
    c: Compiled<'a>,
    /// Least scaled exponent among admissible points.
    lo: i64,
    /// Scaled truncation.
    t: i64,
    /// Order to which factor series are needed.
    rel_order: Rational64,
    level_factors: Vec<Vec<usize>>,
    cache: HashMap<Vec<Key>, Terms>,
    scratch: Vec<Vec<Rat>>,
    cands: Vec<Vec<i64>>,
}

pub(super) fn evaluate(spec: &SumSpec, order: Rational64, bx: &[i64], opts: &SumOptions) -> Result<QSeries> {
    let c = Compiled::new(spec, order, bx)?;
    let (count, min) = c.count(opts.max_points);
    if count > opts.max_points {
        return Err(Error::Divergent(format!("more than {} lattice points below the truncation order", opts.max_points)));
    }
    let d = c.d;
    let t = (c.limit2 / 2) as i64;
    let Some(min2) = min else {
        return Ok(QSeries::from_scaled(d, t, []));
    };
    let lo = (min2 / 2) as i64;
    let r = c.r;
    let mut level_factors = vec![Vec::new(); r];
    let mut const_factors = Vec::new();
    for (i, f) in spec.factors.iter().enumerate() {
        match f.last_var() {
            Some(v) => level_factors[v].push(i),
            None => const_factors.push(i),
        }
    }
    let len = (t - lo + 1) as usize;
    let mut ev = Evaluator {
        c,
        lo,
        t,
        rel_order: Rational64::new(t - lo, d),
        level_factors,
        cache: HashMap::new(),
        scratch: vec![vec![Rat::ZERO; len]; r],
        cands: vec![Vec::new(); r],
    };
    let mut acc = vec![Rat::ZERO; len];
    let mut n = vec![0i64; r];
    ev.level(0, &mut n, &mut acc)?;
    let terms = acc.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as i64 + lo, x));
    let mut result = QSeries::from_scaled(d, t, terms);
    if !const_factors.is_empty() {
        let f = ev.factor_product(&const_factors, &n)?;
        let f = QSeries::from_scaled(d, t - lo, f.iter().cloned());
        result = result.mul_capped(&f, order);
    }
    Ok(result.reduce_denom())
}

impl Evaluator<'_> {
    fn level(&mut self, d: usize, n: &mut [i64], acc: &mut [Rat]) -> Result<()> {
        let mut cands = std::mem::take(&mut self.cands[d]);
        self.c.candidates(d, n, &mut cands);
        let leaf = d + 1 == self.c.r;
        let has_factors = !self.level_factors[d].is_empty();
        let mut result = Ok(());
        for &x in &cands {
            n[d] = x;
            let step = if leaf { self.leaf(d, n, acc, has_factors) } else { self.inner(d, n, acc, has_factors) };
            if let Err(e) = step {
                result = Err(e);
                break;
            }
        }
        self.cands[d] = cands;
        result
    }

    fn leaf(&mut self, d: usize, n: &mut [i64], acc: &mut [Rat], has_factors: bool) -> Result<()> {
        let e = (self.c.exponent2(n) / 2) as i64;
        if e > self.t {
            return Ok(());
        }
        let negative = match &self.c.spec.sign {
            Some(s) => s.eval_int(n, "sign exponent")?.rem_euclid(2) == 1,
            None => false,
        };
        if !has_factors {
            let slot = &mut acc[(e - self.lo) as usize];
            if negative {
                *slot -= &Rat::ONE;
            } else {
                *slot += &Rat::ONE;
            }
            return Ok(());
        }
        let idx = self.level_factors[d].clone();
        let f = self.factor_product(&idx, n)?;
        let room = self.t - e;
        for (fe, fc) in f.iter() {
            if *fe > room {
                break;
            }
            let slot = &mut acc[(e + fe - self.lo) as usize];
            if negative {
                *slot -= fc;
            } else {
                *slot += fc;
            }
        }
        Ok(())
    }

    fn inner(&mut self, d: usize, n: &mut [i64], acc: &mut [Rat], has_factors: bool) -> Result<()> {
        if !has_factors {
            return self.level(d + 1, n, acc);
        }
        let mut tmp = std::mem::take(&mut self.scratch[d]);
        let res = self.level(d + 1, n, &mut tmp);
        if res.is_ok() {
            let idx = self.level_factors[d].clone();
            match self.factor_product(&idx, n) {
                Ok(f) => {
                    for (i, slot) in tmp.iter_mut().enumerate() {
                        if slot.is_zero() {
                            continue;
                        }
                        let v = std::mem::take(slot);
                        let room = self.t - (i as i64 + self.lo);
                        for (fe, fc) in f.iter() {
                            if *fe > room {
                                break;
                            }
                            acc[i + *fe as usize].add_mul(&v, fc);
                        }
                    }
                }
                Err(e) => {
                    tmp.iter_mut().for_each(|x| *x = Rat::ZERO);
                    self.scratch[d] = tmp;
                    return Err(e);
                }
            }
        } else {
            tmp.iter_mut().for_each(|x| *x = Rat::ZERO);
        }
        self.scratch[d] = tmp;
        res
    }

    /// Product of the listed factors at `n`, as scaled terms over the
    /// common denominator.
    fn factor_product(&mut self, idx: &[usize], n: &[i64]) -> Result<Terms> {
        let spec = self.c.spec;
        let keys = idx.iter().map(|&i| key_for(&spec.factors[i], n)).collect::<Result<Vec<_>>>()?;
        if let Some(t) = self.cache.get(&keys) {
            return Ok(Rc::clone(t));
        }
        let mut acc: Option<QSeries> = None;
        for k in &keys {
            let s = series_for(k, self.rel_order)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.mul_capped(&s, self.rel_order),
            });
        }
        let s = acc.expect("at least one factor").lift(self.c.d);
        let terms: Terms = Rc::new(s.scaled_terms().to_vec());
        self.cache.insert(keys, Rc::clone(&terms));
        Ok(terms)
    }
}

fn key_for(f: &SumFactor, n: &[i64]) -> Result<Key> {
    Ok(match &f.kind {
        FactorKind::Poch { sign, arg, step, len } => {
            let a = arg.eval(n);
            if a < Rational64::from_integer(0) {
                return Err(Error::Eval(format!(
                    "Pochhammer argument exponent {} is negative at n = {n:?}",
                    fmt_rational64(&a)
                )));
            }
            let len = match len {
                Length::Finite(l) => {
                    let v = l.eval_int(n, "Pochhammer length")?;
                    if v < 0 {
                        return Err(Error::NegativeLength(v));
                    }
                    Some(v)
                }
                Length::Infinite => None,
            };
            Key::Poch { sign: *sign, arg: a, step: *step, len, den: f.den }
        }
        FactorKind::QBin { top, bottom, base } => Key::QBin {
            top: top.eval_int(n, "binomial top")?,
            bottom: bottom.eval_int(n, "binomial bottom")?,
            base: *base,
            den: f.den,
        },
    })
}

fn series_for(k: &Key, order: Rational64) -> Result<QSeries> {
    match *k {
        Key::Poch { sign, arg, step, len: Some(l), den: false } => pochhammer_finite(sign, arg, step, l, order),
        Key::Poch { sign, arg, step, len: Some(l), den: true } => pochhammer_finite_inv(sign, arg, step, l, order),
        Key::Poch { sign, arg, step, len: None, den: false } => pochhammer_inf(sign, arg, step, order),
        Key::Poch { sign, arg, step, len: None, den: true } => pochhammer_inf_inv(sign, arg, step, order),
        Key::QBin { top, bottom, base, den } => {
            let b = q_binomial(top, bottom, base, order)?;
            if den {
                b.invert()
            } else {
                Ok(b)
            }
        }
    }
}
