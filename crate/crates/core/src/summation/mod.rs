//! Lattice sums: Nahm sums, general multi-sums with Pochhammer and
//! Gaussian-binomial factors, and linearly constrained sums (the
//! constant-term method).
//!
//! A [`SumSpec`] describes
//!
//! ```text
//! sum_{n} sign(n) q^{n^T Qa n / 2 + Qb . n + Qc} prod num(n) / prod den(n)
//! ```
//!
//! over `n` in a product of `Z>=0` and `Z`, optionally restricted by
//! integer equations `c . n = d`.

mod enumerate;
mod eval;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::QSeries;

pub use enumerate::bound_box;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    NonNeg,
    Int,
}

/// `constant + sum coeffs[i] * n_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine {
    pub constant: Rational64,
    pub coeffs: Vec<Rational64>,
}

impl Affine {
    pub fn constant(c: Rational64, rank: usize) -> Affine {
        Affine { constant: c, coeffs: vec![Rational64::zero(); rank] }
    }

    /// `c + k * n_var`.
    pub fn var(var: usize, k: Rational64, c: Rational64, rank: usize) -> Affine {
        let mut a = Affine::constant(c, rank);
        a.coeffs[var] = k;
        a
    }

    pub fn eval(&self, n: &[i64]) -> Rational64 {
        let mut v = self.constant;
        for (c, x) in self.coeffs.iter().zip(n) {
            if !c.is_zero() {
                v += c * Rational64::from_integer(*x);
            }
        }
        v
    }

    pub fn eval_int(&self, n: &[i64], what: &str) -> Result<i64> {
        let v = self.eval(n);
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(Error::Eval(format!("{what} is not an integer at n = {n:?}")))
        }
    }

    /// Highest index with a nonzero coefficient.
    pub fn last_var(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.coeffs.swap(i, j);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Length {
    Finite(Affine),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `(sign q^arg; q^step)_len`
    Poch { sign: i64, arg: Affine, step: Rational64, len: Length },
    /// Gaussian binomial `[top, bottom]` in base `q^base`.
    QBin { top: Affine, bottom: Affine, base: Rational64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumFactor {
    pub kind: FactorKind,
    /// Denominator factors divide the term.
    pub den: bool,
}

impl SumFactor {
    pub fn last_var(&self) -> Option<usize> {
        match &self.kind {
            FactorKind::Poch { arg, len, .. } => {
                let l = match len {
                    Length::Finite(a) => a.last_var(),
                    Length::Infinite => None,
                };
                arg.last_var().max(l)
            }
            FactorKind::QBin { top, bottom, .. } => top.last_var().max(bottom.last_var()),
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        match &mut self.kind {
            FactorKind::Poch { arg, len, .. } => {
                arg.swap(i, j);
                if let Length::Finite(a) = len {
                    a.swap(i, j);
                }
            }
            FactorKind::QBin { top, bottom, .. } => {
                top.swap(i, j);
                bottom.swap(i, j);
            }
        }
    }
}

/// Integer equation `coeffs . n = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumSpec {
    pub domains: Vec<Domain>,
    pub qa: Vec<Vec<Rational64>>,
    pub qb: Vec<Rational64>,
    pub qc: Rational64,
    /// Exponent of `-1`, if any.
    pub sign: Option<Affine>,
    pub factors: Vec<SumFactor>,
    pub constraints: Vec<Constraint>,
}

/// A sum restricted by linear equations; same representation, named for
/// the constant-term use case.
pub type ConstrainedSumSpec = SumSpec;

impl SumSpec {
    /// Rank-`r` sum over `Z>=0` with zero exponent and no factors.
    pub fn new(rank: usize) -> SumSpec {
        SumSpec {
            domains: vec![Domain::NonNeg; rank],
            qa: vec![vec![Rational64::zero(); rank]; rank],
            qb: vec![Rational64::zero(); rank],
            qc: Rational64::zero(),
            sign: None,
            factors: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.domains.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if r == 0 {
            return bad("a sum needs at least one index");
        }
        if self.qa.len() != r || self.qa.iter().any(|row| row.len() != r) || self.qb.len() != r {
            return bad("exponent dimensions do not match the number of indices");
        }
        for i in 0..r {
            for j in 0..r {
                if self.qa[i][j] != self.qa[j][i] {
                    return bad("quadratic form must be symmetric");
                }
            }
        }
        for (i, dom) in self.domains.iter().enumerate() {
            if *dom == Domain::Int && self.qa[i][i] <= Rational64::zero() {
                return bad("an index ranging over Z needs a positive square term");
            }
        }
        let affines = self
            .factors
            .iter()
            .flat_map(|f| match &f.kind {
                FactorKind::Poch { arg, len: Length::Finite(l), .. } => vec![arg, l],
                FactorKind::Poch { arg, .. } => vec![arg],
                FactorKind::QBin { top, bottom, .. } => vec![top, bottom],
            })
            .chain(self.sign.iter());
        for a in affines {
            if a.coeffs.len() != r {
                return bad("affine expression has the wrong number of indices");
            }
        }
        for f in &self.factors {
            let step = match &f.kind {
                FactorKind::Poch { sign, step, .. } => {
                    if *sign != 1 && *sign != -1 {
                        return bad("Pochhammer sign must be +1 or -1");
                    }
                    step
                }
                FactorKind::QBin { base, .. } => base,
            };
            if *step <= Rational64::zero() {
                return bad("Pochhammer step must be positive");
            }
        }
        for c in &self.constraints {
            if c.coeffs.len() != r || c.coeffs.iter().all(|x| *x == 0) {
                return bad("malformed constraint");
            }
        }
        Ok(())
    }

    /// The same sum with indices `i` and `j` exchanged.
    pub fn swap_indices(&self, i: usize, j: usize) -> SumSpec {
        let mut s = self.clone();
        s.domains.swap(i, j);
        s.qa.swap(i, j);
        for row in s.qa.iter_mut() {
            row.swap(i, j);
        }
        s.qb.swap(i, j);
        if let Some(a) = &mut s.sign {
            a.swap(i, j);
        }
        for f in s.factors.iter_mut() {
            f.swap(i, j);
        }
        for c in s.constraints.iter_mut() {
            c.coeffs.swap(i, j);
        }
        s
    }

    /// Adds `1/(q^step; q^step)_{n_var}` style denominators.
    pub fn with_factor(mut self, kind: FactorKind, den: bool) -> SumSpec {
        self.factors.push(SumFactor { kind, den });
        self
    }
}

/// Data `(A, B, C)` of the Nahm sum `f_{A,B,C}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NahmDatum {
    pub a: Vec<Vec<Rational64>>,
    pub b: Vec<Rational64>,
    pub c: Rational64,
}

impl NahmDatum {
    pub fn rank(&self) -> usize {
        self.b.len()
    }

    /// The equivalent [`SumSpec`] with `1/(q;q)_{n_i}` denominators.
    pub fn to_sum_spec(&self) -> SumSpec {
        let r = self.rank();
        let mut s = SumSpec::new(r);
        s.qa = self.a.clone();
        s.qb = self.b.clone();
        s.qc = self.c;
        let one = Rational64::from_integer(1);
        for i in 0..r {
            s.factors.push(SumFactor {
                kind: FactorKind::Poch {
                    sign: 1,
                    arg: Affine::constant(one, r),
                    step: one,
                    len: Length::Finite(Affine::var(i, one, Rational64::zero(), r)),
                },
                den: true,
            });
        }
        s
    }
}

/// Tuning knobs for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumOptions {
    /// How many times the search box may double before the sum is
    /// declared divergent.
    pub doubling_limit: u32,
    /// Upper limit on enumerated lattice points.
    pub max_points: u64,
    /// Extra margin added to every side of the box.
    pub box_extra: i64,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { doubling_limit: 10, max_points: 5_000_000, box_extra: 0 }
    }
}

pub fn multi_sum(spec: &SumSpec, order: Rational64) -> Result<QSeries> {
    multi_sum_with(spec, order, &SumOptions::default())
}

pub fn multi_sum_with(spec: &SumSpec, order: Rational64, opts: &SumOptions) -> Result<QSeries> {
    let mut bx = bound_box(spec, order, opts)?;
    for m in bx.iter_mut() {
        *m += opts.box_extra;
    }
    eval::evaluate(spec, order, &bx, opts)
}

/// Evaluates over the fixed box `[0, M_i]` (or `[-M_i, M_i]` for indices
/// over `Z`) without any stability search.
pub fn multi_sum_with_box(spec: &SumSpec, order: Rational64, bx: &[i64]) -> Result<QSeries> {
    spec.validate()?;
    eval::evaluate(spec, order, bx, &SumOptions::default())
}

pub fn constrained_sum(spec: &ConstrainedSumSpec, order: Rational64) -> Result<QSeries> {
    multi_sum(spec, order)
}

pub fn nahm_sum(d: &NahmDatum, order: Rational64) -> Result<QSeries> {
    if d.a.len() != d.rank() {
        return Err(Error::InvalidArgument("matrix and vector sizes differ".into()));
    }
    multi_sum(&d.to_sum_spec(), order)
}

#[cfg(test)]
mod tests;
