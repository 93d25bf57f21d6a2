//! Lattice-point enumeration with branch pruning.
//!
//! Exponents are handled in doubled scaled form: with `D` the common
//! denominator, `2 D e(n) = sum a_i n_i^2 + b_i n_i + sum_{i<j} c_ij n_i n_j + k`
//! with all coefficients integral.

use num_integer::Integer;
use num_rational::Rational64;

use super::{Domain, FactorKind, SumOptions, SumSpec};
use crate::error::{Error, Result};
use crate::series::scaled_order;

pub(super) struct Compiled<'a> {
    pub spec: &'a SumSpec,
    pub r: usize,
    pub d: i64,
    a: Vec<i128>,
    b: Vec<i128>,
    c: Vec<Vec<i128>>,
    k: i128,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    /// Doubled scaled truncation `2T`.
    pub limit2: i128,
    /// Constraints indexed by their highest variable.
    level_constraints: Vec<Vec<usize>>,
}

fn lcm_denoms<'a>(acc: i64, xs: impl IntoIterator<Item = &'a Rational64>) -> i64 {
    xs.into_iter().fold(acc, |acc, x| acc.lcm(x.denom()))
}

/// Smallest `D` making every exponent and factor argument a multiple of
/// `1/D` at integer points, also covering `order`.
pub(super) fn common_denominator(spec: &SumSpec, order: Rational64) -> i64 {
    let r = spec.rank();
    let half = Rational64::new(1, 2);
    let mut d = order.denom().to_owned();
    for i in 0..r {
        d = d.lcm((spec.qa[i][i]).denom());
        d = d.lcm((spec.qa[i][i] * half + spec.qb[i]).denom());
        for j in 0..i {
            d = d.lcm(spec.qa[i][j].denom());
        }
    }
    d = d.lcm(spec.qc.denom());
    for f in &spec.factors {
        match &f.kind {
            FactorKind::Poch { arg, step, .. } => {
                d = lcm_denoms(d, arg.coeffs.iter().chain([&arg.constant, step]));
            }
            FactorKind::QBin { base, .. } => d = d.lcm(base.denom()),
        }
    }
    d
}

fn to_int(x: Rational64) -> i128 {
    debug_assert!(x.is_integer());
    x.to_integer() as i128
}

impl<'a> Compiled<'a> {
    pub fn new(spec: &'a SumSpec, order: Rational64, bx: &[i64]) -> Result<Compiled<'a>> {
        spec.validate()?;
        let r = spec.rank();
        if bx.len() != r {
            return Err(Error::InvalidArgument("box size does not match the number of indices".into()));
        }
        let d = common_denominator(spec, order);
        let dd = Rational64::from_integer(d);
        let two = Rational64::from_integer(2);
        let a: Vec<i128> = (0..r).map(|i| to_int(spec.qa[i][i] * dd)).collect();
        let b: Vec<i128> = (0..r).map(|i| to_int((spec.qa[i][i] + two * spec.qb[i]) * dd) - a[i]).collect();
        let c: Vec<Vec<i128>> =
            (0..r).map(|i| (0..r).map(|j| if i == j { 0 } else { to_int(spec.qa[i][j] * dd * two) }).collect()).collect();
        let k = to_int(spec.qc * dd * two);
        let (mut lo, mut hi) = (Vec::with_capacity(r), Vec::with_capacity(r));
        for (m, dom) in bx.iter().zip(&spec.domains) {
            let m = (*m).max(0);
            hi.push(m);
            lo.push(if *dom == Domain::Int { -m } else { 0 });
        }
        let mut level_constraints = vec![Vec::new(); r];
        for (ci, con) in spec.constraints.iter().enumerate() {
            let last = con.coeffs.iter().rposition(|x| *x != 0).expect("validated");
            level_constraints[last].push(ci);
        }
        let limit2 = 2 * scaled_order(order, d) as i128;
        Ok(Compiled { spec, r, d, a, b, c, k, lo, hi, limit2, level_constraints })
    }

    /// Exact doubled scaled exponent at a full assignment.
    pub fn exponent2(&self, n: &[i64]) -> i128 {
        let mut s = self.k;
        for i in 0..self.r {
            let x = n[i] as i128;
            s += self.a[i] * x * x + self.b[i] * x;
            for j in 0..i {
                s += self.c[i][j] * x * n[j] as i128;
            }
        }
        s
    }

    /// Lower bound of the doubled exponent over the box, with indices
    /// `< d` fixed to `n[..d]`.
    fn lower_bound(&self, d: usize, n: &[i64]) -> i128 {
        let mut s = self.k;
        for i in 0..d {
            let x = n[i] as i128;
            s += self.a[i] * x * x + self.b[i] * x;
            for j in 0..i {
                s += self.c[i][j] * x * n[j] as i128;
            }
        }
        for v in d..self.r {
            let mut lin = self.b[v];
            for i in 0..d {
                lin += self.c[v][i] * n[i] as i128;
            }
            s += min_quadratic(self.a[v], lin, self.lo[v] as i128, self.hi[v] as i128);
            for w in (v + 1)..self.r {
                let c = self.c[v][w];
                if c != 0 {
                    let (l1, h1, l2, h2) =
                        (self.lo[v] as i128, self.hi[v] as i128, self.lo[w] as i128, self.hi[w] as i128);
                    let corners = [l1 * l2, l1 * h2, h1 * l2, h1 * h2];
                    s += corners.iter().map(|p| c * p).min().expect("four corners");
                }
            }
        }
        s
    }

    /// Admissible values of index `d` given `n[..d]`: in range, consistent
    /// with constraints ending at `d`, and not pruned by the lower bound.
    pub fn candidates(&self, d: usize, n: &mut [i64], out: &mut Vec<i64>) {
        out.clear();
        let cons = &self.level_constraints[d];
        let (mut from, mut to) = (self.lo[d], self.hi[d]);
        if let Some(&first) = cons.first() {
            let con = &self.spec.constraints[first];
            let partial: i64 = (0..d).map(|i| con.coeffs[i] * n[i]).sum();
            let rest = con.rhs - partial;
            let cd = con.coeffs[d];
            if rest % cd != 0 {
                return;
            }
            let x = rest / cd;
            if x < from || x > to {
                return;
            }
            from = x;
            to = x;
        }
        for x in from..=to {
            n[d] = x;
            let ok = cons.iter().skip(1).all(|&ci| {
                let con = &self.spec.constraints[ci];
                (0..=d).map(|i| con.coeffs[i] * n[i]).sum::<i64>() == con.rhs
            });
            if ok && self.lower_bound(d + 1, n) <= self.limit2 {
                out.push(x);
            }
        }
    }

    /// Number of admissible points and the least doubled exponent among
    /// them; stops early past `cap` points.
    pub fn count(&self, cap: u64) -> (u64, Option<i128>) {
        let mut n = vec![0i64; self.r];
        let mut bufs = vec![Vec::new(); self.r];
        let mut count = 0u64;
        let mut min = None;
        self.count_rec(0, &mut n, &mut bufs, &mut count, &mut min, cap);
        (count, min)
    }

    fn count_rec(&self, d: usize, n: &mut [i64], bufs: &mut [Vec<i64>], count: &mut u64, min: &mut Option<i128>, cap: u64) {
        let mut cands = std::mem::take(&mut bufs[d]);
        self.candidates(d, n, &mut cands);
        for &x in &cands {
            if *count > cap {
                break;
            }
            n[d] = x;
            if d + 1 == self.r {
                *count += 1;
                let e = self.exponent2(n);
                *min = Some(min.map_or(e, |m: i128| m.min(e)));
            } else {
                self.count_rec(d + 1, n, bufs, count, min, cap);
            }
        }
        bufs[d] = cands;
    }
}

/// Minimum of `a x^2 + b x` over integers in `[lo, hi]`.
fn min_quadratic(a: i128, b: i128, lo: i128, hi: i128) -> i128 {
    let f = |x: i128| a * x * x + b * x;
    let mut m = f(lo).min(f(hi));
    if a > 0 {
        // vertex at -b / 2a
        let v = Integer::div_floor(&(-b), &(2 * a));
        for x in [v, v + 1] {
            if x > lo && x < hi {
                m = m.min(f(x));
            }
        }
    }
    m
}

/// First box edge guess from the one-dimensional restriction `a x^2 + b x + k <= 2T`.
fn initial_edge(a: i128, b: i128, k: i128, limit2: i128) -> i64 {
    if a <= 0 {
        return 4;
    }
    let (af, bf, cf) = (a as f64, b as f64, (k - limit2) as f64);
    let disc = bf * bf - 4.0 * af * cf;
    if disc < 0.0 {
        return 1;
    }
    let root = (-bf + disc.sqrt()) / (2.0 * af);
    let r = root.abs().max((-bf - disc.sqrt()).abs() / (2.0 * af));
    (r.ceil() as i64).max(0) + 1
}

/// Per-index box bounds outside which no term reaches `order`.
///
/// Starts from the one-dimensional estimates and doubles the box until
/// the set of admissible points stops growing between `M` and `2M`.
pub fn bound_box(spec: &SumSpec, order: Rational64, opts: &SumOptions) -> Result<Vec<i64>> {
    spec.validate()?;
    let r = spec.rank();
    let probe = Compiled::new(spec, order, &vec![0; r])?;
    let mut m: Vec<i64> =
        (0..r).map(|i| initial_edge(probe.a[i], probe.b[i], probe.k, probe.limit2).min(1 << 20)).collect();
    let count_at = |bx: &[i64]| -> Result<u64> {
        let c = Compiled::new(spec, order, bx)?;
        let (n, _) = c.count(opts.max_points);
        if n > opts.max_points {
            return Err(Error::Divergent(format!("more than {} lattice points below the truncation order", opts.max_points)));
        }
        Ok(n)
    };
    let mut current = count_at(&m)?;
    for _ in 0..opts.doubling_limit {
        let doubled: Vec<i64> = m.iter().map(|x| (2 * x).max(1)).collect();
        let next = count_at(&doubled)?;
        if next == current {
            return Ok(m);
        }
        m = doubled;
        current = next;
    }
    Err(Error::Divergent(format!("box did not stabilize after {} doublings", opts.doubling_limit)))
}
