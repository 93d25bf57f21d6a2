//! Evaluation of parsed expressions to truncated series.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use super::ast::*;
use super::poly::{eval_const, eval_int, to_poly, Bindings, Poly};
use crate::error::{Error, Result};
use crate::products::{eta_j, pochhammer_finite, pochhammer_inf, q_binomial, theta_product, theta_sum};
use crate::rat::{fmt_rational64, Rat};
use crate::series::QSeries;
use crate::summation::{
    multi_sum_with, Affine, Constraint, Domain, FactorKind, Length, NahmDatum, SumFactor, SumOptions, SumSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub sum: SumOptions,
}

pub fn eval_expr(e: &Expr, b: &Bindings, order: Rational64) -> Result<QSeries> {
    eval_expr_with(e, b, order, &EvalOptions::default())
}

/// Evaluates `e` to at least `order`. Negative valuations inside products
/// and quotients lower the known order, so evaluation is repeated further
/// out until the requested order is reached.
pub fn eval_expr_with(e: &Expr, b: &Bindings, order: Rational64, opts: &EvalOptions) -> Result<QSeries> {
    let mut inner = order;
    for _ in 0..6 {
        let s = eval_at(e, b, inner, opts)?;
        if s.order() >= order {
            return Ok(s.truncate(order));
        }
        inner += order - s.order() + Rational64::one();
    }
    Err(Error::Eval(format!("could not evaluate `{e}` to order {}", fmt_rational64(&order))))
}

fn non_unit(err: Error) -> Error {
    match err {
        Error::NotInvertible => Error::NonUnit,
        e => e,
    }
}

fn eval_at(e: &Expr, b: &Bindings, n: Rational64, opts: &EvalOptions) -> Result<QSeries> {
    Ok(match e {
        Expr::Scalar(s) => QSeries::constant(Rat::from(eval_const(s, b)?), n),
        Expr::Q(x) => QSeries::monomial(Rat::ONE, eval_const(x, b)?, n),
        Expr::Neg(a) => eval_at(a, b, n, opts)?.neg(),
        Expr::Add(x, y) => eval_at(x, b, n, opts)?.add(&eval_at(y, b, n, opts)?),
        Expr::Sub(x, y) => eval_at(x, b, n, opts)?.sub(&eval_at(y, b, n, opts)?),
        Expr::Mul(x, y) => eval_at(x, b, n, opts)?.mul(&eval_at(y, b, n, opts)?),
        Expr::Div(x, y) => eval_at(x, b, n, opts)?.div(&eval_at(y, b, n, opts)?).map_err(non_unit)?,
        Expr::Pow(x, k) => {
            let k = eval_int(k, b, "power")?;
            eval_at(x, b, n, opts)?.pow(k).map_err(non_unit)?
        }
        Expr::Poch(p) => eval_poch(p, b, n)?,
        Expr::QBin(q) => {
            let base = eval_const(&q.base, b)?;
            q_binomial(eval_int(&q.top, b, "binomial top")?, eval_int(&q.bottom, b, "binomial bottom")?, base, n)?
        }
        Expr::Theta { a, m } => theta_sum(eval_const(a, b)?, eval_const(m, b)?, n)?,
        Expr::J { a: None, m } => eta_j(eval_const(m, b)?, n)?,
        Expr::J { a: Some(a), m } => theta_product(eval_const(a, b)?, eval_const(m, b)?, n)?,
        Expr::Sum(s) => multi_sum_with(&sum_spec(s, b)?, n, &opts.sum)?,
        Expr::Nahm { a, b: lin, c } => {
            let a = a.iter().map(|row| row.iter().map(|x| eval_const(x, b)).collect()).collect::<Result<Vec<Vec<_>>>>()?;
            let lin = lin.iter().map(|x| eval_const(x, b)).collect::<Result<Vec<_>>>()?;
            let d = NahmDatum { a, b: lin, c: eval_const(c, b)? };
            if d.a.len() != d.rank() || d.a.iter().any(|r| r.len() != d.rank()) {
                return Err(Error::InvalidArgument("Nahm matrix and vector sizes differ".into()));
            }
            multi_sum_with(&d.to_sum_spec(), n, &opts.sum)?
        }
    })
}

/// The sign `s` with `(s q^a; q^m)` and `s = +-1`.
fn poch_sign(arg: &PochArg, b: &Bindings) -> Result<i64> {
    let c = match &arg.coef {
        Some(c) => eval_const(c, b)?,
        None => Rational64::one(),
    };
    let c = if arg.neg { -c } else { c };
    if c == Rational64::one() {
        Ok(1)
    } else if c == -Rational64::one() {
        Ok(-1)
    } else {
        Err(Error::Eval(format!("Pochhammer coefficient {} is not +1 or -1", fmt_rational64(&c))))
    }
}

fn eval_poch(p: &Poch, b: &Bindings, n: Rational64) -> Result<QSeries> {
    let sign = poch_sign(&p.arg, b)?;
    let a = match &p.arg.expo {
        Some(x) => eval_const(x, b)?,
        None => Rational64::zero(),
    };
    let m = eval_const(&p.step, b)?;
    match &p.len {
        Some(l) => pochhammer_finite(sign, a, m, eval_int(l, b, "Pochhammer length")?, n),
        None => match pochhammer_inf(sign, a, m, n) {
            Err(Error::VanishingProduct) => Ok(QSeries::zero(n)),
            r => r,
        },
    }
}

fn affine(p: &Poly, r: usize, what: &str) -> Result<Affine> {
    if p.degree() > 1 {
        return Err(Error::Eval(format!("{what} must be affine in the summation indices")));
    }
    Ok(Affine { constant: p.constant_term(), coeffs: (0..r).map(|i| p.linear(i)).collect() })
}

/// Translates a sum literal into a [`SumSpec`] under the given bindings.
pub fn sum_spec(s: &SumLit, b: &Bindings) -> Result<SumSpec> {
    let vars = s.index_names();
    let r = vars.len();
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::Eval(format!("summation index `{v}` is repeated")));
        }
    }
    let mut spec = SumSpec::new(r);
    spec.domains = s
        .groups
        .iter()
        .flat_map(|g| g.names.iter().map(|_| if g.all_integers { Domain::Int } else { Domain::NonNeg }))
        .collect();
    let expo = to_poly(&s.expo, b, &vars)?;
    if expo.degree() > 2 {
        return Err(Error::Eval("sum exponent must be at most quadratic".into()));
    }
    for i in 0..r {
        for j in 0..r {
            spec.qa[i][j] = if i == j { expo.quadratic(i, i) * Rational64::from_integer(2) } else { expo.quadratic(i, j) };
        }
        spec.qb[i] = expo.linear(i);
    }
    spec.qc = expo.constant_term();
    if let Some(sg) = &s.sign {
        spec.sign = Some(affine(&to_poly(sg, b, &vars)?, r, "sign exponent")?);
    }
    for (list, den) in [(&s.num, false), (&s.den, true)] {
        for f in list {
            let kind = match &f.factor {
                SumFactorLit::Poch(p) => FactorKind::Poch {
                    sign: poch_sign(&p.arg, b)?,
                    arg: match &p.arg.expo {
                        Some(x) => affine(&to_poly(x, b, &vars)?, r, "Pochhammer argument")?,
                        None => Affine::constant(Rational64::zero(), r),
                    },
                    step: eval_const(&p.step, b)?,
                    len: match &p.len {
                        Some(l) => Length::Finite(affine(&to_poly(l, b, &vars)?, r, "Pochhammer length")?),
                        None => Length::Infinite,
                    },
                },
                SumFactorLit::QBin(q) => FactorKind::QBin {
                    top: affine(&to_poly(&q.top, b, &vars)?, r, "binomial top")?,
                    bottom: affine(&to_poly(&q.bottom, b, &vars)?, r, "binomial bottom")?,
                    base: eval_const(&q.base, b)?,
                },
            };
            for _ in 0..f.power {
                spec.factors.push(SumFactor { kind: kind.clone(), den });
            }
        }
    }
    for (l, rhs) in &s.constraints {
        let diff = SExpr::Sub(Box::new(l.clone()), Box::new(rhs.clone()));
        let a = affine(&to_poly(&diff, b, &vars)?, r, "constraint")?;
        let scale = a.coeffs.iter().chain([&a.constant]).fold(1i64, |acc, x| acc.lcm(x.denom()));
        let int = |x: &Rational64| (x * Rational64::from_integer(scale)).to_integer();
        spec.constraints.push(Constraint { coeffs: a.coeffs.iter().map(int).collect(), rhs: -int(&a.constant) });
    }
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::parse_expr;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn ev(src: &str, order: i64) -> QSeries {
        eval_expr(&parse_expr(src).unwrap(), &Bindings::new(), r(order)).unwrap()
    }

    fn same(a: &str, b: &str, order: i64) {
        let (x, y) = (ev(a, order), ev(b, order));
        assert_eq!(x.first_difference(&y, r(order)).unwrap(), None, "{a} vs {b}");
    }

    #[test]
    fn euler_pentagonal() {
        let s = ev("J(1)", 5);
        let exps: Vec<_> = s.terms().map(|(e, _)| e.to_integer()).collect();
        assert_eq!(exps, vec![0, 1, 2, 5]);
    }

    #[test]
    fn rogers_ramanujan_both_sides() {
        same("sum(n >= 0; expo = n^2; den = poch(q;q;n))", "1/(poch(q;q^5;inf)*poch(q^4;q^5;inf))", 40);
        same("sum(n >= 0; expo = n^2 + n; den = poch(q;q;n))", "J(5)/J(2, 5)", 40);
    }

    #[test]
    fn jacobi_triple_product_as_theta() {
        same("theta(1, 5)", "J(1, 5)", 50);
        same("theta(1/2, 3/2)", "J(1/2, 3/2)", 30);
    }

    #[test]
    fn negative_valuation_needs_more_room() {
        let s = ev("q^-3 * J(1)^-1 * q^3", 20);
        assert_eq!(s.order(), r(20));
        same("q^-3 * J(1)^-1 * q^3", "1/J(1)", 20);
    }

    #[test]
    fn vanishing_products() {
        assert!(ev("poch(1; q; inf)", 10).is_empty());
        assert!(ev("poch(q^0; q; 3)", 10).is_empty());
        same("poch(-1; q; inf)", "2*poch(-q; q; inf)", 20);
        let err = eval_expr(&parse_expr("1/poch(1; q; inf)").unwrap(), &Bindings::new(), r(10)).unwrap_err();
        assert_eq!(err, Error::NonUnit);
    }

    #[test]
    fn parameters_bind() {
        let e = parse_expr("sum(n >= 0; expo = n^2 + s*n; den = poch(q;q;n))").unwrap();
        let b = Bindings::from([("s".to_string(), r(1))]);
        let x = eval_expr(&e, &b, r(30)).unwrap();
        let y = ev("1/(poch(q^2;q^5;inf)*poch(q^3;q^5;inf))", 30);
        assert!(x.equal_up_to(&y, r(30)).unwrap());
        assert_eq!(eval_expr(&e, &Bindings::new(), r(5)).unwrap_err(), Error::UnboundParameter("s".into()));
    }

    #[test]
    fn constrained_and_bilateral() {
        // sum over n in Z of q^{n^2} is theta(-1) form: (-q, -q, q^2; q^2)
        same("sum(n in Z; expo = n^2)", "poch(-q;q^2;inf)^2*J(2)", 40);
        // constant term of a product of two geometric-type sums
        same("sum(i, j >= 0; expo = i^2 + j^2; den = poch(q;q;i)*poch(q;q;j); constraint = i = j)", "sum(n >= 0; expo = 2*n^2; den = poch(q;q;n)^2)", 40);
    }

    #[test]
    fn binomial_factors() {
        // q-binomial theorem at finite n: sum_k q^{k(k-1)/2} [n,k] = (-1;q)_n
        same("sum(k >= 0; expo = k^2/2 - k/2; num = qbin(6, k; q))", "poch(-1; q; 6)", 30);
    }

    #[test]
    fn nahm_literal() {
        same("nahm([[2]], [0], 0)", "sum(n >= 0; expo = n^2; den = poch(q;q;n))", 30);
    }
}
