use num_rational::Rational64;
use proptest::prelude::*;

use super::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn poly(order: i64, coeffs: &[i64]) -> QSeries {
    let terms: Vec<_> = coeffs.iter().enumerate().map(|(i, c)| (ri(i as i64), Rat::int(*c))).collect();
    QSeries::make(1, ri(order), &terms).unwrap()
}

fn coeffs(f: &QSeries, upto: i64) -> Vec<Rat> {
    (0..=upto).map(|e| f.coefficient(ri(e)).unwrap()).collect()
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|x| Rat::int(*x)).collect()
}

#[test]
fn make_series_basics() {
    let f = QSeries::make(1, ri(3), &[(ri(0), Rat::ONE), (ri(1), Rat::int(-1))]).unwrap();
    assert_eq!(f.to_string(), "1 - q + O(q^4)");

    let m = QSeries::make(60, ri(1), &[(r(-1, 60), Rat::ONE)]).unwrap();
    assert_eq!(m.denom(), 60);
    assert_eq!(m.valuation(), Some(r(-1, 60)));

    let z = QSeries::make(2, ri(2), &[(r(1, 2), Rat::ONE), (r(1, 2), Rat::int(-1))]).unwrap();
    assert!(z.is_empty());
}

#[test]
fn make_series_errors() {
    assert!(matches!(
        QSeries::make(2, ri(3), &[(r(1, 3), Rat::ONE)]),
        Err(Error::ExponentDenominator { .. })
    ));
    assert!(matches!(QSeries::make(1, ri(3), &[(ri(4), Rat::ONE)]), Err(Error::AboveTruncation { .. })));
}

#[test]
fn telescoping_product() {
    let f = poly(3, &[1, -1]);
    let g = poly(3, &[1, 1, 1, 1]);
    let p = &f * &g;
    assert_eq!(p.trunc_scaled(), 3);
    assert_eq!(coeffs(&p, 3), ints(&[1, 0, 0, 0]));
    assert_eq!(&poly(3, &[1, 1]) + &poly(3, &[1, -1]), poly(3, &[2]));
}

#[test]
fn mul_truncation_rule() {
    let f = poly(10, &[1, 1]);
    let g = poly(5, &[1, 2]);
    assert_eq!((&f * &g).trunc_scaled(), 5);
    // a valuation shift in f lets g's truncation reach further
    let f = QSeries::make(1, ri(10), &[(ri(2), Rat::ONE)]).unwrap();
    assert_eq!((&f * &g).trunc_scaled(), 7);
}

#[test]
fn invert_examples() {
    let g = poly(5, &[1, -1]).invert().unwrap();
    assert_eq!(coeffs(&g, 5), ints(&[1, 1, 1, 1, 1, 1]));

    let m = QSeries::make(1, ri(3), &[(ri(-1), Rat::int(2))]).unwrap().invert().unwrap();
    assert_eq!(m.scaled_terms(), &[(1, Rat::new(1, 2))]);
    assert_eq!(m.trunc_scaled(), 5);

    assert_eq!(QSeries::zero(ri(4)).invert(), Err(Error::NotInvertible));
}

#[test]
fn invert_pentagonal() {
    let euler = poly(5, &[1, -1, -1, 0, 0, 1]);
    let p = euler.invert().unwrap();
    assert_eq!(coeffs(&p, 5), ints(&[1, 1, 2, 3, 5, 7]));
    assert_eq!(p.coefficient(ri(4)).unwrap(), Rat::int(5));
}

#[test]
fn rescale_examples() {
    let f = poly(4, &[1, 1]).rescale_exponents(ri(2)).unwrap();
    assert_eq!(f, QSeries::make(1, ri(8), &[(ri(0), Rat::ONE), (ri(2), Rat::ONE)]).unwrap());
    let h = QSeries::make(2, ri(3), &[(r(1, 2), Rat::ONE)]).unwrap();
    let h2 = h.rescale_exponents(ri(2)).unwrap();
    assert_eq!(h2.denom(), 1);
    assert_eq!(h2.scaled_terms(), &[(1, Rat::ONE)]);
    assert!(h.rescale_exponents(ri(0)).is_err());
}

#[test]
fn neg_q_examples() {
    let f = poly(2, &[1, 1, 1]);
    assert_eq!(f.substitute_neg_q().unwrap(), poly(2, &[1, -1, 1]));
    let h = QSeries::make(2, ri(3), &[(r(1, 2), Rat::ONE)]).unwrap();
    assert_eq!(h.substitute_neg_q(), Err(Error::FractionalExponents(2)));
}

#[test]
fn coefficient_and_equality() {
    let f = QSeries::make(1, ri(6), &[(ri(0), Rat::ONE), (ri(1), Rat::int(-1)), (ri(2), Rat::int(-1)), (ri(5), Rat::ONE)]).unwrap();
    assert_eq!(f.coefficient(ri(3)).unwrap(), Rat::ZERO);
    assert!(matches!(f.coefficient(ri(7)), Err(Error::BeyondTruncation { .. })));
    let a = poly(10, &[1, 1]);
    let b = QSeries::make(1, ri(10), &[(ri(0), Rat::ONE), (ri(1), Rat::ONE), (ri(9), Rat::ONE)]).unwrap();
    assert!(a.equal_up_to(&b, ri(5)).unwrap());
    assert_eq!(a.first_difference(&b, ri(10)).unwrap(), Some(ri(9)));
    assert!(a.equal_up_to(&b, ri(11)).is_err());
}

#[test]
fn truncate_and_display() {
    let f = poly(6, &[1, 2, 3, 4]);
    let t = f.truncate(ri(2));
    assert_eq!(t.to_string(), "1 + 2*q + 3*q^2 + O(q^3)");
    // truncate never raises the known order
    assert_eq!(f.truncate(ri(100)).trunc_scaled(), 6);
    let h = QSeries::make(2, r(3, 2), &[(r(-1, 2), Rat::new(-1, 3))]).unwrap();
    assert_eq!(h.to_string(), "-1/3*q^(-1/2) + O(q^2)");
    assert_eq!(QSeries::zero(ri(3)).to_string(), "O(q^4)");
}

#[test]
fn shift_and_pow() {
    let f = poly(5, &[1, -1]);
    let g = f.shift(r(-1, 24));
    assert_eq!(g.denom(), 24);
    assert_eq!(g.valuation(), Some(r(-1, 24)));
    assert_eq!(g.order(), r(119, 24));
    let sq = f.pow(2).unwrap();
    assert_eq!(coeffs(&sq, 5), ints(&[1, -2, 1, 0, 0, 0]));
    let inv2 = f.pow(-2).unwrap();
    assert_eq!(coeffs(&inv2, 5), ints(&[1, 2, 3, 4, 5, 6]));
}

#[test]
fn tsv_round_trip_and_errors() {
    let f = QSeries::make(2, ri(3), &[(r(-1, 2), Rat::ONE), (ri(1), Rat::new(-5, 3))]).unwrap();
    let text = f.to_tsv();
    assert_eq!(text, "#qseries D=2 N=6\n-1/2\t1/1\n2/2\t-5/3\n");
    assert_eq!(parse_tsv(&text).unwrap(), f);
    assert!(parse_tsv("").is_err());
    assert!(parse_tsv("#qseries D=1 N=2\n3/1\t1/1\n").is_err());
    assert!(parse_tsv("#qseries D=1 N=5\n3/1\t1/1\n1/1\t1/1\n").is_err());
    assert!(parse_tsv("#qseries D=2 N=5\n3/1\t1/1\n").is_err());
}

fn arb_series(max_len: usize, order: i64) -> impl Strategy<Value = QSeries> {
    (1i64..=3, prop::collection::vec((-2i64..=order * 3, -5i64..=5, 1i64..=3), 0..max_len)).prop_map(
        move |(d, raw)| {
            let terms: Vec<_> = raw
                .into_iter()
                .filter(|(e, _, _)| *e <= order * d)
                .map(|(e, n, den)| (e, Rat::new(n, den)))
                .collect();
            QSeries::from_scaled(d, order * d, terms)
        },
    )
}

fn arb_unit(order: i64) -> impl Strategy<Value = QSeries> {
    (arb_series(12, order), -3i64..=3, 1i64..=4).prop_map(move |(h, v, c)| {
        // c q^v (1 + h') where h' has positive valuation
        let d = h.denom();
        let tail: Vec<_> = h.scaled_terms().iter().filter(|(e, _)| *e > 0).cloned().collect();
        let mut terms = vec![(0, Rat::ONE)];
        terms.extend(tail);
        QSeries::from_scaled(d, order * d, terms).scale(&Rat::int(c)).shift(ri(v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_laws(a in arb_series(10, 30), b in arb_series(10, 30), c in arb_series(10, 30)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        let n = ri(20);
        let l = &(&a * &b) * &c;
        let r = &a * &(&b * &c);
        let t = l.order().min(r.order()).min(n);
        prop_assert!(l.equal_up_to(&r, t).unwrap());
        let l = &a * &(&b + &c);
        let r = &(&a * &b) + &(&a * &c);
        let t = l.order().min(r.order()).min(n);
        prop_assert!(l.equal_up_to(&r, t).unwrap());
    }

    #[test]
    fn invert_is_inverse(f in arb_unit(30)) {
        let g = f.invert().unwrap();
        let p = &f * &g;
        prop_assert_eq!(p.trunc_scaled(), f.trunc_scaled() - f.valuation_scaled());
        prop_assert!(p.is_one_up_to_order());
    }

    #[test]
    fn neg_q_involution(f in arb_series(12, 30)) {
        let f = f.reduce_denom();
        prop_assume!(f.denom() == 1);
        prop_assert_eq!(f.substitute_neg_q().unwrap().substitute_neg_q().unwrap(), f);
    }

    #[test]
    fn rescale_composes(f in arb_series(12, 20), a in 1i64..5, ad in 1i64..4, b in 1i64..5, bd in 1i64..4) {
        let (a, b) = (r(a, ad), r(b, bd));
        prop_assert_eq!(
            f.rescale_exponents(a).unwrap().rescale_exponents(b).unwrap(),
            f.rescale_exponents(a * b).unwrap()
        );
    }

    #[test]
    fn truncation_monotone(f in arb_series(12, 30), g in arb_series(12, 30), n in 0i64..30) {
        let f = f.truncate(ri(30)).shift(ri(0));
        let f = QSeries::from_scaled(f.denom(), f.trunc_scaled(), f.scaled_terms().iter().filter(|(e, _)| *e >= 0).cloned());
        let g = QSeries::from_scaled(g.denom(), g.trunc_scaled(), g.scaled_terms().iter().filter(|(e, _)| *e >= 0).cloned());
        let n = ri(n);
        let lhs = (&f * &g).truncate(n);
        let rhs = &f.truncate(n) * &g.truncate(n);
        prop_assert!(lhs.equal_up_to(&rhs, n).unwrap());
    }

    #[test]
    fn tsv_round_trip(f in arb_series(15, 30)) {
        prop_assert_eq!(parse_tsv(&f.to_tsv()).unwrap(), f);
    }
}
