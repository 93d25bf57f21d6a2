use num_rational::Rational64;

use super::*;
use crate::products::{eval_product_spec, ProductSpec};
use crate::rat::Rat;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// `1/(q^step; q^step)_{n_var}` as a sum factor.
fn qq_den(var: usize, step: i64, rank: usize) -> SumFactor {
    SumFactor {
        kind: FactorKind::Poch {
            sign: 1,
            arg: Affine::constant(ri(step), rank),
            step: ri(step),
            len: Length::Finite(Affine::var(var, ri(1), ri(0), rank)),
        },
        den: true,
    }
}

fn quad(rank: usize, entries: &[(usize, usize, Rational64)], lin: &[Rational64]) -> SumSpec {
    let mut s = SumSpec::new(rank);
    for &(i, j, v) in entries {
        s.qa[i][j] = v;
        s.qa[j][i] = v;
    }
    s.qb = lin.to_vec();
    s
}

fn coeff_list(f: &QSeries, shift: Rational64, upto: i64) -> Vec<Rat> {
    (0..=upto).map(|k| f.coefficient(shift + ri(k)).unwrap()).collect()
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|x| Rat::int(*x)).collect()
}

#[test]
fn rank_one_nahm_sum() {
    let d = NahmDatum { a: vec![vec![ri(2)]], b: vec![ri(0)], c: r(-1, 60) };
    let f = nahm_sum(&d, ri(5)).unwrap();
    assert_eq!(coeff_list(&f, r(-1, 60), 5), ints(&[1, 1, 1, 1, 2, 2]));
    assert_eq!(f.valuation(), Some(r(-1, 60)));
}

#[test]
fn only_the_origin_below_the_order() {
    let d = NahmDatum { a: vec![vec![ri(2)]], b: vec![ri(3)], c: r(1, 7) };
    let f = nahm_sum(&d, r(1, 2)).unwrap();
    assert_eq!(f.scaled_terms().len(), 1);
    assert_eq!(f.valuation(), Some(r(1, 7)));
}

#[test]
fn empty_sum_is_zero() {
    let mut s = quad(1, &[(0, 0, ri(2))], &[ri(0)]);
    s.qc = ri(10);
    let f = multi_sum(&s, ri(5)).unwrap();
    assert!(f.is_empty());
    assert_eq!(f.order(), ri(5));
}

#[test]
fn example_seven_case_five_constant_term() {
    // 2i^2+2j^2+2k^2+2ij+2ik-2i-j-k over (q^2;q^2) denominators
    let mut s = quad(3, &[(0, 0, ri(4)), (1, 1, ri(4)), (2, 2, ri(4)), (0, 1, ri(2)), (0, 2, ri(2))], &[ri(-2), ri(-1), ri(-1)]);
    for v in 0..3 {
        s.factors.push(qq_den(v, 2, 3));
    }
    let f = multi_sum(&s, ri(10)).unwrap();
    assert_eq!(f.coefficient(ri(0)).unwrap(), Rat::int(2));
    let rhs = eval_product_spec(&ProductSpec::new(Rat::int(2), ri(0)).j(2, 1).j(1, -1), ri(10)).unwrap();
    assert!(f.equal_up_to(&rhs, ri(10)).unwrap());
}

#[test]
fn slater_28_at_low_order() {
    // q^{n^2+n} (-q^2;q^2)_n / (q;q)_{2n+1}
    let mut s = quad(1, &[(0, 0, ri(2))], &[ri(1)]);
    s.factors.push(SumFactor {
        kind: FactorKind::Poch { sign: -1, arg: Affine::constant(ri(2), 1), step: ri(2), len: Length::Finite(Affine::var(0, ri(1), ri(0), 1)) },
        den: false,
    });
    s.factors.push(SumFactor {
        kind: FactorKind::Poch { sign: 1, arg: Affine::constant(ri(1), 1), step: ri(1), len: Length::Finite(Affine::var(0, ri(2), ri(1), 1)) },
        den: true,
    });
    let f = multi_sum(&s, ri(6)).unwrap();
    let rhs = eval_product_spec(&ProductSpec::new(Rat::ONE, ri(0)).j2(3, 12, 1).j(1, -1), ri(6)).unwrap();
    assert!(f.equal_up_to(&rhs, ri(6)).unwrap());
}

#[test]
fn bressoud_corollary_double_sum() {
    // q^{i^2+2ij+2j^2}/((q;q)_i (q^2;q^2)_j)
    let mut s = quad(2, &[(0, 0, ri(2)), (1, 1, ri(4)), (0, 1, ri(2))], &[ri(0), ri(0)]);
    s.factors.push(qq_den(0, 1, 2));
    s.factors.push(qq_den(1, 2, 2));
    let f = multi_sum(&s, ri(8)).unwrap();
    let rhs = eval_product_spec(&ProductSpec::new(Rat::ONE, ri(0)).j(3, 2).j(1, -1).j(6, -1), ri(8)).unwrap();
    assert!(f.equal_up_to(&rhs, ri(8)).unwrap());
}

fn durfee(n: i64) -> SumSpec {
    // q^{jk}/((q)_j (q)_k) with j - k = n
    let mut s = quad(2, &[(0, 1, ri(1))], &[ri(0), ri(0)]);
    s.factors.push(qq_den(0, 1, 2));
    s.factors.push(qq_den(1, 1, 2));
    s.constraints.push(Constraint { coeffs: vec![1, -1], rhs: n });
    s
}

#[test]
fn durfee_rectangles() {
    for n in [0, 1, -2] {
        let f = constrained_sum(&durfee(n), ri(4)).unwrap();
        assert_eq!(coeff_list(&f, ri(0), 4), ints(&[1, 1, 2, 3, 5]), "n = {n}");
    }
    let f = constrained_sum(&durfee(3), ri(30)).unwrap();
    let p = eval_product_spec(&ProductSpec::new(Rat::ONE, ri(0)).j(1, -1), ri(30)).unwrap();
    assert_eq!(f, p);
}

#[test]
fn inconsistent_constraints_give_zero() {
    let mut s = durfee(0);
    s.constraints.push(Constraint { coeffs: vec![2, -2], rhs: 1 });
    assert!(constrained_sum(&s, ri(10)).unwrap().is_empty());
}

#[test]
fn z_indices_reproduce_the_jacobi_sum() {
    // sum over l in Z of (-1)^l q^{5 l(l-1)/2 + l}
    let mut s = quad(1, &[(0, 0, ri(5))], &[r(-3, 2)]);
    s.domains = vec![Domain::Int];
    s.sign = Some(Affine::var(0, ri(1), ri(0), 1));
    let f = multi_sum(&s, ri(40)).unwrap();
    let t = crate::products::theta_product(ri(1), ri(5), ri(40)).unwrap();
    assert_eq!(f, t);
}

#[test]
fn bound_box_examples() {
    let s = NahmDatum { a: vec![vec![ri(2)]], b: vec![ri(0)], c: ri(0) }.to_sum_spec();
    for n in [5, 10, 40, 60] {
        let m = bound_box(&s, ri(n), &SumOptions::default()).unwrap();
        let want = (n as f64).sqrt().ceil() as i64 + 1;
        assert_eq!(m, vec![want], "N = {n}");
    }
    let bad = NahmDatum { a: vec![vec![ri(-1)]], b: vec![ri(0)], c: ri(0) }.to_sum_spec();
    assert!(matches!(bound_box(&bad, ri(10), &SumOptions::default()), Err(Error::Divergent(_))));
    // a singular form whose kernel leaves the orthant still has a box
    let mut sing = quad(3, &[(0, 0, ri(2)), (1, 1, ri(1)), (2, 2, ri(1)), (0, 1, ri(1)), (0, 2, ri(-1))], &[ri(0), r(-1, 2), r(-1, 2)]);
    for v in 0..3 {
        sing.factors.push(qq_den(v, 1, 3));
    }
    assert!(bound_box(&sing, ri(20), &SumOptions::default()).is_ok());
}

#[test]
fn larger_box_changes_nothing() {
    let mut s = quad(3, &[(0, 0, ri(2)), (1, 1, ri(2)), (2, 2, ri(2)), (0, 1, ri(1)), (0, 2, ri(1))], &[ri(0), ri(1), ri(-1)]);
    for v in 0..3 {
        s.factors.push(qq_den(v, 1, 3));
    }
    let bx = bound_box(&s, ri(20), &SumOptions::default()).unwrap();
    let a = multi_sum_with_box(&s, ri(20), &bx).unwrap();
    let wider: Vec<i64> = bx.iter().map(|m| m + 5).collect();
    assert_eq!(a, multi_sum_with_box(&s, ri(20), &wider).unwrap());
}

#[test]
fn swapping_symmetric_indices() {
    let mut s = quad(3, &[(0, 0, ri(2)), (1, 1, ri(2)), (2, 2, ri(2)), (0, 1, ri(1)), (0, 2, ri(1))], &[ri(0), r(1, 3), r(-1, 3)]);
    for v in 0..3 {
        s.factors.push(qq_den(v, 1, 3));
    }
    let sw = s.swap_indices(1, 2);
    assert_ne!(sw, s);
    // swapping also flips the linear part, so compare with nu -> -nu
    let mut s2 = s.clone();
    s2.qb = vec![ri(0), r(-1, 3), r(1, 3)];
    assert_eq!(multi_sum(&sw, ri(15)).unwrap(), multi_sum(&s2, ri(15)).unwrap());
}

#[test]
fn bad_inputs_are_rejected() {
    let mut s = quad(1, &[(0, 0, ri(2))], &[ri(0)]);
    s.factors.push(SumFactor {
        kind: FactorKind::Poch { sign: 1, arg: Affine::constant(ri(1), 1), step: ri(1), len: Length::Finite(Affine::var(0, ri(1), ri(-2), 1)) },
        den: true,
    });
    assert!(matches!(multi_sum(&s, ri(10)), Err(Error::NegativeLength(-2))));
    let mut asym = SumSpec::new(2);
    asym.qa[0][1] = ri(1);
    assert!(multi_sum(&asym, ri(3)).is_err());
    let mut z = SumSpec::new(1);
    z.domains = vec![Domain::Int];
    assert!(multi_sum(&z, ri(3)).is_err());
}
