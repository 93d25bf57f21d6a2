//! Printing back to source form. `parse(print(e)) == e` for every parsed `e`.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_NEG: u8 = 3;
const P_ATOM: u8 = 5;

fn sprec(e: &SExpr) -> u8 {
    match e {
        SExpr::Add(..) | SExpr::Sub(..) => P_ADD,
        SExpr::Mul(..) | SExpr::Div(..) => P_MUL,
        SExpr::Neg(_) => P_NEG,
        SExpr::Pow(..) => 4,
        SExpr::Num(n) if *n < 0 => P_NEG,
        SExpr::Num(_) | SExpr::Var(_) => P_ATOM,
    }
}

fn write_s(out: &mut String, e: &SExpr, min: u8) {
    if sprec(e) < min {
        out.push('(');
        write_s(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        SExpr::Num(n) => write!(out, "{n}").expect("string write"),
        SExpr::Var(v) => out.push_str(v),
        SExpr::Neg(a) => {
            out.push('-');
            write_s(out, a, P_NEG);
        }
        SExpr::Add(a, b) | SExpr::Sub(a, b) => {
            write_s(out, a, P_ADD);
            out.push_str(if matches!(e, SExpr::Add(..)) { " + " } else { " - " });
            write_s(out, b, P_MUL);
        }
        SExpr::Mul(a, b) | SExpr::Div(a, b) => {
            write_s(out, a, P_MUL);
            out.push(if matches!(e, SExpr::Mul(..)) { '*' } else { '/' });
            write_s(out, b, P_NEG);
        }
        SExpr::Pow(a, b) => {
            write_s(out, a, P_ATOM);
            out.push('^');
            write_power(out, b);
        }
    }
}

/// Exponent after `^`: an atom, a negated atom, or a parenthesized expression.
fn write_power(out: &mut String, e: &SExpr) {
    match e {
        SExpr::Neg(a) if sprec(a) == P_ATOM => {
            out.push('-');
            write_s(out, a, P_ATOM);
        }
        _ => write_s(out, e, P_ATOM),
    }
}

fn write_base(out: &mut String, e: &SExpr) {
    out.push('q');
    if !e.is_one() {
        out.push('^');
        write_power(out, e);
    }
}

fn write_poch(out: &mut String, p: &Poch) {
    out.push_str("poch(");
    if p.arg.neg {
        out.push('-');
    }
    if let Some(c) = &p.arg.coef {
        write_s(out, c, P_ATOM);
        if p.arg.expo.is_some() {
            out.push('*');
        }
    }
    if let Some(e) = &p.arg.expo {
        write_base(out, e);
    }
    out.push_str("; ");
    write_base(out, &p.step);
    out.push_str("; ");
    match &p.len {
        Some(l) => write_s(out, l, 0),
        None => out.push_str("inf"),
    }
    out.push(')');
}

fn write_qbin(out: &mut String, b: &QBin) {
    out.push_str("qbin(");
    write_s(out, &b.top, 0);
    out.push_str(", ");
    write_s(out, &b.bottom, 0);
    out.push_str("; ");
    write_base(out, &b.base);
    out.push(')');
}

fn write_factors(out: &mut String, fs: &[FactorPow]) {
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push_str(" * ");
        }
        match &f.factor {
            SumFactorLit::Poch(p) => write_poch(out, p),
            SumFactorLit::QBin(b) => write_qbin(out, b),
        }
        if f.power != 1 {
            write!(out, "^{}", f.power).expect("string write");
        }
    }
}

fn write_list(out: &mut String, xs: &[SExpr]) {
    out.push('[');
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_s(out, x, 0);
    }
    out.push(']');
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => P_ADD,
        Expr::Mul(..) | Expr::Div(..) => P_MUL,
        Expr::Neg(_) => P_NEG,
        Expr::Pow(..) => 4,
        Expr::Q(x) if !x.is_one() => 4,
        // a scalar prints through the scalar printer; keep compound ones parenthesized
        Expr::Scalar(s) => sprec(s).min(P_ATOM),
        _ => P_ATOM,
    }
}

fn write_e(out: &mut String, e: &Expr, min: u8) {
    if prec(e) < min {
        out.push('(');
        write_e(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Scalar(s) => write_s(out, s, min),
        Expr::Q(x) => write_base(out, x),
        Expr::Neg(a) => {
            out.push('-');
            write_e(out, a, P_NEG);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_e(out, a, P_ADD);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_e(out, b, P_MUL);
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            write_e(out, a, P_MUL);
            out.push_str(if matches!(e, Expr::Mul(..)) { " * " } else { " / " });
            write_e(out, b, P_NEG);
        }
        Expr::Pow(a, x) => {
            // `q^x` would reparse as a monomial
            if matches!(**a, Expr::Q(ref y) if y.is_one()) {
                out.push_str("(q)");
            } else {
                write_e(out, a, P_ATOM);
            }
            out.push('^');
            write_power(out, x);
        }
        Expr::Poch(p) => write_poch(out, p),
        Expr::QBin(b) => write_qbin(out, b),
        Expr::Theta { a, m } => {
            out.push_str("theta(");
            write_s(out, a, 0);
            out.push_str(", ");
            write_s(out, m, 0);
            out.push(')');
        }
        Expr::J { a, m } => {
            out.push_str("J(");
            if let Some(a) = a {
                write_s(out, a, 0);
                out.push_str(", ");
            }
            write_s(out, m, 0);
            out.push(')');
        }
        Expr::Sum(s) => write_sum(out, s),
        Expr::Nahm { a, b, c } => {
            out.push_str("nahm([");
            for (i, row) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_list(out, row);
            }
            out.push_str("], ");
            write_list(out, b);
            out.push_str(", ");
            write_s(out, c, 0);
            out.push(')');
        }
    }
}

fn write_sum(out: &mut String, s: &SumLit) {
    out.push_str("sum(");
    for (i, g) in s.groups.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&g.names.join(", "));
        out.push_str(if g.all_integers { " in Z" } else { " >= 0" });
    }
    out.push_str("; expo = ");
    write_s(out, &s.expo, 0);
    if let Some(sg) = &s.sign {
        out.push_str("; sign = ");
        write_s(out, sg, 0);
    }
    if !s.num.is_empty() {
        out.push_str("; num = ");
        write_factors(out, &s.num);
    }
    if !s.den.is_empty() {
        out.push_str("; den = ");
        write_factors(out, &s.den);
    }
    for (l, r) in &s.constraints {
        out.push_str("; constraint = ");
        write_s(out, l, 0);
        out.push_str(" = ");
        write_s(out, r, 0);
    }
    out.push(')');
}

impl Display for SExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_s(&mut s, self, 0);
        f.write_str(&s)
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_e(&mut s, self, 0);
        f.write_str(&s)
    }
}
