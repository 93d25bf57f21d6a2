//! Recursive-descent parser for series and scalar expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | atom ['^' power]
//! atom   := NUM | NAME | 'q' | '(' expr ')' | call
//! power  := satom | '-' satom
//! ```
//!
//! Scalar expressions (`SExpr`) use the same precedence without calls.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

const FUNCTIONS: [&str; 6] = ["poch", "qbin", "theta", "J", "sum", "nahm"];
const SUM_CLAUSES: [&str; 5] = ["expo", "sign", "num", "den", "constraint"];

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_at(src, 1, 1)
}

pub fn parse_expr_at(src: &str, line: usize, col: usize) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, line, col)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_scalar(src: &str) -> Result<SExpr, ParseError> {
    parse_scalar_at(src, 1, 1)
}

pub fn parse_scalar_at(src: &str, line: usize, col: usize) -> Result<SExpr, ParseError> {
    let mut p = Parser::new(src, line, col)?;
    let e = p.sexpr()?;
    p.finish()?;
    Ok(e)
}

/// `name in {v1, v2, ...}` groups separated by `;`.
pub fn parse_param_grid(src: &str, line: usize, col: usize) -> Result<Vec<(String, Vec<SExpr>)>, ParseError> {
    let mut p = Parser::new(src, line, col)?;
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        let name = p.name()?;
        p.keyword("in")?;
        p.sym("{")?;
        let mut values = vec![p.sexpr()?];
        while p.eat("," ) {
            values.push(p.sexpr()?);
        }
        p.sym("}")?;
        out.push((name, values));
        if !p.eat(";") {
            break;
        }
    }
    p.finish()?;
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str, line: usize, col: usize) -> Result<Parser, ParseError> {
        Ok(Parser { toks: tokenize(src, line, col)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.line, t.col, message).expecting(expected)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    pub(crate) fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.unexpected(&[s]))
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_ident(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[k]))
        }
    }

    pub(crate) fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "q" && !FUNCTIONS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["name"])),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected(&["operator", "end of input"]))
        }
    }

    // ---- scalar expressions ----

    pub(crate) fn sexpr(&mut self) -> Result<SExpr, ParseError> {
        let mut lhs = self.sterm()?;
        loop {
            if self.eat("+") {
                lhs = SExpr::Add(Box::new(lhs), Box::new(self.sterm()?));
            } else if self.eat("-") {
                lhs = SExpr::Sub(Box::new(lhs), Box::new(self.sterm()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn sterm(&mut self) -> Result<SExpr, ParseError> {
        let mut lhs = self.sunary()?;
        loop {
            if self.eat("*") {
                lhs = SExpr::Mul(Box::new(lhs), Box::new(self.sunary()?));
            } else if self.eat("/") {
                lhs = SExpr::Div(Box::new(lhs), Box::new(self.sunary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn sunary(&mut self) -> Result<SExpr, ParseError> {
        if self.eat("-") {
            return Ok(SExpr::Neg(Box::new(self.sunary()?)));
        }
        let base = self.satom()?;
        if self.eat("^") {
            return Ok(SExpr::Pow(Box::new(base), Box::new(self.spower()?)));
        }
        Ok(base)
    }

    fn spower(&mut self) -> Result<SExpr, ParseError> {
        if self.eat("-") {
            return Ok(SExpr::Neg(Box::new(self.satom()?)));
        }
        self.satom()
    }

    fn satom(&mut self) -> Result<SExpr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(SExpr::Num(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.sexpr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "q" => Err(self.error("`q` is not allowed in a scalar expression", &["number", "name", "("])),
            Tok::Ident(s) if FUNCTIONS.contains(&s.as_str()) => {
                Err(self.error(format!("`{s}` is not allowed in a scalar expression"), &["number", "name", "("]))
            }
            Tok::Ident(s) => {
                self.bump();
                if self.is_sym("(") {
                    self.pos -= 1;
                    return Err(self.error(format!("unknown function `{s}`"), &FUNCTIONS));
                }
                Ok(SExpr::Var(s))
            }
            _ => Err(self.unexpected(&["number", "name", "("])),
        }
    }

    // ---- series expressions ----

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let bare_q = self.is_ident("q");
        let base = self.atom()?;
        if self.eat("^") {
            let e = self.spower()?;
            return Ok(if bare_q { Expr::Q(e) } else { Expr::Pow(Box::new(base), e) });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let expected = ["number", "name", "q", "(", "function"];
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Scalar(SExpr::Num(n)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "q" => {
                self.bump();
                Ok(Expr::Q(SExpr::Num(1)))
            }
            Tok::Ident(s) => {
                if *self.peek_at(1) == Tok::Sym("(") {
                    return self.call(&s);
                }
                if FUNCTIONS.contains(&s.as_str()) {
                    self.bump();
                    return Err(self.unexpected(&["("]));
                }
                self.bump();
                Ok(Expr::Scalar(SExpr::Var(s)))
            }
            _ => Err(self.unexpected(&expected)),
        }
    }

    fn call(&mut self, name: &str) -> Result<Expr, ParseError> {
        if !FUNCTIONS.contains(&name) {
            return Err(self.error(format!("unknown function `{name}`"), &FUNCTIONS));
        }
        let start = self.pos;
        self.bump();
        self.sym("(")?;
        let e = match name {
            "poch" => Expr::Poch(self.poch_body()?),
            "qbin" => Expr::QBin(self.qbin_body()?),
            "theta" | "J" => {
                let mut args = vec![self.sexpr()?];
                while self.eat(",") {
                    args.push(self.sexpr()?);
                }
                let ok = if name == "theta" { args.len() == 2 } else { args.len() <= 2 };
                if !ok {
                    self.pos = start;
                    let want = if name == "theta" { "2 arguments" } else { "1 or 2 arguments" };
                    return Err(self.error(format!("`{name}` takes {want}, found {}", args.len()), &[]));
                }
                let m = args.pop().expect("nonempty");
                if name == "theta" {
                    Expr::Theta { a: args.pop().expect("two args"), m }
                } else {
                    Expr::J { a: args.pop(), m }
                }
            }
            "sum" => Expr::Sum(Box::new(self.sum_body()?)),
            "nahm" => self.nahm_body()?,
            _ => unreachable!("checked against FUNCTIONS"),
        };
        if !self.is_sym(")") {
            return Err(self.unexpected(&[")"]));
        }
        self.bump();
        Ok(e)
    }

    /// `q` or `q^e`, returning the exponent.
    fn base(&mut self) -> Result<SExpr, ParseError> {
        if !self.is_ident("q") {
            return Err(self.unexpected(&["q"]));
        }
        self.bump();
        if self.eat("^") {
            return self.spower();
        }
        Ok(SExpr::Num(1))
    }

    fn poch_body(&mut self) -> Result<Poch, ParseError> {
        let neg = self.eat("-");
        let (coef, expo) = if self.is_ident("q") {
            (None, Some(self.base()?))
        } else {
            let mut c = self.satom()?;
            if self.eat("^") {
                c = SExpr::Pow(Box::new(c), Box::new(self.spower()?));
            }
            if self.eat("*") {
                (Some(c), Some(self.base()?))
            } else {
                (Some(c), None)
            }
        };
        self.sym(";")?;
        let step = self.base()?;
        self.sym(";")?;
        let len = if self.is_ident("inf") {
            self.bump();
            None
        } else {
            Some(self.sexpr()?)
        };
        Ok(Poch { arg: PochArg { neg, coef, expo }, step, len })
    }

    fn qbin_body(&mut self) -> Result<QBin, ParseError> {
        let top = self.sexpr()?;
        self.sym(",")?;
        let bottom = self.sexpr()?;
        let base = if self.eat(";") { self.base()? } else { SExpr::Num(1) };
        Ok(QBin { top, bottom, base })
    }

    fn sum_body(&mut self) -> Result<SumLit, ParseError> {
        let mut groups = Vec::new();
        loop {
            let mut names = vec![self.name()?];
            while self.eat(",") {
                names.push(self.name()?);
            }
            let all_integers = if self.eat(">=") {
                match self.peek() {
                    Tok::Num(0) => {
                        self.bump();
                        false
                    }
                    _ => return Err(self.unexpected(&["0"])),
                }
            } else if self.is_ident("in") {
                self.bump();
                self.keyword("Z")?;
                true
            } else {
                return Err(self.unexpected(&[",", ">=", "in"]));
            };
            groups.push(IndexGroup { names, all_integers });
            if self.eat(";") {
                break;
            }
            if !self.eat(",") {
                return Err(self.unexpected(&[",", ";"]));
            }
        }
        let mut lit = SumLit { groups, expo: SExpr::Num(0), sign: None, num: vec![], den: vec![], constraints: vec![] };
        let mut seen_expo = false;
        loop {
            let key = match self.peek().clone() {
                Tok::Ident(k) if SUM_CLAUSES.contains(&k.as_str()) => k,
                _ => return Err(self.unexpected(&SUM_CLAUSES)),
            };
            self.bump();
            self.sym("=")?;
            match key.as_str() {
                "expo" => {
                    lit.expo = self.sexpr()?;
                    seen_expo = true;
                }
                "sign" => lit.sign = Some(self.sexpr()?),
                "num" => lit.num = self.factors()?,
                "den" => lit.den = self.factors()?,
                _ => {
                    let l = self.sexpr()?;
                    self.sym("=")?;
                    lit.constraints.push((l, self.sexpr()?));
                }
            }
            if !self.eat(";") {
                break;
            }
        }
        if !seen_expo {
            return Err(self.error("sum is missing its `expo` clause", &["expo"]));
        }
        Ok(lit)
    }

    fn factors(&mut self) -> Result<Vec<FactorPow>, ParseError> {
        let mut out = vec![self.factor()?];
        while self.eat("*") {
            out.push(self.factor()?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<FactorPow, ParseError> {
        let factor = if self.is_ident("poch") {
            self.bump();
            self.sym("(")?;
            SumFactorLit::Poch(self.poch_body()?)
        } else if self.is_ident("qbin") {
            self.bump();
            self.sym("(")?;
            SumFactorLit::QBin(self.qbin_body()?)
        } else {
            return Err(self.unexpected(&["poch", "qbin"]));
        };
        self.sym(")")?;
        let power = if self.eat("^") {
            match *self.peek() {
                Tok::Num(n) if (1..=u32::MAX as i64).contains(&n) => {
                    self.bump();
                    n as u32
                }
                _ => return Err(self.unexpected(&["positive integer"])),
            }
        } else {
            1
        };
        Ok(FactorPow { factor, power })
    }

    fn sexpr_list(&mut self) -> Result<Vec<SExpr>, ParseError> {
        self.sym("[")?;
        let mut v = vec![self.sexpr()?];
        while self.eat(",") {
            v.push(self.sexpr()?);
        }
        self.sym("]")?;
        Ok(v)
    }

    fn nahm_body(&mut self) -> Result<Expr, ParseError> {
        self.sym("[")?;
        let mut a = vec![self.sexpr_list()?];
        while self.eat(",") {
            a.push(self.sexpr_list()?);
        }
        self.sym("]")?;
        self.sym(",")?;
        let b = self.sexpr_list()?;
        self.sym(",")?;
        let c = self.sexpr()?;
        Ok(Expr::Nahm { a, b, c })
    }
}
