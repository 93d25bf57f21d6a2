//! Syntax trees for scalar expressions and q-series expressions.

/// Rational-valued expression over parameters and summation indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Num(i64),
    Var(String),
    Neg(Box<SExpr>),
    Add(Box<SExpr>, Box<SExpr>),
    Sub(Box<SExpr>, Box<SExpr>),
    Mul(Box<SExpr>, Box<SExpr>),
    Div(Box<SExpr>, Box<SExpr>),
    /// Integer power; the exponent must evaluate to an integer constant.
    Pow(Box<SExpr>, Box<SExpr>),
}

impl SExpr {
    pub fn num(n: i64) -> SExpr {
        SExpr::Num(n)
    }

    pub fn var(name: &str) -> SExpr {
        SExpr::Var(name.to_string())
    }

    pub(crate) fn is_one(&self) -> bool {
        matches!(self, SExpr::Num(1))
    }

    /// Every variable name, in order of first appearance.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            SExpr::Num(_) => {}
            SExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            SExpr::Neg(a) => a.variables(out),
            SExpr::Add(a, b) | SExpr::Sub(a, b) | SExpr::Mul(a, b) | SExpr::Div(a, b) | SExpr::Pow(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

/// Argument `[-][c*]q^a` (or a bare scalar `c`) of a Pochhammer symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PochArg {
    pub neg: bool,
    pub coef: Option<SExpr>,
    /// Exponent of `q`; `None` when the argument has no `q` part.
    pub expo: Option<SExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poch {
    pub arg: PochArg,
    /// Exponent of the base `q^step`.
    pub step: SExpr,
    /// `None` for an infinite product.
    pub len: Option<SExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBin {
    pub top: SExpr,
    pub bottom: SExpr,
    pub base: SExpr,
}

/// Factor allowed inside the `num`/`den` clauses of a sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumFactorLit {
    Poch(Poch),
    QBin(QBin),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPow {
    pub factor: SumFactorLit,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGroup {
    pub names: Vec<String>,
    /// `true` for `in Z`, `false` for `>= 0`.
    pub all_integers: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumLit {
    pub groups: Vec<IndexGroup>,
    pub expo: SExpr,
    pub sign: Option<SExpr>,
    pub num: Vec<FactorPow>,
    pub den: Vec<FactorPow>,
    /// Linear equations `lhs = rhs` between indices.
    pub constraints: Vec<(SExpr, SExpr)>,
}

impl SumLit {
    pub fn index_names(&self) -> Vec<String> {
        self.groups.iter().flat_map(|g| g.names.iter().cloned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Scalar(SExpr),
    /// `q^e`
    Q(SExpr),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, SExpr),
    Poch(Poch),
    QBin(QBin),
    /// Theta series `sum_n (-1)^n q^{m n(n-1)/2 + a n}`.
    Theta { a: SExpr, m: SExpr },
    /// `J_m`, or `J_{a,m}` when `a` is present.
    J { a: Option<SExpr>, m: SExpr },
    Sum(Box<SumLit>),
    Nahm { a: Vec<Vec<SExpr>>, b: Vec<SExpr>, c: SExpr },
}
