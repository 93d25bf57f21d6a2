//! The catalog language: expressions for q-series, identity records and
//! their verification.

mod ast;
mod catalog;
mod error;
mod eval;
mod lexer;
mod parser;
mod poly;
mod print;

pub use ast::*;
pub use error::ParseError;
pub use eval::{eval_expr, eval_expr_with, sum_spec, EvalOptions};
pub use parser::{parse_expr, parse_expr_at, parse_param_grid, parse_scalar, parse_scalar_at};
pub use poly::{eval_const, Bindings};
pub use catalog::{
    check_point, format_identity, format_point, format_report, parse_catalog, verify_all, verify_identity, Identity,
    Outcome, Point, Status, VerifyOptions, DEFAULT_ORDER, SHIPPED, shipped_catalog,
};
