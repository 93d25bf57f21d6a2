use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent {exponent} is not a multiple of 1/{denom}")]
    ExponentDenominator { exponent: String, denom: i64 },

    #[error("exponent {exponent} lies above the truncation order {order}")]
    AboveTruncation { exponent: String, order: String },

    #[error("query at exponent {exponent} is beyond the known order {order}")]
    BeyondTruncation { exponent: String, order: String },

    #[error("series is zero up to its truncation order and cannot be inverted")]
    NotInvertible,

    #[error("operation needs integer exponents, found denominator {0}")]
    FractionalExponents(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infinite product contains the vanishing factor (1 - q^0)")]
    VanishingProduct,

    #[error("non-unit factor raised to a negative power")]
    NonUnit,

    #[error("negative Pochhammer length {0}")]
    NegativeLength(i64),

    #[error("sum does not converge formally: {0}")]
    Divergent(String),

    #[error("Bailey pair relative to {pair} cannot be used with transformation {which}: {reason}")]
    RelativityMismatch { pair: String, which: u8, reason: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("prodmake: {0}")]
    Prodmake(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
