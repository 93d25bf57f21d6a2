//! Exact truncated q-series arithmetic, Nahm sums and identity checking.
//!
//! The building blocks are [`QSeries`] (truncated Laurent/Puiseux series
//! with exact rational coefficients), the product constructors in
//! [`products`], the lattice-sum evaluator in [`summation`], the Bailey
//! pair tools in [`bailey`], the catalog language in [`dsl`] and the
//! product factorizer in [`prodmake`].

pub mod error;
pub mod rat;
pub mod products;
pub mod series;
pub mod summation;
pub mod bailey;

pub mod dsl;
pub mod exec;
pub mod prodmake;

pub use error::{Error, Result};
pub use rat::Rat;
pub use series::QSeries;
