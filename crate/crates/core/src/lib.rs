//! Para-Markov chains, the exchangeable fractional Poisson process and the
//! Mittag-Leffler special functions they are built on.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod chains;
pub mod error;
pub mod fmt;
pub mod matfun;
pub mod ml_special;
pub mod quad;
pub mod sampling;

pub use error::{Error, Result};
