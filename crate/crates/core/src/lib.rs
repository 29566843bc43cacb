//! Deciding covariance commutation relations `AB = BF(A)` and `BA = F(A)B`
//! for concrete operator pairs, with a numeric oracle to cross-check.

pub mod criteria;
pub mod error;
pub mod funcalg;
pub mod operators;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
