//! Exact and certified-numeric verification of bilateral q-series summations
//! and the matrix inverses behind them.

pub mod classical;
pub mod curious;
pub mod error;
pub mod harness;
pub mod identity;
pub mod inversion;
pub mod qcore;

pub use error::{Error, Result};
