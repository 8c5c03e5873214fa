//! Exact invariants of meromorphic differential forms on hypersurface singularities.

pub mod closure;
pub mod error;
pub mod forms;
pub mod mero;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod suite;
pub mod beta;
pub mod variety;

pub use error::{Error, Result};
