//! Principalization and embedded resolution of singularities by order
//! reduction, over exact rational polynomials, plus 2D toric resolution.

mod error;

pub mod center;
pub mod chart;
pub mod contact;
pub mod driver;
pub mod ideal;
pub mod order;
pub mod poly;
pub mod toric;
pub mod trace;

pub use error::{Error, Result};
