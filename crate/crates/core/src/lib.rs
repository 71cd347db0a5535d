//! Discrete Besov norms, lifting of circle-valued maps and winding obstructions on
//! dyadic grids.

pub mod besov;
pub mod cli;
pub mod corpus;
pub mod counterexamples;
pub mod error;
pub mod grid;
pub mod jacobian;
pub mod lifting;
pub mod par;
pub mod verify;

pub use error::{Error, Result};
