//! Exact toric Mori theory on simplicial fans.

pub mod checks;
pub mod classify;
pub mod contraction;
pub mod error;
pub mod fan;
pub mod fuzz;
pub mod intersection;
pub mod io;
pub mod lattice;
pub mod mori;
pub mod report;

pub use error::{Error, Result};
