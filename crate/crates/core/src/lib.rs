//! Equivariant quantum channels: the U(n), diagonal-unitary and product families, their
//! Choi matrices, analytic membership tests for the Schwarz, CP, PPT and entanglement-breaking
//! regions, composition, and numerical falsifiers.

pub mod channels;
pub mod choi;
pub mod classify;
pub mod cli;
pub mod compose;
pub mod error;
pub mod linalg;
pub mod oracle;

pub use error::{Error, Result};

/// Fixed-width scientific rendering with 17 significant digits, enough to round-trip an f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
