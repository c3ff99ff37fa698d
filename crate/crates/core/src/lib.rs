//! Exact Z/pZ-equivariant homological algebra over prime fields.

pub mod equivariant_complex;
pub mod error;
pub mod fp_core;
pub mod fuzz;
pub mod generate;
pub mod module_decomp;
pub mod morse_bzp;
pub mod persistence;
pub mod rational;
pub mod spectral;
pub mod tate;

pub use error::{Error, Result};
