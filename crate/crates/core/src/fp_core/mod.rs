//! Exact linear algebra over the prime field F_p and over F_p(u).
//!
//! Everything is dense: the complexes handled by this crate are small enough
//! that asymptotically fast or sparse methods buy nothing.

pub mod field;
pub mod matrix;
pub mod poly;
pub mod ratmat;

pub use field::{is_prime, FpScalar, PrimeField};
pub use matrix::{nilpotent_partition, FpMatrix, Rref, Subspace};
pub use poly::{Poly, RatFun};
pub use ratmat::{ratfun_rank, RatMatrix};

/// Rank, kernel basis and image basis of `m`.
pub fn rref(m: &FpMatrix) -> Rref {
    m.rref()
}
