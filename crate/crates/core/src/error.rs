use thiserror::Error;

use crate::equivariant_complex::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("modulus mismatch: F_{0} vs F_{1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not nilpotent of order at most p")]
    NotNilpotent,
    #[error("sigma^p is not the identity")]
    NotOrderP,
    #[error("invalid complex: {0}")]
    InvalidComplex(ValidationReport),
    #[error("inadmissible window: {0}")]
    InadmissibleWindow(String),
    #[error("map is not a chain map: {0}")]
    NotChainMap(String),
    #[error("map does not commute with sigma")]
    NotEquivariant,
    #[error("assembled differential does not square to zero")]
    NotSquareZero,
    #[error("differential violates the filtration: {0}")]
    FiltrationViolation(String),
    #[error("window endpoint {0} is a bar endpoint")]
    SpectralEndpoint(String),
    #[error("barcode has no infinite bars")]
    EmptyBarcode,
    #[error("invalid bar: {0}")]
    InvalidBar(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("malformed input at {field}: {message}")]
    Malformed { field: String, message: String },
}

impl Error {
    pub fn malformed(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            field: field.into(),
            message: message.into(),
        }
    }
}
