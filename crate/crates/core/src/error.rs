use thiserror::Error;

use crate::exact::ConflationDefect;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("invalid invariant factors {factors:?} over Z/{modulus}: {reason}")]
    InvalidFactors {
        modulus: u64,
        factors: Vec<u64>,
        reason: &'static str,
    },

    #[error("ring mismatch: Z/{0} vs Z/{1}")]
    RingMismatch(u64, u64),

    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("entry [{row}][{col}] = {value} does not define a homomorphism Z/{source_order} -> Z/{target_order}")]
    IllDefined {
        row: usize,
        col: usize,
        value: u64,
        source_order: u64,
        target_order: u64,
    },

    #[error("morphisms are not composable: {0}")]
    NotComposable(String),

    #[error("relation vector of length {got} for a presentation on {expected} generators")]
    InvalidPresentation { expected: usize, got: usize },

    #[error("not a conflation: {0}")]
    NotAConflation(ConflationDefect),

    #[error("morphism is not a deflation (not an epimorphism)")]
    NotADeflation,

    #[error("morphism is not an inflation (not a monomorphism)")]
    NotAnInflation,

    #[error("object {0} is not flat")]
    NotFlat(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("differentials compose to a nonzero map at degree {degree}")]
    DifferentialSquare { degree: i64 },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("degreewise maps do not commute with differentials at degree {degree}")]
    NotAChainMap { degree: i64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
