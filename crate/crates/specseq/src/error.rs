//! Crate-wide error type. Mathematical *failures* (a Maurer-Cartan residual,
//! a non-commuting square) are reported through result structs; `Error` is
//! reserved for malformed inputs and contract violations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coalgebra: {0}")]
    InvalidCoalgebra(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("degree cap overflow: degree {degree} exceeds cap {cap}")]
    CapOverflow { degree: usize, cap: usize },

    #[error("elements belong to different parent algebras")]
    ParentMismatch,

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: i64, got: i64 },

    #[error("mixed algebra representation kinds: {0} vs {1}")]
    MixedAlgebraKinds(String, String),

    #[error(
        "homology window {requested} not representable: algebra cap {cap} \
         leaves no room for the rank of the next boundary"
    )]
    HomologyWindow { requested: usize, cap: usize },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("structural check failed: {0}")]
    Structural(String),

    #[error(
        "action ordering violated: entry ({x} -> {y}) requires action({x}) > action({y}), \
         got {ax} <= {ay}"
    )]
    ActionOrder { x: String, y: String, ax: f64, ay: f64 },

    #[error("Maurer-Cartan identity fails: {0}")]
    MaurerCartan(String),

    #[error("cap {cap} too small: no generator fits (minimal index {min_mu})")]
    CapTooSmall { cap: i64, min_mu: i64 },

    #[error("page stage r must be >= 1, got {0}")]
    PageStage(i64),

    #[error("element is not a cycle: its boundary is nonzero")]
    NotACycle,

    #[error("complex carries no module structure over a ring")]
    NoModuleStructure,

    #[error("morphism check failed: {0}")]
    Morphism(String),

    #[error("path model differential does not square to zero (broken coalgebra input)")]
    PathModelBroken,

    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("JSON parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
