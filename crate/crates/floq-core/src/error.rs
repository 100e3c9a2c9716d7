//! Error types shared across the crate.

use alloc::string::String;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates a mathematical precondition (bad geometry,
    /// out-of-range parameter, invalid index).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that only makes sense in one dynamical phase was called
    /// in another (e.g. heating peaks of a non-heating drive).
    #[error("phase error: {0}")]
    Phase(String),

    /// The requested system size exceeds what the engine supports.
    #[error("capacity error: {sites} sites requested, cap is {cap}")]
    Capacity {
        /// Requested number of sites.
        sites: u32,
        /// Supported maximum.
        cap: u32,
    },

    /// Two objects that must share a system size do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Hamiltonian cannot be split into the commuting layers the Trotter
    /// step requires.
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    /// An iterative solver failed to reach the requested tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A shot batch was recorded in the wrong measurement basis.
    #[error("basis error: {0}")]
    Basis(String),

    /// A fit could not be performed (degenerate data, non-positive inputs).
    #[error("fit error: {0}")]
    Fit(String),

    /// Parameters do not line up with the circuit layout they drive.
    #[error("misaligned parameters: {0}")]
    Misaligned(String),
}
