use thiserror::Error;

/// Errors raised by the bound evaluators, the simulator and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("regions overlap")]
    RegionsOverlap,
    #[error("regions are not connected in the graph")]
    Disconnected,
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Hilbert space dimension {0} exceeds the simulator cap")]
    DimensionTooLarge(usize),
    #[error("operator norm {norm} exceeds the cap {cap}")]
    NormCapExceeded { norm: f64, cap: f64 },
    #[error("outside the hypothesis of the bound: {0}")]
    OutOfHypothesis(&'static str),
    #[error("threshold {threshold} is never reached")]
    NoCrossing { threshold: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),
    #[error("spectrum of size {0} is too large for the brute-force simplex search")]
    SimplexTooLarge(usize),
    #[error("Hamiltonian does not conserve total Z (commutator norm {0:e})")]
    SymmetryBroken(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
