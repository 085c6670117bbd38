//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by lattice construction, operator algebra and the numerical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice dimensions {l1}x{l2}: {reason}")]
    InvalidDimensions { l1: usize, l2: usize, reason: &'static str },
    #[error("plaquettes of a honeycomb lattice with a side of length 1 revisit edges")]
    DegeneratePlaquette,
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange { what: &'static str, index: usize, bound: usize },
    #[error("vortex pair needs two distinct plaquettes, got {0} twice")]
    SamePlaquette(usize),
    #[error("no dual path between plaquettes {0} and {1}")]
    NoDualPath(usize, usize),
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{n} qubits exceeds the limit of {max}")]
    QubitLimit { n: usize, max: usize },
    #[error("fixed-gauge Hamiltonian requires zero magnetic field")]
    FieldInFixedGauge,
    #[error("spin operator is not diagonal in the gauge sector")]
    NotGaugeDiagonal,
    #[error("projector expansion is capped at {max} spins, lattice has {n}")]
    ProjectorCap { n: usize, max: usize },
    #[error("rotation generator must be a Hermitian Pauli string with unit coefficient")]
    NonUnitGenerator,
    #[error("operator is not Hermitian (imaginary part {imag:e})")]
    NonHermitian { imag: f64 },
    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParameterCount { expected: usize, got: usize },
    #[error("state is nearly unphysical: <P> = {norm:e}")]
    DegenerateCost { norm: f64 },
    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },
    #[error("invalid ansatz request: {0}")]
    InvalidAnsatz(String),
    #[error("non-finite cost at the initial point")]
    NonFiniteCost,
}

pub type Result<T> = std::result::Result<T, Error>;
