//! Variational simulation of the Kitaev honeycomb and square-octagon spin models
//! in their Majorana fixed-gauge and dynamical-gauge qubit representations.
//!
//! The numerical core is generic over the real scalar ([`Real`]); the `*64`
//! aliases at the crate root fix it to `f64`.

pub mod ansatz;
pub mod error;
pub mod freefermion;
pub mod hamiltonians;
pub mod lattice;
pub mod linalg;
pub mod majorana;
pub mod oracle;
pub mod pauli;
pub mod scalar;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};
pub use lattice::{build_lattice, EdgeType, GaugeConfig, Lattice, LatticeKind};
pub use scalar::{Real, C};

pub type PauliString64 = pauli::PauliString<f64>;
pub type PauliSum64 = pauli::PauliSum<f64>;
pub type State64 = statevector::State<f64>;
pub type Couplings64 = hamiltonians::Couplings<f64>;
pub type QuadraticProblem64 = freefermion::QuadraticProblem<f64>;
pub type CanonicalForm64 = freefermion::CanonicalForm<f64>;
pub type Circuit64 = ansatz::Circuit<f64>;
pub type VQEResult64 = vqe::VQEResult<f64>;
