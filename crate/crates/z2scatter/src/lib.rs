//! Classical statevector toolkit for meson wave-packet scattering in a
//! (1+1)D Z2 lattice gauge theory with dynamical staggered fermions.
//!
//! The crate covers the full protocol at desk scale: the minimal
//! gauge-link qubit Hamiltonian and its exact-diagonalization oracle, the
//! order-by-order meson creation ansatz, protocol circuits (vacuum
//! preparation, wave-packet creation, Trotterized evolution, Hadamard
//! tests), a dense statevector engine with stochastic Pauli noise, shot
//! analysis with symmetry filters and bootstrap errors, and derivative-free
//! variational optimization of all circuit parameters.
//!
//! Numerics are generic over the floating scalar ([`scalar::Scalar`]);
//! the aliases below fix `f64` as the production type.

pub mod analysis;
pub mod circuits;
pub mod coeffs;
pub mod eigen;
pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod kinematics;
pub mod lattice;
pub mod linalg;
pub mod meson;
pub mod noise;
pub mod pauli;
pub mod profile;
pub mod scalar;
pub mod sector;
pub mod shots;
pub mod statevector;
pub mod translation;
pub mod vqe;
pub mod wp_engine;

pub use error::{Error, Result};
pub use scalar::{Cplx, Scalar};

pub type StatevectorF64 = statevector::Statevector<f64>;
pub type CircuitF64 = gates::Circuit<f64>;

/// Production scalar type.
pub type Real = f64;
/// Complex amplitude over the production scalar.
pub type C64 = Cplx<f64>;

pub type LatticeParamsF64 = lattice::LatticeParams<f64>;
pub type PauliSumF64 = pauli::PauliSum<f64>;
pub type EigenSolutionF64 = eigen::EigenSolution<f64>;
