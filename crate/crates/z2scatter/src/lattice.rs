//! Lattice geometry, momenta, and reference states.
//!
//! A periodic staggered lattice of `N = 2 N_P` sites hosts one fermion
//! qubit per site (qubits `0..N`) plus a single gauge-boson qubit at index
//! `N` in the minimal gauge-link formulation. Qubit 0 is the least
//! significant bit of every basis-state index.

use crate::error::{Error, Result};
use crate::pauli::{number_operator, PauliSum};
use crate::scalar::Scalar;

/// Physical parameters of the (1+1)D Z2 gauge-theory lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeParams<S: Scalar> {
    /// Physical sites `N_P`; the staggered lattice has `2 N_P` sites.
    pub n_phys: usize,
    /// Fermion mass `m_f >= 0` in lattice units.
    pub mass: S,
    /// Electric-field coupling `eps`.
    pub eps: S,
}

impl<S: Scalar> LatticeParams<S> {
    pub fn new(n_phys: usize, mass: S, eps: S) -> Result<Self> {
        if n_phys == 0 {
            return Err(Error::InvalidLattice("n_phys must be >= 1".into()));
        }
        if mass < S::zero() {
            return Err(Error::InvalidLattice(format!(
                "mass must be >= 0, got {mass}"
            )));
        }
        Ok(LatticeParams { n_phys, mass, eps })
    }

    /// Staggered sites `N = 2 N_P`.
    pub fn n_stag(&self) -> usize {
        2 * self.n_phys
    }

    /// System register width: `N` fermion qubits plus one boson qubit.
    pub fn n_system_qubits(&self) -> usize {
        self.n_stag() + 1
    }

    /// Index of the gauge-boson qubit.
    pub fn boson_qubit(&self) -> usize {
        self.n_stag()
    }

    /// Boundary hopping sign `alpha_N = (-1)^{N_P + 1}`.
    pub fn alpha_n(&self) -> S {
        if self.n_phys % 2 == 0 {
            -S::one()
        } else {
            S::one()
        }
    }
}

/// Electric-string sign `gamma_n`: `i^n` for even `n`, `i^{n+1}` for odd
/// `n`; always real.
pub fn gamma<S: Scalar>(n: usize) -> S {
    let exponent = if n % 2 == 0 { n } else { n + 1 };
    if exponent % 4 == 0 {
        S::one()
    } else {
        -S::one()
    }
}

/// Brillouin zone of the physical lattice: the `N_P` momenta
/// `pi j / N_P` with `-N_P <= 2j < N_P`, ascending.
pub fn brillouin_zone<S: Scalar>(params: &LatticeParams<S>) -> Vec<S> {
    brillouin_indices(params.n_phys)
        .map(|j| S::PI() * S::of(j as f64) / S::of(params.n_phys as f64))
        .collect()
}

/// Integer labels `j` of the Brillouin zone, so `k = pi j / N_P`.
pub fn brillouin_indices(n_phys: usize) -> impl Iterator<Item = i64> {
    let np = n_phys as i64;
    (-np..np).filter(move |j| (2 * j) >= -np && (2 * j) < np)
}

/// Strong-coupling vacuum as a basis-state index over the system register:
/// fermion occupation `0,1,0,1,...`, boson qubit aligned with the sign of
/// `eps` (spin up, bit 0, for `eps <= 0`).
pub fn scv_state<S: Scalar>(params: &LatticeParams<S>) -> u64 {
    let n = params.n_stag();
    let mut bits = 0u64;
    for site in (1..n).step_by(2) {
        bits |= 1 << site;
    }
    if params.eps > S::zero() {
        bits |= 1 << params.boson_qubit();
    }
    bits
}

/// Global fermion-number operator `Q = sum_n (1 - Z_n)/2` over the fermion
/// register of a wider register of `n_qubits` qubits.
pub fn charge_operator<S: Scalar>(params: &LatticeParams<S>, n_qubits: usize) -> PauliSum<S> {
    let mut q = PauliSum::zero(n_qubits);
    for site in 0..params.n_stag() {
        q.add_assign(&number_operator(n_qubits, site));
    }
    q.canonicalize();
    q
}

/// Fermion Hamming weight of a basis state restricted to the fermion
/// register.
pub fn fermion_weight<S: Scalar>(params: &LatticeParams<S>, bits: u64) -> u32 {
    (bits & ((1u64 << params.n_stag()) - 1)).count_ones()
}
