//! Qubit Hamiltonian of the Z2 gauge theory in the minimal gauge-link
//! formulation.
//!
//! `H = H^h + H^m + H^eps` acts on `N + 1` qubits: `N` Jordan-Wigner
//! fermion qubits and one boson qubit carrying the remnant gauge link.
//! The hopping part is `(XX + YY)/4` on neighbouring fermion qubits, with
//! the periodic bond routed through the boson qubit and weighted by
//! `alpha_N`. The electric part is non-local: `Z`-strings from the fermion
//! register multiply the boson `Z`, with signs `gamma_n`.

use crate::lattice::{gamma, LatticeParams};
use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::scalar::Scalar;
use num_complex::Complex;

fn real<S: Scalar>(x: S) -> Complex<S> {
    Complex::new(x, S::zero())
}

/// Hopping part `H^h`: bulk `(X_n X_{n+1} + Y_n Y_{n+1})/4` plus the
/// boundary three-qubit terms `alpha_N (X_{N-1} X~ X_0 + Y_{N-1} X~ Y_0)/4`.
pub fn hopping_hamiltonian<S: Scalar>(params: &LatticeParams<S>) -> PauliSum<S> {
    let n = params.n_stag();
    let boson = params.boson_qubit();
    let quarter = real(S::of(0.25));
    let mut h = PauliSum::zero(params.n_system_qubits());
    for site in 0..n - 1 {
        for op in [PauliOp::X, PauliOp::Y] {
            let mut s = PauliString::single(site, op);
            let t = PauliString::single(site + 1, op);
            s.x |= t.x;
            s.z |= t.z;
            h.push(quarter, s);
        }
    }
    let boundary = real(params.alpha_n() * S::of(0.25));
    for op in [PauliOp::X, PauliOp::Y] {
        let mut s = PauliString::single(n - 1, op);
        let t = PauliString::single(0, op);
        let b = PauliString::single(boson, PauliOp::X);
        s.x |= t.x | b.x;
        s.z |= t.z | b.z;
        h.push(boundary, s);
    }
    h
}

/// Mass part `H^m = (m_f/2) sum_n (-1)^{n+1} Z_n`.
pub fn mass_hamiltonian<S: Scalar>(params: &LatticeParams<S>) -> PauliSum<S> {
    let mut h = PauliSum::zero(params.n_system_qubits());
    let half_mass = params.mass * S::of(0.5);
    for site in 0..params.n_stag() {
        let sign = if site % 2 == 0 { -S::one() } else { S::one() };
        h.push(
            real(sign * half_mass),
            PauliString::single(site, PauliOp::Z),
        );
    }
    h
}

/// Electric part `H^eps = eps Z~ + eps sum_{n<N-1} gamma_n Z~ prod_{j<=n} Z_j`.
pub fn electric_hamiltonian<S: Scalar>(params: &LatticeParams<S>) -> PauliSum<S> {
    let n = params.n_stag();
    let boson = params.boson_qubit();
    let mut h = PauliSum::zero(params.n_system_qubits());
    h.push(real(params.eps), PauliString::single(boson, PauliOp::Z));
    let mut z_string = PauliString::single(boson, PauliOp::Z);
    for site in 0..n - 1 {
        let zj = PauliString::single(site, PauliOp::Z);
        z_string.z |= zj.z;
        h.push(real(params.eps * gamma::<S>(site)), z_string);
    }
    h
}

/// Full Hamiltonian `H^h + H^m + H^eps`, canonicalized.
pub fn build_hamiltonian<S: Scalar>(params: &LatticeParams<S>) -> PauliSum<S> {
    build_hamiltonian_scaled(params, S::one())
}

/// Hamiltonian with the hopping part scaled by `hop_scale`; `hop_scale = 0`
/// leaves the diagonal strong-coupling problem, useful as a closed-form
/// limit in tests.
pub fn build_hamiltonian_scaled<S: Scalar>(params: &LatticeParams<S>, hop_scale: S) -> PauliSum<S> {
    let mut h = hopping_hamiltonian(params).scaled(real(hop_scale));
    h.add_assign(&mass_hamiltonian(params));
    h.add_assign(&electric_hamiltonian(params));
    h.canonicalize_with(S::zero());
    h
}
