//! Variational vacuum-preparation circuit.
//!
//! One layer evolves the strong-coupling vacuum by the hopping terms (one
//! `R_xx R_yy` block per bond, walked along the chain, the periodic bond
//! through the boson qubit last) and then by the mass terms. Each bond
//! block conserves the global fermion number. The electric angle is fixed
//! to zero: one layer with two angles already reaches the published vacuum
//! fidelities.

use super::segments;
use crate::gates::{Circuit, Gate};
use crate::lattice::LatticeParams;
use crate::scalar::Scalar;

/// Angles of the vacuum-preparation layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateAngles<S> {
    pub theta_h: S,
    pub theta_m: S,
    /// Number of layers; one suffices at the sizes studied here.
    pub n_layers: usize,
    /// Electric angle, fixed to zero in this protocol.
    pub theta_eps: S,
}

impl<S: Scalar> GroundStateAngles<S> {
    pub fn new(theta_h: S, theta_m: S) -> Self {
        GroundStateAngles {
            theta_h,
            theta_m,
            n_layers: 1,
            theta_eps: S::zero(),
        }
    }
}

/// Emit the hopping half-layer: one `R_xx R_yy` block per bond walked
/// along the chain, the periodic bond realized as three-qubit rotations
/// through the boson qubit carrying the sector sign `alpha_N`. With
/// `mirrored` the gate order is reversed, which makes a Trotter step
/// palindromic.
pub(crate) fn push_hopping_layer<S: Scalar>(
    circuit: &mut Circuit<S>,
    params: &LatticeParams<S>,
    theta: S,
    mirrored: bool,
) {
    let n = params.n_stag();
    let boson = params.boson_qubit();
    let boundary = params.alpha_n() * theta;
    let mut gates: Vec<Gate<S>> = Vec::with_capacity(2 * n);
    for site in 0..n - 1 {
        gates.push(Gate::rxx(site, site + 1, theta));
        gates.push(Gate::ryy(site, site + 1, theta));
    }
    gates.push(Gate::rxxx(n - 1, boson, 0, boundary));
    gates.push(Gate::ryxy(n - 1, boson, 0, boundary));
    if mirrored {
        gates.reverse();
    }
    for g in gates {
        circuit.push(g);
    }
}

/// Emit the mass layer: `R_z((-1)^{n+1} theta)` per fermion site.
pub(crate) fn push_mass_layer<S: Scalar>(
    circuit: &mut Circuit<S>,
    params: &LatticeParams<S>,
    theta: S,
) {
    for site in 0..params.n_stag() {
        let sign = if site % 2 == 0 { -S::one() } else { S::one() };
        circuit.push(Gate::rz(site, sign * theta));
    }
}

/// Build the vacuum-preparation circuit over a register of `n_qubits`.
pub fn build_qgs<S: Scalar>(
    angles: &GroundStateAngles<S>,
    params: &LatticeParams<S>,
    n_qubits: usize,
) -> Circuit<S> {
    assert!(n_qubits >= params.n_system_qubits());
    let mut circuit = Circuit::new(n_qubits);
    circuit.with_segment(segments::GROUND_STATE, |c| {
        for _ in 0..angles.n_layers.max(1) {
            push_hopping_layer(c, params, angles.theta_h, false);
            push_mass_layer(c, params, angles.theta_m);
        }
    });
    circuit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::count_gates;
    use crate::eigen::{diagonalize, fidelity};
    use crate::hamiltonian::build_hamiltonian;
    use crate::lattice::scv_state;
    use crate::sector::{project, SectorBasis};
    use crate::statevector::{expectation, run, Statevector};

    fn params() -> LatticeParams<f64> {
        LatticeParams::new(5, 1.0, -0.3).unwrap()
    }

    #[test]
    fn cnot_count_formula() {
        for n_phys in [2usize, 5] {
            let p = LatticeParams::new(n_phys, 1.0, -0.3).unwrap();
            let c = build_qgs(&GroundStateAngles::new(0.1, 0.2), &p, p.n_system_qubits());
            let counts = count_gates(&c);
            assert_eq!(counts.cnot, 8 * n_phys + 4, "at n_phys = {n_phys}");
        }
    }

    #[test]
    fn zero_angles_act_as_identity_on_scv() {
        let p = params();
        let c = build_qgs(&GroundStateAngles::new(0.0, 0.0), &p, p.n_system_qubits());
        let scv = Statevector::basis(p.n_system_qubits(), scv_state(&p));
        let out = run(&c, &scv).unwrap();
        let overlap = out.inner(&scv);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn published_angles_reach_published_vacuum() {
        // theta_h* = 0.1705, theta_m* = 0.7846 prepare the vacuum with
        // energy -8.8739 and fidelity 0.9998.
        let p = params();
        let angles = GroundStateAngles::new(0.1705, 0.7846);
        let c = build_qgs(&angles, &p, p.n_system_qubits());
        let scv = Statevector::basis(p.n_system_qubits(), scv_state(&p));
        let out = run(&c, &scv).unwrap();
        let h = build_hamiltonian(&p);
        let energy = expectation(&out, &h).unwrap();
        assert!(
            (energy - (-8.8739)).abs() < 1e-4,
            "vacuum energy {energy} vs -8.8739"
        );

        let basis = SectorBasis::new(&p);
        let sol = diagonalize(&h, &basis, 1).unwrap();
        let (sector_vec, captured) = project(&out.amps, &basis, p.n_system_qubits(), 0);
        assert!((captured - 1.0).abs() < 1e-10, "leaked out of sector");
        let f = fidelity(&sector_vec, &sol.states[0]).unwrap();
        assert!((f - 0.9998).abs() < 5e-4, "vacuum fidelity {f} vs 0.9998");
    }
}
