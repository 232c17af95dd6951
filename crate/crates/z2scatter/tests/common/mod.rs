//! Shared fixtures for the integration suites. Not every suite uses
//! every helper.
#![allow(dead_code)]

use num_complex::Complex;
use z2scatter::circuits::{
    build_qgs, build_qinit, AncillaMode, GroundStateAngles, PrepScheme, QInitBuild,
};
use z2scatter::coeffs::{wavepacket_coefficients, AnsatzParams, MesonCoefficients};
use z2scatter::gates::Circuit;
use z2scatter::kinematics::{kinematic_factors, KinematicTable};
use z2scatter::lattice::{scv_state, LatticeParams};
use z2scatter::profile::{gaussian_profile, WavePacketProfile};
use z2scatter::statevector::{run, Statevector};

pub type C64 = Complex<f64>;

pub fn params_np(n_phys: usize) -> LatticeParams<f64> {
    LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
}

/// Optimized vacuum angles for the ten-site lattice.
pub fn ground_np5() -> GroundStateAngles<f64> {
    GroundStateAngles::new(0.1705, 0.7846)
}

/// Optimized first-order suppression parameters for the ten-site lattice,
/// ascending zone order.
pub fn alphas_np5() -> AnsatzParams<f64> {
    let mut ap = AnsatzParams::empty(5);
    ap.push_order(0, -1.5139, -1.4590);
    ap.push_order(1, -1.0565, -1.0013);
    ap.push_order(2, -0.0957, 1.1112);
    ap.push_order(3, -3.2695, -3.0880);
    ap.push_order(4, -1.7754, 1.1020);
    ap
}

/// The two counter-propagating packet profiles of the ten-site experiment.
pub fn packets_np5(params: &LatticeParams<f64>) -> Vec<WavePacketProfile<f64>> {
    let pi = std::f64::consts::PI;
    vec![
        gaussian_profile(2.0, 7.0 * pi / 20.0, 2.0 * pi / 5.0, params).unwrap(),
        gaussian_profile(7.0, 7.0 * pi / 20.0, -2.0 * pi / 5.0, params).unwrap(),
    ]
}

pub fn packet_tables(
    profiles: &[WavePacketProfile<f64>],
    order: usize,
    ap: &AnsatzParams<f64>,
    table: &KinematicTable<f64>,
    params: &LatticeParams<f64>,
) -> Vec<MesonCoefficients<f64>> {
    profiles
        .iter()
        .map(|p| wavepacket_coefficients(p, order, ap, table, params).unwrap())
        .collect()
}

/// Assemble the full preparation circuit (vacuum + packets) and return it
/// with the accept pattern.
pub fn preparation_circuit(
    params: &LatticeParams<f64>,
    ground: &GroundStateAngles<f64>,
    profiles: &[WavePacketProfile<f64>],
    ap: &AnsatzParams<f64>,
    scheme: &PrepScheme<f64>,
    extra_qubits: usize,
) -> (Circuit<f64>, Vec<usize>, usize) {
    let table = kinematic_factors(params.mass, params).unwrap();
    let tables = packet_tables(profiles, scheme.order, ap, &table, params);
    let n_sys = params.n_system_qubits();
    let n_prep = match scheme.ancilla_mode {
        AncillaMode::Shared => 1,
        AncillaMode::PerPacket => profiles.len(),
    };
    let n_qubits = n_sys + n_prep + extra_qubits;
    let ancillas: Vec<usize> = (n_sys..n_sys + n_prep).collect();
    let mut circuit = build_qgs(ground, params, n_qubits);
    let QInitBuild {
        circuit: init,
        accept,
        ..
    } = build_qinit(profiles, &tables, scheme, &ancillas, params, n_qubits).unwrap();
    circuit.append(&init);
    (circuit, accept, n_qubits)
}

pub fn run_from_scv(circuit: &Circuit<f64>, params: &LatticeParams<f64>) -> Statevector<f64> {
    run(
        circuit,
        &Statevector::basis(circuit.n_qubits, scv_state(params)),
    )
    .unwrap()
}

/// Binomial 5-sigma absolute window around probability `p` at `shots`.
pub fn five_sigma(p: f64, shots: f64) -> f64 {
    5.0 * (p * (1.0 - p) / shots).sqrt()
}
