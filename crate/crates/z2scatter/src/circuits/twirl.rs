//! Pauli twirling of entangling gates.
//!
//! Each CNOT inside a chosen segment is replaced, uniformly at random, by
//! one of four Pauli-dressed equivalents. Every variant equals the
//! original gate up to a global phase, so the noiseless circuit is
//! unchanged while coherent errors on hardware average into stochastic
//! ones.

use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, GateKind};
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Single-qubit Pauli wrapper, encoded as rotation gates (`Y = R_y(pi)`
/// and `Z = R_z(pi)` up to global phase).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Wrapper {
    I,
    X,
    Y,
    Z,
}

impl Wrapper {
    fn push<S: Scalar>(self, circuit: &mut Circuit<S>, qubit: usize) {
        match self {
            Wrapper::I => {}
            Wrapper::X => circuit.push(Gate::x(qubit)),
            Wrapper::Y => circuit.push(Gate::ry(qubit, S::PI())),
            Wrapper::Z => circuit.push(Gate::rz(qubit, S::PI())),
        }
    }
}

/// The four CNOT-equivalent dressings, written as
/// `(post_control, post_target, pre_control, pre_target)` so that
/// `(A (x) B) CNOT (C (x) D) = CNOT` up to a global phase.
pub fn cnot_twirl_variants() -> [[(u8, u8); 2]; 4] {
    // Encoded as Pauli indices 0..4 = I, X, Y, Z; rows are
    // [(post_c, post_t), (pre_c, pre_t)].
    [
        [(0, 0), (0, 0)],
        [(3, 0), (3, 0)],
        [(1, 0), (1, 1)],
        [(1, 2), (2, 3)],
    ]
}

fn wrapper_from_index(i: u8) -> Wrapper {
    match i {
        1 => Wrapper::X,
        2 => Wrapper::Y,
        3 => Wrapper::Z,
        _ => Wrapper::I,
    }
}

/// Replace every CNOT inside the segments named `segment` by a randomly
/// chosen Pauli-dressed equivalent. Deterministic under a fixed seed.
pub fn pauli_twirl<S: Scalar>(
    circuit: &Circuit<S>,
    segment: &str,
    seed: u64,
) -> Result<Circuit<S>> {
    if !circuit.has_segment(segment) {
        return Err(Error::NoSuchSegment(segment.to_string()));
    }
    let mut in_segment = vec![false; circuit.gates.len()];
    for range in circuit.segment_ranges(segment) {
        for flag in &mut in_segment[range] {
            *flag = true;
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let variants = cnot_twirl_variants();
    let mut out = Circuit::new(circuit.n_qubits);
    for (idx, gate) in circuit.gates.iter().enumerate() {
        if in_segment[idx] && gate.kind == GateKind::Cnot {
            let variant = variants[rng.random_range(0..variants.len())];
            let control = gate.qubits[0];
            let target = gate.qubits[1];
            let [(post_c, post_t), (pre_c, pre_t)] = variant;
            wrapper_from_index(pre_c).push(&mut out, control);
            wrapper_from_index(pre_t).push(&mut out, target);
            out.push(gate.clone());
            wrapper_from_index(post_c).push(&mut out, control);
            wrapper_from_index(post_t).push(&mut out, target);
        } else {
            out.push(gate.clone());
        }
    }
    // Segment bookkeeping no longer lines up gate-for-gate; keep only the
    // segment names that were untouched, spanning unchanged ranges is not
    // generally possible, so the twirled circuit drops segment metadata.
    Ok(out)
}
