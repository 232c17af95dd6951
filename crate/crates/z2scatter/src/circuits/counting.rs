//! CNOT-decomposed gate accounting.
//!
//! Multi-qubit rotations run natively in the engine; for resource counts
//! they are priced in a fixed decomposition: two-qubit Pauli rotations as
//! 2 CNOTs plus single-qubit gates, three-qubit rotations as 4 CNOTs,
//! controlled-`R_z` as 2 CNOTs, and an anti-control as the bare gate
//! conjugated by `X`.

use crate::gates::{Circuit, GateKind};
use crate::scalar::Scalar;

/// Decomposed totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub single_qubit: usize,
    pub cnot: usize,
}

impl GateCounts {
    pub fn add(&mut self, other: GateCounts) {
        self.single_qubit += other.single_qubit;
        self.cnot += other.cnot;
    }
}

/// Count `circuit` in the CNOT-decomposed view.
pub fn count_gates<S: Scalar>(circuit: &Circuit<S>) -> GateCounts {
    let mut counts = GateCounts::default();
    for gate in &circuit.gates {
        let (single, cnot) = match gate.kind {
            GateKind::H | GateKind::X | GateKind::Rx | GateKind::Ry | GateKind::Rz => (1, 0),
            GateKind::Cnot => {
                if gate.control_state {
                    (0, 1)
                } else {
                    (2, 1)
                }
            }
            GateKind::Rzz => (1, 2),
            GateKind::Rxx | GateKind::Ryy => (5, 2),
            GateKind::Rxxx | GateKind::Ryxy => (7, 4),
            GateKind::Crz => {
                if gate.control_state {
                    (2, 2)
                } else {
                    (4, 2)
                }
            }
        };
        counts.single_qubit += single;
        counts.cnot += cnot;
    }
    counts
}
