//! Gate set and circuit representation.
//!
//! Rotations follow the half-angle convention `R_P(theta) = exp(-i theta P / 2)`
//! for a Pauli word `P`. Multi-qubit rotations are native engine gates;
//! the CNOT-decomposed accounting lives in [`crate::circuits::count_gates`].
//! Controlled gates carry a `control_state` so anti-controls (trigger on
//! `|0>`) are first-class.

use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString};
use crate::scalar::Scalar;

/// Gate kinds understood by the statevector engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Cnot,
    Rx,
    Ry,
    Rz,
    Rxx,
    Ryy,
    Rzz,
    /// Three-qubit `X (x) X (x) X` rotation; the middle qubit is the boson
    /// link in the boundary hopping term.
    Rxxx,
    /// Three-qubit `Y (x) X (x) Y` rotation.
    Ryxy,
    /// Controlled `R_z` on the target, first qubit is the control.
    Crz,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Rxx => "RXX",
            GateKind::Ryy => "RYY",
            GateKind::Rzz => "RZZ",
            GateKind::Rxxx => "RXXX",
            GateKind::Ryxy => "RYXY",
            GateKind::Crz => "CRZ",
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Cnot | GateKind::Rxx | GateKind::Ryy | GateKind::Rzz | GateKind::Crz => 2,
            GateKind::Rxxx | GateKind::Ryxy => 3,
        }
    }

    pub fn is_rotation(&self) -> bool {
        !matches!(self, GateKind::H | GateKind::X | GateKind::Cnot)
    }

    /// Pauli letters of a rotation kind, aligned with the qubit list.
    pub fn rotation_letters(&self) -> Option<&'static [PauliOp]> {
        match self {
            GateKind::Rx => Some(&[PauliOp::X]),
            GateKind::Ry => Some(&[PauliOp::Y]),
            GateKind::Rz | GateKind::Crz => Some(&[PauliOp::Z]),
            GateKind::Rxx => Some(&[PauliOp::X, PauliOp::X]),
            GateKind::Ryy => Some(&[PauliOp::Y, PauliOp::Y]),
            GateKind::Rzz => Some(&[PauliOp::Z, PauliOp::Z]),
            GateKind::Rxxx => Some(&[PauliOp::X, PauliOp::X, PauliOp::X]),
            GateKind::Ryxy => Some(&[PauliOp::Y, PauliOp::X, PauliOp::Y]),
            _ => None,
        }
    }
}

/// One gate instance: kind, qubit operands, rotation angle, and the
/// control state for controlled kinds (`Cnot`, `Crz`).
#[derive(Clone, Debug)]
pub struct Gate<S> {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: S,
    pub control_state: bool,
}

impl<S: Scalar> Gate<S> {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: S) -> Self {
        debug_assert_eq!(kind.n_qubits(), qubits.len());
        debug_assert!(distinct(&qubits), "gate qubits must be distinct");
        Gate {
            kind,
            qubits,
            angle,
            control_state: true,
        }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q], S::zero())
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q], S::zero())
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cnot, vec![control, target], S::zero())
    }

    /// CNOT triggered when the control is `|0>`.
    pub fn cnot_anti(control: usize, target: usize) -> Self {
        let mut g = Gate::cnot(control, target);
        g.control_state = false;
        g
    }

    pub fn cnot_on(control: usize, target: usize, control_state: bool) -> Self {
        let mut g = Gate::cnot(control, target);
        g.control_state = control_state;
        g
    }

    pub fn rx(q: usize, angle: S) -> Self {
        Gate::new(GateKind::Rx, vec![q], angle)
    }

    pub fn ry(q: usize, angle: S) -> Self {
        Gate::new(GateKind::Ry, vec![q], angle)
    }

    pub fn rz(q: usize, angle: S) -> Self {
        Gate::new(GateKind::Rz, vec![q], angle)
    }

    pub fn rxx(a: usize, b: usize, angle: S) -> Self {
        Gate::new(GateKind::Rxx, vec![a, b], angle)
    }

    pub fn ryy(a: usize, b: usize, angle: S) -> Self {
        Gate::new(GateKind::Ryy, vec![a, b], angle)
    }

    pub fn rzz(a: usize, b: usize, angle: S) -> Self {
        Gate::new(GateKind::Rzz, vec![a, b], angle)
    }

    pub fn rxxx(a: usize, mid: usize, b: usize, angle: S) -> Self {
        Gate::new(GateKind::Rxxx, vec![a, mid, b], angle)
    }

    pub fn ryxy(a: usize, mid: usize, b: usize, angle: S) -> Self {
        Gate::new(GateKind::Ryxy, vec![a, mid, b], angle)
    }

    pub fn crz(control: usize, target: usize, angle: S) -> Self {
        Gate::new(GateKind::Crz, vec![control, target], angle)
    }

    pub fn crz_on(control: usize, target: usize, angle: S, control_state: bool) -> Self {
        let mut g = Gate::crz(control, target, angle);
        g.control_state = control_state;
        g
    }

    /// The rotation word of this gate over the full register, with the
    /// control qubit (if any) excluded.
    pub fn rotation_string(&self) -> Option<PauliString> {
        let letters = self.kind.rotation_letters()?;
        let mut word = PauliString::IDENTITY;
        let operands: &[usize] = if self.kind == GateKind::Crz {
            &self.qubits[1..]
        } else {
            &self.qubits
        };
        for (q, op) in operands.iter().zip(letters) {
            let s = PauliString::single(*q, *op);
            word.x |= s.x;
            word.z |= s.z;
        }
        Some(word)
    }

    /// Control qubit and required state, for `Cnot` and `Crz`.
    pub fn control(&self) -> Option<(usize, bool)> {
        match self.kind {
            GateKind::Cnot | GateKind::Crz => Some((self.qubits[0], self.control_state)),
            _ => None,
        }
    }

    /// Serialize in the line format `KIND q0[,q1[,q2]] [angle] [control_state]`.
    pub fn dump_line(&self) -> String {
        let qubits = self
            .qubits
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut line = format!("{} {}", self.kind.name(), qubits);
        if self.kind.is_rotation() {
            line.push_str(&format!(" {:.16e}", self.angle));
        }
        if matches!(self.kind, GateKind::Cnot | GateKind::Crz) {
            line.push_str(&format!(" {}", u8::from(self.control_state)));
        }
        line
    }
}

fn distinct(qubits: &[usize]) -> bool {
    for (i, a) in qubits.iter().enumerate() {
        if qubits[i + 1..].contains(a) {
            return false;
        }
    }
    true
}

/// A named span of gates, recording which builder emitted it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

/// Ordered gate list over a fixed register, with named segments.
#[derive(Clone, Debug)]
pub struct Circuit<S> {
    pub n_qubits: usize,
    pub gates: Vec<Gate<S>>,
    pub segments: Vec<Segment>,
}

impl<S: Scalar> Circuit<S> {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate<S>) {
        debug_assert!(
            gate.qubits.iter().all(|&q| q < self.n_qubits),
            "gate qubit out of range"
        );
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Run `f` while recording the emitted span under `name`.
    pub fn with_segment<R>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let start = self.gates.len();
        let out = f(self);
        let end = self.gates.len();
        self.segments.push(Segment {
            name: name.to_string(),
            start,
            end,
        });
        out
    }

    /// Append another circuit (same register width), shifting its segments.
    pub fn append(&mut self, other: &Circuit<S>) {
        assert_eq!(self.n_qubits, other.n_qubits);
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        for seg in &other.segments {
            self.segments.push(Segment {
                name: seg.name.clone(),
                start: seg.start + offset,
                end: seg.end + offset,
            });
        }
    }

    /// Gate index ranges of every segment called `name`.
    pub fn segment_ranges(&self, name: &str) -> Vec<std::ops::Range<usize>> {
        self.segments
            .iter()
            .filter(|s| s.name == name)
            .map(|s| s.start..s.end)
            .collect()
    }

    pub fn has_segment(&self, name: &str) -> bool {
        self.segments.iter().any(|s| s.name == name)
    }

    /// Line-oriented text dump, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.dump_line());
            out.push('\n');
        }
        out
    }
}

/// Parse error helper for the dump format (used by the CLI round-trip).
pub fn parse_dump<S: Scalar>(text: &str, n_qubits: usize) -> Result<Circuit<S>> {
    let mut circuit = Circuit::new(n_qubits);
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let kind_name = fields.next().unwrap();
        let kind = match kind_name {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "CNOT" => GateKind::Cnot,
            "RX" => GateKind::Rx,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            "RXX" => GateKind::Rxx,
            "RYY" => GateKind::Ryy,
            "RZZ" => GateKind::Rzz,
            "RXXX" => GateKind::Rxxx,
            "RYXY" => GateKind::Ryxy,
            "CRZ" => GateKind::Crz,
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown gate kind {other:?}",
                    line_no + 1
                )))
            }
        };
        let qubits: Vec<usize> = fields
            .next()
            .ok_or_else(|| Error::Config(format!("line {}: missing qubits", line_no + 1)))?
            .split(',')
            .map(|q| {
                q.parse::<usize>()
                    .map_err(|e| Error::Config(format!("line {}: {e}", line_no + 1)))
            })
            .collect::<Result<_>>()?;
        let mut gate = Gate {
            kind,
            qubits,
            angle: S::zero(),
            control_state: true,
        };
        if kind.is_rotation() {
            let angle: f64 = fields
                .next()
                .ok_or_else(|| Error::Config(format!("line {}: missing angle", line_no + 1)))?
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", line_no + 1)))?;
            gate.angle = S::of(angle);
        }
        if matches!(kind, GateKind::Cnot | GateKind::Crz) {
            if let Some(cs) = fields.next() {
                gate.control_state = cs != "0";
            }
        }
        if gate.kind.n_qubits() != gate.qubits.len() {
            return Err(Error::Config(format!(
                "line {}: {} expects {} qubits",
                line_no + 1,
                kind_name,
                kind.n_qubits()
            )));
        }
        circuit.push(gate);
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let mut c: Circuit<f64> = Circuit::new(4);
        c.push(Gate::h(0));
        c.push(Gate::cnot(0, 1));
        c.push(Gate::cnot_anti(1, 2));
        c.push(Gate::rxx(0, 3, 0.125));
        c.push(Gate::crz(2, 3, -1.5));
        let text = c.dump();
        let parsed = parse_dump::<f64>(&text, 4).unwrap();
        assert_eq!(parsed.len(), c.len());
        for (a, b) in parsed.gates.iter().zip(&c.gates) {
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.qubits, b.qubits);
            assert_eq!(a.control_state, b.control_state);
            assert!((a.angle - b.angle).abs() < 1e-15);
        }
    }

    #[test]
    fn segments_record_spans() {
        let mut c: Circuit<f64> = Circuit::new(2);
        c.with_segment("prep", |c| {
            c.push(Gate::h(0));
            c.push(Gate::cnot(0, 1));
        });
        c.with_segment("evolve", |c| c.push(Gate::rz(1, 0.1)));
        assert_eq!(c.segment_ranges("prep"), vec![0..2]);
        assert_eq!(c.segment_ranges("evolve"), vec![2..3]);
        assert!(!c.has_segment("missing"));
    }
}
