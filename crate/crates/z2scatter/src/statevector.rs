//! Dense statevector engine.
//!
//! Amplitudes are indexed with qubit 0 as the least significant bit. Gate
//! application is in place; rotations go through one generic Pauli-word
//! kernel, so three-qubit rotations are exact engine primitives rather
//! than decompositions.

use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, GateKind};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{Cplx, Scalar};
use crate::shots::ShotCounts;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Complex amplitude vector over `2^{n_qubits}` basis states.
#[derive(Clone, Debug)]
pub struct Statevector<S: Scalar> {
    pub n_qubits: usize,
    pub amps: Vec<Cplx<S>>,
}

impl<S: Scalar> Statevector<S> {
    /// Computational basis state `|bits>`.
    pub fn basis(n_qubits: usize, bits: u64) -> Self {
        let mut amps = vec![Complex::new(S::zero(), S::zero()); 1 << n_qubits];
        amps[bits as usize] = Complex::new(S::one(), S::zero());
        Statevector { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Cplx<S>>) -> Self {
        assert_eq!(amps.len(), 1 << n_qubits);
        Statevector { n_qubits, amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> S {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
    }

    pub fn inner(&self, other: &Statevector<S>) -> Cplx<S> {
        let mut acc = Complex::new(S::zero(), S::zero());
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        acc
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &Gate<S>) {
        match gate.kind {
            GateKind::H => self.apply_h(gate.qubits[0]),
            GateKind::X => self.apply_x(gate.qubits[0]),
            GateKind::Cnot => self.apply_cnot(gate.qubits[0], gate.qubits[1], gate.control_state),
            GateKind::Crz => {
                let word = gate.rotation_string().unwrap();
                self.apply_pauli_rotation(
                    gate.angle,
                    word,
                    Some((gate.qubits[0], gate.control_state)),
                );
            }
            _ => {
                let word = gate.rotation_string().unwrap();
                self.apply_pauli_rotation(gate.angle, word, None);
            }
        }
    }

    fn apply_h(&mut self, q: usize) {
        let mask = 1usize << q;
        let inv_sqrt2 = S::one() / S::of(2.0).sqrt();
        let f = Complex::new(inv_sqrt2, S::zero());
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let hi = base | mask;
            let a = self.amps[base];
            let b = self.amps[hi];
            self.amps[base] = (a + b) * f;
            self.amps[hi] = (a - b) * f;
        }
    }

    fn apply_x(&mut self, q: usize) {
        let mask = 1usize << q;
        for base in 0..self.amps.len() {
            if base & mask == 0 {
                self.amps.swap(base, base | mask);
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize, control_state: bool) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        let want = if control_state { cmask } else { 0 };
        for base in 0..self.amps.len() {
            if base & tmask == 0 && base & cmask == want {
                self.amps.swap(base, base | tmask);
            }
        }
    }

    /// `exp(-i angle/2 * P)`, optionally restricted to a control qubit
    /// outside the word's support.
    pub fn apply_pauli_rotation(
        &mut self,
        angle: S,
        word: PauliString,
        control: Option<(usize, bool)>,
    ) {
        let (sin_half, cos_half) = (angle / S::of(2.0)).sin_cos();
        let minus_i_sin = Complex::new(S::zero(), -sin_half);
        let cos_c = Complex::new(cos_half, S::zero());
        let flip = word.x as usize;
        let check = |idx: usize| -> bool {
            match control {
                Some((q, state)) => ((idx >> q) & 1 == 1) == state,
                None => true,
            }
        };
        if let Some((q, _)) = control {
            debug_assert_eq!(word.support() >> q & 1, 0, "control inside rotation word");
        }
        if flip == 0 {
            // Diagonal word: pure phases.
            for (idx, amp) in self.amps.iter_mut().enumerate() {
                if !check(idx) {
                    continue;
                }
                let (_, phase) = word.apply_to_basis::<S>(idx as u64);
                *amp = *amp * (cos_c + minus_i_sin * phase);
            }
        } else {
            let pivot = flip & flip.wrapping_neg();
            for idx in 0..self.amps.len() {
                if idx & pivot != 0 || !check(idx) {
                    continue;
                }
                let partner = idx ^ flip;
                // P|partner> = ph_p |idx>, P|idx> = ph_i |partner>.
                let (_, ph_partner) = word.apply_to_basis::<S>(partner as u64);
                let (_, ph_idx) = word.apply_to_basis::<S>(idx as u64);
                let a = self.amps[idx];
                let b = self.amps[partner];
                self.amps[idx] = cos_c * a + minus_i_sin * ph_partner * b;
                self.amps[partner] = cos_c * b + minus_i_sin * ph_idx * a;
            }
        }
    }

    /// Apply a bare Pauli word (used by the noise model).
    pub fn apply_pauli(&mut self, word: PauliString) {
        let flip = word.x as usize;
        if flip == 0 {
            for (idx, amp) in self.amps.iter_mut().enumerate() {
                let (_, phase) = word.apply_to_basis::<S>(idx as u64);
                *amp = *amp * phase;
            }
        } else {
            let pivot = flip & flip.wrapping_neg();
            for idx in 0..self.amps.len() {
                if idx & pivot != 0 {
                    continue;
                }
                let partner = idx ^ flip;
                let (_, ph_partner) = word.apply_to_basis::<S>(partner as u64);
                let (_, ph_idx) = word.apply_to_basis::<S>(idx as u64);
                let a = self.amps[idx];
                let b = self.amps[partner];
                self.amps[idx] = ph_partner * b;
                self.amps[partner] = ph_idx * a;
            }
        }
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<S> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Measurement probability of finding qubit `q` in state `bit`.
    pub fn marginal(&self, q: usize, bit: bool) -> S {
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| (idx & mask != 0) == bit)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Run a circuit on an initial state.
pub fn run<S: Scalar>(circuit: &Circuit<S>, initial: &Statevector<S>) -> Result<Statevector<S>> {
    if initial.n_qubits != circuit.n_qubits {
        return Err(Error::WidthMismatch {
            expected: circuit.n_qubits,
            actual: initial.n_qubits,
        });
    }
    let mut state = initial.clone();
    for gate in &circuit.gates {
        state.apply(gate);
    }
    Ok(state)
}

/// Expectation value of a Hermitian observable.
pub fn expectation<S: Scalar>(state: &Statevector<S>, obs: &PauliSum<S>) -> Result<S> {
    if obs.n_qubits() != state.n_qubits {
        return Err(Error::WidthMismatch {
            expected: obs.n_qubits(),
            actual: state.n_qubits,
        });
    }
    obs.require_hermitian(S::tol(1e-10))?;
    let value = expectation_unchecked(state, obs);
    if value.im.abs() > S::tol(1e-10) {
        return Err(Error::NotHermitian {
            defect: value.im.abs().as_f64(),
        });
    }
    Ok(value.re)
}

/// `<state|obs|state>` without Hermiticity checks.
pub fn expectation_unchecked<S: Scalar>(state: &Statevector<S>, obs: &PauliSum<S>) -> Cplx<S> {
    let mut acc = Complex::new(S::zero(), S::zero());
    for term in obs.terms() {
        let mut term_acc = Complex::new(S::zero(), S::zero());
        for (idx, amp) in state.amps.iter().enumerate() {
            if amp.norm_sqr() == S::zero() {
                continue;
            }
            let (image, phase) = term.string.apply_to_basis::<S>(idx as u64);
            term_acc += state.amps[image as usize].conj() * phase * amp;
        }
        acc += term.coeff * term_acc;
    }
    acc
}

/// Multinomial sampling of measurement outcomes; deterministic under a
/// fixed seed.
pub fn sample<S: Scalar>(state: &Statevector<S>, shots: u64, seed: u64) -> ShotCounts {
    let mut cumulative: Vec<f64> = Vec::with_capacity(state.dim());
    let mut acc = 0.0f64;
    for amp in &state.amps {
        acc += amp.norm_sqr().as_f64();
        cumulative.push(acc);
    }
    let total_mass = acc;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts = ShotCounts::new(state.n_qubits, seed);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total_mass;
        let idx = cumulative.partition_point(|&c| c <= u).min(state.dim() - 1);
        counts.record(idx as u64);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliOp;

    type C = Cplx<f64>;

    fn dense_gate_matrix(gate: &Gate<f64>, n_qubits: usize) -> Vec<Vec<C>> {
        let dim = 1usize << n_qubits;
        let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let mut s = Statevector::basis(n_qubits, col as u64);
            s.apply(gate);
            for (row, amp) in s.amps.iter().enumerate() {
                m[row][col] = *amp;
            }
        }
        m
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let mut s = Statevector::<f64>::basis(2, 0b01); // qubit 0 = control, set
        s.apply(&Gate::cnot(0, 1));
        assert!((s.amps[0b11].norm() - 1.0).abs() < 1e-15);
        let mut s = Statevector::<f64>::basis(2, 0b00);
        s.apply(&Gate::cnot_anti(0, 1));
        assert!((s.amps[0b10].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rz_changes_only_phase() {
        let mut s = Statevector::<f64>::basis(1, 0);
        s.apply(&Gate::h(0));
        let before = s.probabilities();
        s.apply(&Gate::rz(0, 0.7));
        let after = s.probabilities();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn every_gate_matrix_is_unitary() {
        let gates: Vec<Gate<f64>> = vec![
            Gate::h(0),
            Gate::x(1),
            Gate::cnot(0, 2),
            Gate::cnot_anti(2, 0),
            Gate::rx(1, 0.3),
            Gate::ry(0, -0.8),
            Gate::rz(2, 1.1),
            Gate::rxx(0, 1, 0.5),
            Gate::ryy(1, 2, 0.4),
            Gate::rzz(0, 2, -0.9),
            Gate::rxxx(0, 1, 2, 0.6),
            Gate::ryxy(0, 1, 2, -0.2),
            Gate::crz(0, 1, 0.77),
            Gate::crz_on(1, 2, 0.77, false),
        ];
        for gate in gates {
            let m = dense_gate_matrix(&gate, 3);
            let dim = m.len();
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = C::new(0.0, 0.0);
                    for k in 0..dim {
                        acc += m[k][i].conj() * m[k][j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (acc - C::new(expect, 0.0)).norm() < 1e-14,
                        "gate {:?} not unitary",
                        gate.kind
                    );
                }
            }
        }
    }

    #[test]
    fn random_circuit_matches_dense_matrix_oracle() {
        // Multiply gate matrices densely and compare with the kernel path
        // on a random 6-qubit circuit.
        let n = 6;
        let mut circuit: Circuit<f64> = Circuit::new(n);
        let gates = [
            Gate::h(0),
            Gate::rx(3, 0.37),
            Gate::cnot(0, 4),
            Gate::rxx(1, 5, -0.45),
            Gate::ryy(2, 3, 0.81),
            Gate::rzz(0, 2, 0.29),
            Gate::rxxx(1, 2, 4, 0.55),
            Gate::ryxy(0, 3, 5, -0.61),
            Gate::crz(4, 1, 0.95),
            Gate::cnot_anti(5, 0),
            Gate::ry(2, -1.2),
            Gate::rz(5, 2.3),
        ];
        for g in &gates {
            circuit.push(g.clone());
        }
        // Dense product applied to a fixed initial state.
        let dim = 1usize << n;
        let mut reference: Vec<C> = (0..dim)
            .map(|i| C::new((i as f64 * 0.13).cos(), (i as f64 * 0.07).sin()))
            .collect();
        let norm: f64 = reference.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in reference.iter_mut() {
            *z /= C::new(norm, 0.0);
        }
        let initial = Statevector::from_amplitudes(n, reference.clone());
        let mut dense_state = reference;
        for g in &gates {
            let m = dense_gate_matrix(g, n);
            let mut next = vec![C::new(0.0, 0.0); dim];
            for (row, nr) in next.iter_mut().enumerate() {
                for (col, v) in dense_state.iter().enumerate() {
                    *nr += m[row][col] * v;
                }
            }
            dense_state = next;
        }
        let fast = run(&circuit, &initial).unwrap();
        let mut diff = 0.0;
        for (a, b) in fast.amps.iter().zip(&dense_state) {
            diff += (a - b).norm_sqr();
        }
        assert!(diff.sqrt() < 1e-10, "kernel mismatch {:e}", diff.sqrt());
        assert!((fast.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_basics_and_dense_oracle() {
        let n = 6;
        let s0 = Statevector::<f64>::basis(n, 0);
        let z0 = PauliSum::single(n, 0, PauliOp::Z, C::new(1.0, 0.0));
        assert!((expectation(&s0, &z0).unwrap() - 1.0).abs() < 1e-14);

        let mut circuit: Circuit<f64> = Circuit::new(n);
        circuit.push(Gate::h(0));
        circuit.push(Gate::cnot(0, 3));
        circuit.push(Gate::rx(2, 0.7));
        circuit.push(Gate::ryy(1, 4, 0.4));
        let state = run(&circuit, &s0).unwrap();

        let mut obs: PauliSum<f64> = PauliSum::zero(n);
        obs.push(C::new(0.5, 0.0), PauliString::single(0, PauliOp::Z));
        obs.push(C::new(-0.25, 0.0), {
            let mut w = PauliString::single(0, PauliOp::X);
            let t = PauliString::single(3, PauliOp::X);
            w.x |= t.x;
            w.z |= t.z;
            w
        });
        obs.push(C::new(0.125, 0.0), PauliString::single(2, PauliOp::Y));

        // Dense quadratic form.
        let m = obs.dense_matrix();
        let mut dense = C::new(0.0, 0.0);
        for (row, amp_r) in state.amps.iter().enumerate() {
            for (col, amp_c) in state.amps.iter().enumerate() {
                dense += amp_r.conj() * m[row][col] * amp_c;
            }
        }
        let fast = expectation(&state, &obs).unwrap();
        assert!((fast - dense.re).abs() < 1e-12);
        assert!(dense.im.abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let mut obs: PauliSum<f64> = PauliSum::zero(1);
        obs.push(C::new(0.0, 1.0), PauliString::single(0, PauliOp::X));
        let s = Statevector::<f64>::basis(1, 0);
        assert!(expectation(&s, &obs).is_err());
    }

    #[test]
    fn sampling_determinism_and_basis_state() {
        let s = Statevector::<f64>::basis(3, 0b101);
        let counts = sample(&s, 1000, 7);
        assert_eq!(counts.total, 1000);
        assert_eq!(counts.counts.len(), 1);
        assert_eq!(*counts.counts.get(&0b101).unwrap(), 1000);

        let mut plus = Statevector::<f64>::basis(1, 0);
        plus.apply(&Gate::h(0));
        let a = sample(&plus, 100_000, 42);
        let b = sample(&plus, 100_000, 42);
        assert_eq!(a, b);
        // 5 sigma binomial window around one half.
        let p = *a.counts.get(&0).unwrap_or(&0) as f64 / a.total as f64;
        let sigma = 0.5 / (a.total as f64).sqrt();
        assert!((p - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn empirical_distribution_converges_with_shots() {
        // Total-variation distance to |amp|^2 shrinks roughly like
        // 1/sqrt(shots) over seeds.
        let mut s = Statevector::<f64>::basis(3, 0);
        s.apply(&Gate::h(0));
        s.apply(&Gate::ry(1, 0.9));
        s.apply(&Gate::cnot(1, 2));
        let probs = s.probabilities();
        let tv = |shots: u64, seed: u64| -> f64 {
            let counts = sample(&s, shots, seed);
            let mut dist = 0.0;
            for (idx, p) in probs.iter().enumerate() {
                let observed =
                    counts.counts.get(&(idx as u64)).copied().unwrap_or(0) as f64 / shots as f64;
                dist += (observed - p).abs();
            }
            dist / 2.0
        };
        let mut small = 0.0;
        let mut large = 0.0;
        for seed in 0..8 {
            small += tv(1_000, seed);
            large += tv(64_000, seed);
        }
        // 64x the shots should shrink TV by about 8; allow headroom.
        assert!(
            large < small / 3.0,
            "tv did not shrink: {small:.4} -> {large:.4}"
        );
    }
}
