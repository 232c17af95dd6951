//! Stochastic Pauli noise trajectories.
//!
//! After every gate, with probability `p1` (single-qubit gates) or `p2`
//! (entangling gates), a uniformly random non-identity Pauli acts on the
//! gate's qubits. Each trajectory owns a derived RNG stream
//! `(seed, trajectory index)`, so results are reproducible no matter how
//! the trajectories are scheduled; one measurement is drawn per
//! trajectory.

use crate::error::Result;
use crate::gates::Circuit;
use crate::pauli::PauliString;
use crate::scalar::Scalar;
use crate::shots::ShotCounts;
use crate::statevector::Statevector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Depolarizing-style stochastic Pauli injection parameters.
#[derive(Clone, Copy, Debug)]
pub struct NoiseModel<S> {
    /// Injection probability after a single-qubit gate.
    pub p1: S,
    /// Injection probability after an entangling gate.
    pub p2: S,
    pub seed: u64,
}

impl<S: Scalar> NoiseModel<S> {
    pub fn new(p1: S, p2: S, seed: u64) -> Self {
        assert!(p1 >= S::zero() && p1 <= S::one());
        assert!(p2 >= S::zero() && p2 <= S::one());
        NoiseModel { p1, p2, seed }
    }

    pub fn noiseless(seed: u64) -> Self {
        NoiseModel {
            p1: S::zero(),
            p2: S::zero(),
            seed,
        }
    }
}

/// One injected error, for instrumented runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Injection {
    pub gate_index: usize,
    pub word: PauliString,
}

/// Uniform non-identity Pauli over `qubits`.
fn random_pauli(rng: &mut ChaCha12Rng, qubits: &[usize]) -> PauliString {
    let options = 4u64.pow(qubits.len() as u32) - 1;
    let pick = rng.random_range(1..=options);
    let mut word = PauliString::IDENTITY;
    let mut rem = pick;
    for &q in qubits {
        let letter = rem % 4;
        rem /= 4;
        match letter {
            1 => word.x |= 1 << q,
            2 => {
                word.x |= 1 << q;
                word.z |= 1 << q;
            }
            3 => word.z |= 1 << q,
            _ => {}
        }
    }
    word
}

fn run_trajectory<S: Scalar>(
    circuit: &Circuit<S>,
    initial: &Statevector<S>,
    noise: &NoiseModel<S>,
    index: u64,
    log: Option<&mut Vec<Injection>>,
) -> u64 {
    let mut rng = ChaCha12Rng::seed_from_u64(noise.seed);
    rng.set_stream(index.wrapping_add(1));
    let mut state = initial.clone();
    let mut injections = log;
    for (gate_index, gate) in circuit.gates.iter().enumerate() {
        state.apply(gate);
        let p = if gate.qubits.len() >= 2 {
            noise.p2
        } else {
            noise.p1
        };
        if p > S::zero() && rng.random::<f64>() < p.as_f64() {
            let word = random_pauli(&mut rng, &gate.qubits);
            state.apply_pauli(word);
            if let Some(list) = injections.as_deref_mut() {
                list.push(Injection { gate_index, word });
            }
        }
    }
    // One measurement per trajectory from its own stream.
    let probs = state.probabilities();
    let mut acc = 0.0f64;
    let u: f64 = rng.random::<f64>() * probs.iter().map(|p| p.as_f64()).sum::<f64>();
    for (idx, p) in probs.iter().enumerate() {
        acc += p.as_f64();
        if u < acc {
            return idx as u64;
        }
    }
    probs.len() as u64 - 1
}

/// Noisy execution: `trajectories` independent stochastic runs, one
/// measured bitstring each.
pub fn run_noisy<S: Scalar>(
    circuit: &Circuit<S>,
    initial: &Statevector<S>,
    noise: &NoiseModel<S>,
    trajectories: u64,
) -> Result<ShotCounts> {
    Ok(run_noisy_with_log(circuit, initial, noise, trajectories, false)?.0)
}

/// Noisy execution that optionally records every injected Pauli.
pub fn run_noisy_with_log<S: Scalar>(
    circuit: &Circuit<S>,
    initial: &Statevector<S>,
    noise: &NoiseModel<S>,
    trajectories: u64,
    keep_log: bool,
) -> Result<(ShotCounts, Vec<Vec<Injection>>)> {
    if initial.n_qubits != circuit.n_qubits {
        return Err(crate::error::Error::WidthMismatch {
            expected: circuit.n_qubits,
            actual: initial.n_qubits,
        });
    }
    let results: Vec<(u64, Vec<Injection>)> = (0..trajectories)
        .into_par_iter()
        .map(|index| {
            let mut log = Vec::new();
            let bits = run_trajectory(circuit, initial, noise, index, keep_log.then_some(&mut log));
            (bits, log)
        })
        .collect();
    let mut counts = ShotCounts::new(circuit.n_qubits, noise.seed);
    let mut logs = Vec::with_capacity(if keep_log { trajectories as usize } else { 0 });
    for (bits, log) in results {
        counts.record(bits);
        if keep_log {
            logs.push(log);
        }
    }
    Ok((counts, logs))
}
