//! Wave-packet creation circuits.
//!
//! The creation operator is implemented through an ancilla: the Hermitian
//! coupling `Theta = b^dag (x) |1><0|_a + b (x) |0><1|_a` rotated by `pi/2`
//! maps `|Omega>|0_a>` to the packet state tagged `|1_a>`. The rotation is
//! Trotterized term by term with a second-order product formula; each
//! bare-meson term `exp(-i theta Theta_{m,n})` is realized by conjugating
//! a diagonal phase core with an alignment Clifford (the singular-vector
//! change of basis): ancilla-controlled CNOTs onto the meson ends (plus
//! the boson qubit for wrapped routes), a parity fold of the interior
//! string, and a four-rotation phase walk with angles `theta |C|/2`.

use super::segments;
use crate::coeffs::MesonCoefficients;
use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate};
use crate::lattice::LatticeParams;
use crate::profile::{profile_overlap, WavePacketProfile};
use crate::scalar::{Cplx, Scalar};

/// Ancilla budget for multi-packet preparation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaMode {
    /// One ancilla reused for every packet, with an `X` in between.
    Shared,
    /// A fresh ancilla per packet; failed preparations stay detectable.
    PerPacket,
}

/// Approximation knobs of the wave-packet preparation.
#[derive(Clone, Copy, Debug)]
pub struct PrepScheme<S> {
    pub ancilla_mode: AncillaMode,
    /// Trotter steps for the pi/2 rotation.
    pub wp_trotter_steps: usize,
    /// Rotation-angle cutoff; terms whose characteristic angle falls at or
    /// below it are dropped.
    pub theta_cutoff: S,
    /// Ansatz order carried by the coefficient tables.
    pub order: usize,
}

impl<S: Scalar> PrepScheme<S> {
    pub fn new(
        ancilla_mode: AncillaMode,
        wp_trotter_steps: usize,
        theta_cutoff: S,
        order: usize,
    ) -> Self {
        assert!(wp_trotter_steps >= 1);
        PrepScheme {
            ancilla_mode,
            wp_trotter_steps,
            theta_cutoff,
            order,
        }
    }

    /// High-accuracy preset: per-packet ancillas, ten Trotter steps, no
    /// cutoff.
    pub fn high_fidelity() -> Self {
        Self::new(AncillaMode::PerPacket, 10, S::zero(), 1)
    }

    /// Resource-frugal preset: shared ancilla, one Trotter step, cutoff at
    /// 0.1.
    pub fn compact() -> Self {
        Self::new(AncillaMode::Shared, 1, S::of(0.1), 1)
    }
}

/// One route of a bare meson: creation end, annihilation end, interior
/// string sites, boson participation, and the route sign.
#[derive(Clone, Debug)]
struct MesonRoute {
    m: usize,
    n: usize,
    mids: Vec<usize>,
    boson: bool,
    sign: f64,
    weight: f64,
}

fn routes<S: Scalar>(m: usize, n: usize, params: &LatticeParams<S>) -> Vec<MesonRoute> {
    let nn = params.n_stag();
    let n_p = params.n_phys;
    let arith = (m as i64 - n as i64).unsigned_abs() as usize;
    let (lo, hi) = (m.min(n), m.max(n));
    let direct = |weight: f64| MesonRoute {
        m,
        n,
        mids: (lo + 1..hi).collect(),
        boson: false,
        sign: if m < n { 1.0 } else { -1.0 },
        weight,
    };
    let wrapped = |weight: f64| MesonRoute {
        m,
        n,
        mids: (0..lo).chain(hi + 1..nn).collect(),
        boson: true,
        sign: {
            let base = if n_p % 2 == 0 { 1.0 } else { -1.0 };
            if m > n {
                -base
            } else {
                base
            }
        },
        weight,
    };
    if arith < n_p {
        vec![direct(1.0)]
    } else if arith > n_p {
        vec![wrapped(1.0)]
    } else {
        let w = 0.5f64.sqrt();
        vec![direct(w), wrapped(w)]
    }
}

/// Emit `exp(-i theta Theta_{q,q})` for a diagonal (number-operator) term:
/// a controlled in-plane rotation of the ancilla.
fn push_diagonal_term<S: Scalar>(
    circuit: &mut Circuit<S>,
    site: usize,
    ancilla: usize,
    coeff: Cplx<S>,
    theta: S,
) {
    let magnitude = coeff.norm();
    if magnitude == S::zero() {
        return;
    }
    let phi = coeff.arg();
    let half_pi = S::PI() / S::of(2.0);
    let beta = theta * magnitude;
    circuit.push(Gate::rz(ancilla, half_pi - phi));
    circuit.push(Gate::cnot(site, ancilla));
    circuit.push(Gate::ry(ancilla, -beta));
    circuit.push(Gate::cnot(site, ancilla));
    circuit.push(Gate::ry(ancilla, beta));
    circuit.push(Gate::rz(ancilla, phi - half_pi));
}

/// Emit `exp(-i theta Theta_route)` for one meson route.
fn push_route_term<S: Scalar>(
    circuit: &mut Circuit<S>,
    route: &MesonRoute,
    ancilla: usize,
    boson_qubit: usize,
    coeff: Cplx<S>,
    theta: S,
) {
    let c_eff = coeff * Cplx::new(S::of(route.sign * route.weight), S::zero());
    let r = c_eff.norm();
    if r == S::zero() {
        return;
    }
    let phi = c_eff.arg();
    let beta = theta * r / S::of(2.0);
    let (m, n) = (route.m, route.n);

    circuit.push(Gate::rz(ancilla, -phi));
    // Alignment: collapse the coupled pair onto the ancilla axis.
    circuit.push(Gate::cnot(ancilla, m));
    circuit.push(Gate::cnot(ancilla, n));
    if route.boson {
        circuit.push(Gate::cnot(ancilla, boson_qubit));
    }
    circuit.push(Gate::cnot(m, n));
    circuit.push(Gate::h(ancilla));
    // Fold the interior string parity onto the ancilla line.
    for &mid in &route.mids {
        circuit.push(Gate::cnot(mid, ancilla));
    }
    // Diagonal core: phase walk over the end-parity frames.
    circuit.push(Gate::rz(ancilla, beta));
    circuit.push(Gate::cnot(m, ancilla));
    circuit.push(Gate::rz(ancilla, beta));
    circuit.push(Gate::cnot(n, ancilla));
    circuit.push(Gate::rz(ancilla, -beta));
    circuit.push(Gate::cnot(m, ancilla));
    circuit.push(Gate::rz(ancilla, -beta));
    circuit.push(Gate::cnot(n, ancilla));
    // Unwind.
    for &mid in route.mids.iter().rev() {
        circuit.push(Gate::cnot(mid, ancilla));
    }
    circuit.push(Gate::h(ancilla));
    circuit.push(Gate::cnot(m, n));
    if route.boson {
        circuit.push(Gate::cnot(ancilla, boson_qubit));
    }
    circuit.push(Gate::cnot(ancilla, n));
    circuit.push(Gate::cnot(ancilla, m));
    circuit.push(Gate::rz(ancilla, phi));
}

fn push_term<S: Scalar>(
    circuit: &mut Circuit<S>,
    pair: (usize, usize),
    coeff: Cplx<S>,
    theta: S,
    ancilla: usize,
    params: &LatticeParams<S>,
) {
    let (m, n) = pair;
    if m == n {
        push_diagonal_term(circuit, m, ancilla, coeff, theta);
    } else {
        for route in routes(m, n, params) {
            push_route_term(circuit, &route, ancilla, params.boson_qubit(), coeff, theta);
        }
    }
}

/// Characteristic rotation angle of a term after Trotter splitting, used
/// by the cutoff: the magnitude of the phase-walk rotations,
/// `theta |C| / 2`.
fn characteristic_angle<S: Scalar>(coeff: Cplx<S>, theta_app: S) -> S {
    theta_app * coeff.norm() / S::of(2.0)
}

/// Build the single-packet creation circuit `Q_WP` on `n_qubits` total
/// qubits, rotating through `ancilla`.
pub fn build_qwp<S: Scalar>(
    coeffs: &MesonCoefficients<S>,
    scheme: &PrepScheme<S>,
    ancilla: usize,
    params: &LatticeParams<S>,
    n_qubits: usize,
) -> Result<Circuit<S>> {
    if ancilla < params.n_system_qubits() {
        return Err(Error::AncillaCollision {
            ancilla,
            system: params.n_system_qubits(),
        });
    }
    if coeffs.order > scheme.order {
        return Err(Error::Config(format!(
            "coefficient table order {} exceeds scheme order {}",
            coeffs.order, scheme.order
        )));
    }
    let steps = scheme.wp_trotter_steps;
    let theta_app = S::PI() / (S::of(4.0) * S::of(steps as f64));
    let kept: Vec<&((usize, usize), Cplx<S>)> = coeffs
        .entries
        .iter()
        .filter(|(_, c)| {
            c.norm() > S::zero() && characteristic_angle(*c, theta_app) > scheme.theta_cutoff
        })
        .collect();
    let mut circuit = Circuit::new(n_qubits);
    circuit.with_segment(segments::WAVE_PACKET, |c| {
        for _ in 0..steps {
            for (pair, coeff) in kept.iter() {
                push_term(c, *pair, *coeff, theta_app, ancilla, params);
            }
            for (pair, coeff) in kept.iter().rev() {
                push_term(c, *pair, *coeff, theta_app, ancilla, params);
            }
        }
    });
    Ok(circuit)
}

/// Count of coefficients that survive the cutoff (the number of plotted
/// angles above the threshold line).
pub fn surviving_coefficients<S: Scalar>(
    coeffs: &MesonCoefficients<S>,
    scheme: &PrepScheme<S>,
) -> usize {
    let theta_app = S::PI() / (S::of(4.0) * S::of(scheme.wp_trotter_steps as f64));
    coeffs
        .entries
        .iter()
        .filter(|(_, c)| {
            c.norm() > S::zero() && characteristic_angle(*c, theta_app) > scheme.theta_cutoff
        })
        .count()
}

/// Result of assembling the multi-packet initial-state circuit.
#[derive(Clone, Debug)]
pub struct QInitBuild<S: Scalar> {
    pub circuit: Circuit<S>,
    /// Ancilla qubits that must all read `|1>` on acceptance.
    pub accept: Vec<usize>,
    /// Pairwise overlap warnings (absolute overlap above 0.1).
    pub warnings: Vec<String>,
}

/// Build the initial-state circuit for one or more wave packets.
///
/// In shared mode the single ancilla is flipped by `X` before every
/// subsequent packet; in per-packet mode each packet gets its own ancilla.
pub fn build_qinit<S: Scalar>(
    profiles: &[WavePacketProfile<S>],
    tables: &[MesonCoefficients<S>],
    scheme: &PrepScheme<S>,
    ancillas: &[usize],
    params: &LatticeParams<S>,
    n_qubits: usize,
) -> Result<QInitBuild<S>> {
    assert_eq!(profiles.len(), tables.len());
    let needed = match scheme.ancilla_mode {
        AncillaMode::Shared => 1,
        AncillaMode::PerPacket => profiles.len(),
    };
    if ancillas.len() < needed {
        return Err(Error::AncillaShortage {
            needed,
            available: ancillas.len(),
        });
    }
    let mut warnings = Vec::new();
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let ov = profile_overlap(&profiles[i], &profiles[j])?.norm();
            if ov > S::of(0.1) {
                warnings.push(format!(
                    "packets {i} and {j} overlap strongly (|overlap| = {ov:.4}); \
                     repeated creation assumes far-separated packets"
                ));
            }
        }
    }
    let mut circuit = Circuit::new(n_qubits);
    let mut accept = Vec::new();
    for (index, table) in tables.iter().enumerate() {
        let ancilla = match scheme.ancilla_mode {
            AncillaMode::Shared => ancillas[0],
            AncillaMode::PerPacket => ancillas[index],
        };
        if scheme.ancilla_mode == AncillaMode::Shared && index > 0 {
            circuit.push(Gate::x(ancilla));
        }
        let packet = build_qwp(table, scheme, ancilla, params, n_qubits)?;
        circuit.append(&packet);
        let record = scheme.ancilla_mode == AncillaMode::PerPacket || index == tables.len() - 1;
        if record && !accept.contains(&ancilla) {
            accept.push(ancilla);
        }
    }
    Ok(QInitBuild {
        circuit,
        accept,
        warnings,
    })
}
