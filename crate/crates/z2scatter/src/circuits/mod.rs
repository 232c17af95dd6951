//! Protocol circuit builders: vacuum preparation, wave-packet creation,
//! Trotterized evolution, controlled evolution for the Hadamard test,
//! Pauli twirling, and CNOT-decomposed gate accounting.

mod counting;
mod qgs;
mod qwp;
mod trotter;
mod twirl;

pub use counting::{count_gates, GateCounts};
pub use qgs::{build_qgs, GroundStateAngles};
pub use qwp::{
    build_qinit, build_qwp, surviving_coefficients, AncillaMode, PrepScheme, QInitBuild,
};
pub use trotter::{
    build_controlled_evolution, build_identity_step, build_trotter_step, EvolutionPlan,
};
pub use twirl::{cnot_twirl_variants, pauli_twirl};

/// Segment names used by the builders.
pub mod segments {
    /// Ground-state preparation block.
    pub const GROUND_STATE: &str = "qgs";
    /// One wave-packet creation block.
    pub const WAVE_PACKET: &str = "qwp";
    /// One full Trotter step.
    pub const TROTTER_STEP: &str = "trotter";
    /// The electric-field block inside a Trotter step (twirl target).
    pub const ELECTRIC: &str = "electric";
}
