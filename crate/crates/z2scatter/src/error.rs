//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, diagonalization, and circuit
/// assembly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("sector dimension {dim} exceeds the diagonalization guard ({limit})")]
    DimensionExceeded { dim: usize, limit: usize },

    #[error("state dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("singular kinematics: omega vanishes at k = {k} (massless point)")]
    SingularKinematics { k: f64 },

    #[error("site index {site} outside lattice of {n_sites} staggered sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("ansatz parameters incomplete: missing alpha for k index {k_index}, order {order}")]
    MissingParameter { k_index: usize, order: usize },

    #[error(
        "wave-packet profile has support at k index {k_index} not covered by ansatz parameters"
    )]
    CoverageGap { k_index: usize },

    #[error("Brillouin zones differ between profiles")]
    ZoneMismatch,

    #[error("observable is not Hermitian (adjoint defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("qubit register mismatch: circuit expects {expected} qubits, state has {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("ancilla qubit {ancilla} collides with the system register of width {system}")]
    AncillaCollision { ancilla: usize, system: usize },

    #[error("not enough ancillas: need {needed}, have {available}")]
    AncillaShortage { needed: usize, available: usize },

    #[error("circuit has no segment named {0:?}")]
    NoSuchSegment(String),

    #[error("degenerate subspace at energy {energy} mixes translation eigenvalues non-orthogonally (residual {residual:e})")]
    TranslationMixing { energy: f64, residual: f64 },

    #[error("gauge matching between formulations failed: {0}")]
    GaugeMismatch(String),

    #[error("empty sample")]
    EmptySample,

    #[error("ODR rescale hit |1-rho| < {guard:e} at t = {t}")]
    OdrDivisionGuard { t: f64, guard: f64 },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
