//! Run configuration: a plain TOML key-value tree.

use serde::{Deserialize, Serialize};
use z2scatter::circuits::{AncillaMode, GroundStateAngles, PrepScheme};
use z2scatter::coeffs::AnsatzParams;
use z2scatter::lattice::{brillouin_zone, LatticeParams};
use z2scatter::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeSection {
    pub n_phys: usize,
    pub mass: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundSection {
    /// Optimize the two vacuum angles when true; otherwise use the pinned
    /// values below.
    #[serde(default = "default_true")]
    pub optimize: bool,
    pub theta_h: Option<f64>,
    pub theta_m: Option<f64>,
}

impl Default for GroundSection {
    fn default() -> Self {
        GroundSection {
            optimize: true,
            theta_h: None,
            theta_m: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaEntry {
    /// Position in the ascending Brillouin zone.
    pub k_index: usize,
    /// One `[alpha_even, alpha_odd]` pair per meson length, ascending.
    pub values: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnsatzSection {
    pub order: usize,
    #[serde(default = "default_true")]
    pub optimize: bool,
    /// Pinned suppression parameters; required when `optimize = false`.
    #[serde(default)]
    pub alphas: Vec<AlphaEntry>,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        AnsatzSection {
            order: 1,
            optimize: true,
            alphas: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WavePacketSection {
    pub mu: f64,
    pub sigma: f64,
    pub kbar: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeSection {
    /// "shared" (one ancilla reused) or "per-packet".
    pub ancilla_mode: String,
    pub wp_trotter_steps: usize,
    pub theta_cutoff: f64,
}

impl Default for SchemeSection {
    fn default() -> Self {
        SchemeSection {
            ancilla_mode: "per-packet".into(),
            wp_trotter_steps: 10,
            theta_cutoff: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionSection {
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub controlled: bool,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        EvolutionSection {
            dt: 1.0,
            n_steps: 0,
            controlled: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct NoiseSection {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
    #[serde(default)]
    pub twirl: bool,
}

fn default_trajectories() -> u64 {
    3000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: String,
}

fn default_true() -> bool {
    true
}

fn default_shots() -> u64 {
    500_000
}

fn default_resamples() -> usize {
    100
}

/// Full experiment configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub ground: GroundSection,
    #[serde(default)]
    pub ansatz: AnsatzSection,
    #[serde(default)]
    pub wavepackets: Vec<WavePacketSection>,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn lattice_params(&self) -> Result<LatticeParams<f64>> {
        LatticeParams::new(self.lattice.n_phys, self.lattice.mass, self.lattice.eps)
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.lattice_params()?;
        let zone = brillouin_zone(&params);
        for (i, wp) in self.wavepackets.iter().enumerate() {
            if wp.sigma <= 0.0 {
                return Err(Error::Config(format!("wavepackets[{i}].sigma must be > 0")));
            }
            let on_grid = zone.iter().any(|&k| (k - wp.kbar).abs() < 1e-9);
            if !on_grid {
                return Err(Error::Config(format!(
                    "wavepackets[{i}].kbar = {} is not a zone momentum of N_P = {}",
                    wp.kbar, self.lattice.n_phys
                )));
            }
        }
        match self.scheme.ancilla_mode.as_str() {
            "shared" | "per-packet" => {}
            other => {
                return Err(Error::Config(format!(
                    "scheme.ancilla_mode must be \"shared\" or \"per-packet\", got {other:?}"
                )))
            }
        }
        if self.scheme.wp_trotter_steps == 0 {
            return Err(Error::Config("scheme.wp_trotter_steps must be >= 1".into()));
        }
        if self.evolution.dt <= 0.0 {
            return Err(Error::Config("evolution.dt must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.noise.p1) || !(0.0..=1.0).contains(&self.noise.p2) {
            return Err(Error::Config(
                "noise probabilities must lie in [0, 1]".into(),
            ));
        }
        if self.ansatz.order == 0 || self.ansatz.order > self.lattice.n_phys {
            return Err(Error::Config(format!(
                "ansatz.order must lie in 1..={}",
                self.lattice.n_phys
            )));
        }
        if !self.ansatz.optimize {
            let pinned = self.pinned_alphas()?;
            for k in 0..zone.len() {
                if pinned.order(k) < self.ansatz.order {
                    return Err(Error::Config(format!(
                        "ansatz.optimize = false but alphas for k_index {k} stop at order {}",
                        pinned.order(k)
                    )));
                }
            }
        }
        if !self.ground.optimize && (self.ground.theta_h.is_none() || self.ground.theta_m.is_none())
        {
            return Err(Error::Config(
                "ground.optimize = false requires theta_h and theta_m".into(),
            ));
        }
        Ok(())
    }

    pub fn pinned_alphas(&self) -> Result<AnsatzParams<f64>> {
        let params = self.lattice_params()?;
        let zone = brillouin_zone(&params);
        let mut ap = AnsatzParams::empty(zone.len());
        for entry in &self.ansatz.alphas {
            if entry.k_index >= zone.len() {
                return Err(Error::Config(format!(
                    "alphas entry k_index {} out of range ({} zone momenta)",
                    entry.k_index,
                    zone.len()
                )));
            }
            for pair in &entry.values {
                ap.push_order(entry.k_index, pair[0], pair[1]);
            }
        }
        Ok(ap)
    }

    pub fn prep_scheme(&self) -> PrepScheme<f64> {
        let mode = if self.scheme.ancilla_mode == "shared" {
            AncillaMode::Shared
        } else {
            AncillaMode::PerPacket
        };
        PrepScheme::new(
            mode,
            self.scheme.wp_trotter_steps,
            self.scheme.theta_cutoff,
            self.ansatz.order,
        )
    }

    pub fn pinned_ground(&self) -> Option<GroundStateAngles<f64>> {
        match (
            self.ground.optimize,
            self.ground.theta_h,
            self.ground.theta_m,
        ) {
            (false, Some(h), Some(m)) => Some(GroundStateAngles::new(h, m)),
            _ => None,
        }
    }

    /// Number of ancillas the preparation needs.
    pub fn n_prep_ancillas(&self) -> usize {
        if self.wavepackets.is_empty() {
            0
        } else if self.scheme.ancilla_mode == "shared" {
            1
        } else {
            self.wavepackets.len()
        }
    }

    /// Canonical serialized form used for the manifest hash.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// FNV-1a of the canonical config text: the manifest hash.
pub fn config_hash(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
