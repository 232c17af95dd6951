//! Shot post-processing: symmetry and ancilla filters, the staggered
//! density and electric-field observables, bootstrap errors, the
//! Hadamard-test return probability, and operator decoherence
//! renormalization.

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::scalar::Scalar;
use crate::shots::ShotCounts;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Filter outcome: kept shots plus the violation rates.
#[derive(Clone, Debug)]
pub struct FilterReport {
    pub kept: ShotCounts,
    /// Fraction of the input discarded by the charge filter.
    pub q_violation_rate: f64,
    /// Fraction of the post-charge sample failing the ancilla pattern.
    pub ancilla_violation_rate: f64,
}

/// Keep only bitstrings whose fermion-register weight equals `N_P`.
pub fn filter_q<S: Scalar>(counts: &ShotCounts, params: &LatticeParams<S>) -> FilterReport {
    let n_p = params.n_phys as u32;
    let mask = (1u64 << params.n_stag()) - 1;
    let kept = counts.filtered(|bits| (bits & mask).count_ones() == n_p);
    let rate = if counts.total == 0 {
        0.0
    } else {
        1.0 - kept.total as f64 / counts.total as f64
    };
    FilterReport {
        kept,
        q_violation_rate: rate,
        ancilla_violation_rate: 0.0,
    }
}

/// Keep only shots whose listed ancilla qubits all read `|1>`; the rate is
/// computed on the post-charge sample, extending the input report.
pub fn filter_ancilla(report: &FilterReport, accept: &[usize]) -> FilterReport {
    let pred = |bits: u64| accept.iter().all(|&a| (bits >> a) & 1 == 1);
    let kept = report.kept.filtered(pred);
    let rate = if report.kept.total == 0 {
        0.0
    } else {
        1.0 - kept.total as f64 / report.kept.total as f64
    };
    FilterReport {
        kept,
        q_violation_rate: report.q_violation_rate,
        ancilla_violation_rate: rate,
    }
}

/// Staggered fermion density per site: occupation at even sites, one minus
/// occupation at odd sites. Zero everywhere on the bare Dirac sea.
pub fn staggered_density<S: Scalar>(
    kept: &ShotCounts,
    params: &LatticeParams<S>,
) -> Result<Vec<f64>> {
    if kept.total == 0 {
        return Err(Error::EmptySample);
    }
    let n = params.n_stag();
    let mut density = vec![0.0; n];
    for (bits, count) in kept.iter() {
        let w = count as f64;
        for (site, d) in density.iter_mut().enumerate() {
            let occ = ((bits >> site) & 1) as f64;
            *d += w * if site % 2 == 0 { occ } else { 1.0 - occ };
        }
    }
    for d in density.iter_mut() {
        *d /= kept.total as f64;
    }
    Ok(density)
}

/// Electric field at the boson qubit: `+1` for spin up (bit 0), `-1` for
/// spin down.
pub fn electric_field<S: Scalar>(kept: &ShotCounts, params: &LatticeParams<S>) -> Result<f64> {
    if kept.total == 0 {
        return Err(Error::EmptySample);
    }
    let boson = params.boson_qubit();
    Ok(kept.mean(|bits| 1.0 - 2.0 * ((bits >> boson) & 1) as f64))
}

/// Bootstrap standard errors of a vector-valued statistic over multinomial
/// resamples of the kept counts; every component shares the same
/// resampled configurations. Deterministic under a fixed seed.
pub fn bootstrap_errors_vec(
    kept: &ShotCounts,
    statistic: impl Fn(&ShotCounts) -> Vec<f64> + Sync,
    resamples: usize,
    seed: u64,
) -> Vec<f64> {
    assert!(resamples >= 2);
    if kept.total == 0 {
        return Vec::new();
    }
    let entries: Vec<(u64, u64)> = kept.iter().collect();
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0u64;
    for (_, c) in &entries {
        acc += c;
        cumulative.push(acc);
    }
    let total = kept.total;
    let values: Vec<Vec<f64>> = (0..resamples)
        .map(|r| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(r as u64 + 1);
            let mut resampled = ShotCounts::new(kept.n_qubits, seed);
            for _ in 0..total {
                let u = rng.random_range(0..total);
                let idx = cumulative.partition_point(|&c| c <= u);
                resampled.record(entries[idx].0);
            }
            statistic(&resampled)
        })
        .collect();
    let width = values[0].len();
    let mut errors = Vec::with_capacity(width);
    for component in 0..width {
        let mean = values.iter().map(|v| v[component]).sum::<f64>() / resamples as f64;
        let var = values
            .iter()
            .map(|v| (v[component] - mean).powi(2))
            .sum::<f64>()
            / resamples as f64;
        errors.push(var.sqrt());
    }
    errors
}

/// Bootstrap standard error of a scalar statistic.
pub fn bootstrap_errors(
    kept: &ShotCounts,
    statistic: impl Fn(&ShotCounts) -> f64 + Sync,
    resamples: usize,
    seed: u64,
) -> f64 {
    let errors = bootstrap_errors_vec(kept, |c| vec![statistic(c)], resamples, seed);
    errors.first().copied().unwrap_or(0.0)
}

/// `p0 - p1` of one ancilla qubit in a shot sample.
pub fn ancilla_asymmetry(counts: &ShotCounts, ancilla: usize) -> Result<f64> {
    if counts.total == 0 {
        return Err(Error::EmptySample);
    }
    Ok(counts.mean(|bits| 1.0 - 2.0 * ((bits >> ancilla) & 1) as f64))
}

/// Return probability from the two Hadamard-test variants: the plain-H
/// circuit estimates the real part as `p0 - p1` on the test ancilla, the
/// quarter-X-rotation variant the imaginary part; `R = Re^2 + Im^2`.
pub fn return_probability(
    re_counts: &ShotCounts,
    im_counts: &ShotCounts,
    test_ancilla: usize,
) -> Result<f64> {
    let re = ancilla_asymmetry(re_counts, test_ancilla)?;
    let im = ancilla_asymmetry(im_counts, test_ancilla)?;
    Ok(re * re + im * im)
}

/// A time series of one observable with bootstrap errors.
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub label: String,
}

impl ObservableSeries {
    pub fn new(label: &str) -> Self {
        ObservableSeries {
            label: label.to_string(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, t: f64, value: f64, error: f64) {
        self.times.push(t);
        self.values.push(value);
        self.errors.push(error);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Operator decoherence renormalization: rescale a noisy series by the
/// decay `rho(t) = 1 - E'(t)/E0` measured on a same-shape identity
/// circuit, so `E_odr(t) = E(t) / (1 - rho(t))`. Errors combine in
/// quadrature.
pub fn odr_rescale(
    series: &ObservableSeries,
    identity_series: &ObservableSeries,
    e0: f64,
) -> Result<ObservableSeries> {
    if series.times.len() != identity_series.times.len() {
        return Err(Error::DimensionMismatch {
            left: series.times.len(),
            right: identity_series.times.len(),
        });
    }
    if e0 == 0.0 {
        return Err(Error::Config("ODR reference value is zero".into()));
    }
    let guard = 1e-6;
    let mut out = ObservableSeries::new(&format!("{}_odr", series.label));
    for i in 0..series.times.len() {
        let t = series.times[i];
        if (series.times[i] - identity_series.times[i]).abs() > 1e-12 {
            return Err(Error::Config(format!("time grids differ at index {i}")));
        }
        let survival = identity_series.values[i] / e0; // = 1 - rho(t)
        if survival.abs() < guard {
            return Err(Error::OdrDivisionGuard { t, guard });
        }
        let value = series.values[i] / survival;
        // Quadrature propagation through E / (E'/E0).
        let rel_a = if series.values[i].abs() > 1e-300 {
            series.errors[i] / series.values[i]
        } else {
            0.0
        };
        let rel_b = if identity_series.values[i].abs() > 1e-300 {
            identity_series.errors[i] / identity_series.values[i]
        } else {
            0.0
        };
        let error = value.abs() * (rel_a * rel_a + rel_b * rel_b).sqrt();
        out.push(t, value, error);
    }
    Ok(out)
}
