//! Momentum-space wave-packet profiles.

use crate::error::{Error, Result};
use crate::lattice::{brillouin_zone, LatticeParams};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// A normalized momentum-space wavefunction over the Brillouin zone.
#[derive(Clone, Debug)]
pub struct WavePacketProfile<S: Scalar> {
    /// Position center (staggered-site units of the physical lattice).
    pub mu: S,
    /// Momentum-space width.
    pub sigma: S,
    /// Central momentum.
    pub kbar: S,
    /// Zone momenta, ascending.
    pub momenta: Vec<S>,
    /// `Psi(k)` per zone momentum, normalized to unit square sum.
    pub values: Vec<Cplx<S>>,
    /// Normalization constant applied.
    pub norm_const: S,
}

/// Gaussian profile `Psi(k) = N exp(-i k mu) exp(-(k - kbar)^2 / (4 sigma^2))`.
pub fn gaussian_profile<S: Scalar>(
    mu: S,
    sigma: S,
    kbar: S,
    params: &LatticeParams<S>,
) -> Result<WavePacketProfile<S>> {
    if sigma <= S::zero() {
        return Err(Error::Config("wave-packet width must be positive".into()));
    }
    let momenta = brillouin_zone(params);
    let mut values: Vec<Cplx<S>> = momenta
        .iter()
        .map(|&k| {
            let envelope = (-(k - kbar) * (k - kbar) / (S::of(4.0) * sigma * sigma)).exp();
            Complex::from_polar(envelope, -k * mu)
        })
        .collect();
    let norm_sq: S = values.iter().map(|z| z.norm_sqr()).sum();
    let norm_const = S::one() / norm_sq.sqrt();
    for v in values.iter_mut() {
        *v *= Complex::new(norm_const, S::zero());
    }
    Ok(WavePacketProfile {
        mu,
        sigma,
        kbar,
        momenta,
        values,
        norm_const,
    })
}

/// A delta profile concentrated on zone index `k_index`.
pub fn delta_profile<S: Scalar>(k_index: usize, params: &LatticeParams<S>) -> WavePacketProfile<S> {
    let momenta = brillouin_zone(params);
    let mut values = vec![Complex::new(S::zero(), S::zero()); momenta.len()];
    values[k_index] = Complex::new(S::one(), S::zero());
    let kbar = momenta[k_index];
    WavePacketProfile {
        mu: S::zero(),
        sigma: S::zero(),
        kbar,
        momenta,
        values,
        norm_const: S::one(),
    }
}

/// Overlap `(a|b) = sum_k a*(k) b(k)`.
pub fn profile_overlap<S: Scalar>(
    a: &WavePacketProfile<S>,
    b: &WavePacketProfile<S>,
) -> Result<Cplx<S>> {
    if a.momenta.len() != b.momenta.len() {
        return Err(Error::ZoneMismatch);
    }
    for (x, y) in a.momenta.iter().zip(&b.momenta) {
        if (*x - *y).abs() > S::of(1e-12) {
            return Err(Error::ZoneMismatch);
        }
    }
    let mut acc = Complex::new(S::zero(), S::zero());
    for (x, y) in a.values.iter().zip(&b.values) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n_phys: usize) -> LatticeParams<f64> {
        LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
    }

    #[test]
    fn normalization_and_self_overlap() {
        let p = params(5);
        let pi = std::f64::consts::PI;
        let a = gaussian_profile(2.0, 7.0 * pi / 20.0, 2.0 * pi / 5.0, &p).unwrap();
        let norm: f64 = a.values.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let s = profile_overlap(&a, &a).unwrap();
        assert!((s.re - 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
    }

    #[test]
    fn published_two_packet_overlaps() {
        let pi = std::f64::consts::PI;
        // 10-site lattice: sigma = 7pi/20, kbar = +-2pi/5, mu = 2 and 7.
        let p = params(5);
        let psi1 = gaussian_profile(2.0, 7.0 * pi / 20.0, 2.0 * pi / 5.0, &p).unwrap();
        let psi2 = gaussian_profile(7.0, 7.0 * pi / 20.0, -2.0 * pi / 5.0, &p).unwrap();
        let s = profile_overlap(&psi2, &psi1).unwrap();
        assert!(
            (s.norm() - 0.0666).abs() < 5e-5,
            "overlap {} vs 0.0666",
            s.norm()
        );

        // 26-site lattice: sigma = 3pi/13, kbar = +-2pi/13, mu = 6 and 19.
        let p13 = params(13);
        let psi1 = gaussian_profile(6.0, 3.0 * pi / 13.0, 2.0 * pi / 13.0, &p13).unwrap();
        let psi2 = gaussian_profile(19.0, 3.0 * pi / 13.0, -2.0 * pi / 13.0, &p13).unwrap();
        let s = profile_overlap(&psi2, &psi1).unwrap();
        assert!(
            (s.norm() - 0.0104).abs() < 5e-5,
            "overlap {} vs 0.0104",
            s.norm()
        );
    }

    #[test]
    fn disjoint_deltas_are_orthogonal() {
        let p = params(5);
        let a = delta_profile(0, &p);
        let b = delta_profile(3, &p);
        assert!(profile_overlap(&a, &b).unwrap().norm() < 1e-15);
    }

    #[test]
    fn zone_mismatch_rejected() {
        let a = delta_profile(0, &params(5));
        let b = delta_profile(0, &params(3));
        assert!(profile_overlap(&a, &b).is_err());
    }
}
