//! Free-fermion kinematic factors entering the meson-creation ansatz.
//!
//! Plane-wave solutions of the free staggered theory give the dispersion
//! `omega_k = sqrt(m_f^2 + sin^2 k)` and velocity factor
//! `v_k = sin k / (m_f + omega_k)`. The particle/antiparticle amplitudes
//! `C(p, m)` and `D(q, n)` distribute these over even and odd sites; the
//! bare two-momentum coefficient sums them with total momentum fixed
//! modulo the Brillouin-zone width.

use crate::error::{Error, Result};
use crate::lattice::{brillouin_zone, LatticeParams};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// Dispersion `omega_k`.
pub fn omega<S: Scalar>(mass: S, k: S) -> S {
    (mass * mass + k.sin() * k.sin()).sqrt()
}

/// Velocity factor `v_k`.
pub fn velocity<S: Scalar>(mass: S, k: S) -> S {
    k.sin() / (mass + omega(mass, k))
}

/// Tabulated kinematic factors over the Brillouin zone and the staggered
/// sites.
#[derive(Clone, Debug)]
pub struct KinematicTable<S: Scalar> {
    pub momenta: Vec<S>,
    pub omega: Vec<S>,
    pub v: Vec<S>,
    /// `cfac[p_index][m]`: particle amplitude at site `m`.
    pub cfac: Vec<Vec<Cplx<S>>>,
    /// `dfac[q_index][n]`: antiparticle amplitude at site `n`.
    pub dfac: Vec<Vec<Cplx<S>>>,
}

/// Build the kinematic tables. Fails when `omega` vanishes somewhere in
/// the zone (massless lattice: `m_f = 0` always contains `k = 0`).
pub fn kinematic_factors<S: Scalar>(
    mass: S,
    params: &LatticeParams<S>,
) -> Result<KinematicTable<S>> {
    let momenta = brillouin_zone(params);
    let n = params.n_stag();
    let mut omegas = Vec::with_capacity(momenta.len());
    let mut vs = Vec::with_capacity(momenta.len());
    for &k in &momenta {
        let w = omega(mass, k);
        if w <= S::zero() {
            return Err(Error::SingularKinematics { k: k.as_f64() });
        }
        omegas.push(w);
        vs.push(velocity(mass, k));
    }
    let two_pi = S::of(2.0) * S::PI();
    let mut cfac = Vec::with_capacity(momenta.len());
    let mut dfac = Vec::with_capacity(momenta.len());
    for (idx, &k) in momenta.iter().enumerate() {
        let w = omegas[idx];
        let v = vs[idx];
        let scale = ((mass + w) / (two_pi * w)).sqrt();
        let mut crow = Vec::with_capacity(n);
        let mut drow = Vec::with_capacity(n);
        for site in 0..n {
            let phase = Complex::from_polar(S::one(), k * S::of(site as f64));
            let (c_proj, d_proj) = if site % 2 == 0 {
                (S::one(), -v)
            } else {
                (v, S::one())
            };
            crow.push(phase * Complex::new(scale * c_proj, S::zero()));
            drow.push(phase * Complex::new(scale * d_proj, S::zero()));
        }
        cfac.push(crow);
        dfac.push(drow);
    }
    Ok(KinematicTable {
        momenta,
        omega: omegas,
        v: vs,
        cfac,
        dfac,
    })
}

impl<S: Scalar> KinematicTable<S> {
    pub fn n_momenta(&self) -> usize {
        self.momenta.len()
    }

    /// Index of momentum `k` in the zone (within `tol`).
    pub fn momentum_index(&self, k: S, tol: S) -> Option<usize> {
        self.momenta.iter().position(|&m| (m - k).abs() < tol)
    }
}

/// Bare meson coefficients `Cbar^k_{m,n} = sum_{p,q} [p+q = k] C(p,m)
/// D(q,n)`, for every ordered site pair. Momentum conservation is exact in
/// the integer zone labels; pairs whose total leaves the zone do not
/// contribute.
pub fn bare_coefficients<S: Scalar>(
    k_index: usize,
    table: &KinematicTable<S>,
    params: &LatticeParams<S>,
) -> Vec<Vec<Cplx<S>>> {
    let n = params.n_stag();
    let labels: Vec<i64> = crate::lattice::brillouin_indices(params.n_phys).collect();
    let k_label = labels[k_index];
    let zero = Complex::new(S::zero(), S::zero());
    let mut out = vec![vec![zero; n]; n];
    for (pi_idx, &p_label) in labels.iter().enumerate() {
        for (qi_idx, &q_label) in labels.iter().enumerate() {
            if p_label + q_label != k_label {
                continue;
            }
            for m in 0..n {
                let cpm = table.cfac[pi_idx][m];
                for site_n in 0..n {
                    out[m][site_n] += cpm * table.dfac[qi_idx][site_n];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n_phys: usize) -> LatticeParams<f64> {
        LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let pi = std::f64::consts::PI;
        assert!((omega(1.0f64, 0.0) - 1.0).abs() < 1e-15);
        assert!(velocity(1.0f64, 0.0).abs() < 1e-15);
        assert!((omega(1.0, pi / 2.0) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((velocity(1.0, pi / 2.0) - 1.0 / (1.0 + 2.0f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn omega_even_velocity_odd() {
        let p = params(5);
        let table = kinematic_factors(1.0, &p).unwrap();
        for (i, &k) in table.momenta.iter().enumerate() {
            if let Some(j) = table.momentum_index(-k, 1e-12) {
                assert!((table.omega[i] - table.omega[j]).abs() < 1e-14);
                assert!((table.v[i] + table.v[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn massless_lattice_is_singular() {
        let p = LatticeParams::new(3, 0.0, -0.3).unwrap();
        assert!(matches!(
            kinematic_factors(0.0, &p),
            Err(Error::SingularKinematics { .. })
        ));
    }

    #[test]
    fn single_site_zone_has_one_term() {
        let p = params(1);
        let table = kinematic_factors(1.0, &p).unwrap();
        assert_eq!(table.n_momenta(), 1);
        let bare = bare_coefficients(0, &table, &p);
        // Only p = q = k = 0 contributes: Cbar_{m,n} = C(0,m) D(0,n).
        for m in 0..2 {
            for n in 0..2 {
                let expect = table.cfac[0][m] * table.dfac[0][n];
                assert!((bare[m][n] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn translation_covariance() {
        // Cbar^k_{m+2,n+2} = e^{2ik} Cbar^k_{m,n} with indices mod N.
        let p = params(5);
        let table = kinematic_factors(1.0, &p).unwrap();
        let pi = std::f64::consts::PI;
        let k_index = table.momentum_index(pi / 5.0, 1e-12).unwrap();
        let bare = bare_coefficients(k_index, &table, &p);
        let n = p.n_stag();
        let phase = Cplx::from_polar(1.0, 2.0 * pi / 5.0);
        for m in 0..n {
            for site in 0..n {
                let shifted = bare[(m + 2) % n][(site + 2) % n];
                let expect = bare[m][site] * phase;
                assert!(
                    (shifted - expect).norm() < 1e-12,
                    "covariance broken at ({m},{site})"
                );
            }
        }
    }

    #[test]
    fn conjugation_pattern() {
        // Cbar^{-k}_{m,n} = (-1)^{m+n+1} conj(Cbar^k_{m,n}), from the
        // parity of the projector structure under k -> -k.
        let p = params(3);
        let table = kinematic_factors(1.0, &p).unwrap();
        let pi = std::f64::consts::PI;
        let kp = table.momentum_index(pi / 3.0, 1e-12).unwrap();
        let km = table.momentum_index(-pi / 3.0, 1e-12).unwrap();
        let plus = bare_coefficients(kp, &table, &p);
        let minus = bare_coefficients(km, &table, &p);
        let n = p.n_stag();
        for m in 0..n {
            for site in 0..n {
                let sign = if (m + site) % 2 == 0 { -1.0 } else { 1.0 };
                let expect = plus[m][site].conj() * Cplx::new(sign, 0.0);
                assert!(
                    (minus[m][site] - expect).norm() < 1e-12,
                    "conjugation broken at ({m},{site})"
                );
            }
        }
    }
}
