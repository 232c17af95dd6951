//! Order-by-order meson coefficients and wave-packet coefficient tables.
//!
//! At order `j` the creation operator keeps bare mesons up to length `j`,
//! each suppressed by `exp(-alpha_i^{(l),k} l^2)` with the variational
//! parameters split by the parity of the creation end. Per-momentum tables
//! are normalized to unit square sum; a wave-packet table is the
//! profile-weighted sum of per-momentum tables and is deliberately not
//! renormalized.

use crate::error::{Error, Result};
use crate::kinematics::{bare_coefficients, KinematicTable};
use crate::lattice::LatticeParams;
use crate::meson::periodic_distance;
use crate::profile::WavePacketProfile;
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// Variational suppression parameters `alpha_i^{(l),k}` for `1 <= l <= j`,
/// indexed by Brillouin-zone position, order, and creation-end parity.
#[derive(Clone, Debug, Default)]
pub struct AnsatzParams<S> {
    /// `alphas[k_index][l - 1] = [alpha_even, alpha_odd]` at length `l`.
    pub alphas: Vec<Vec<[S; 2]>>,
}

impl<S: Scalar> AnsatzParams<S> {
    pub fn empty(n_momenta: usize) -> Self {
        AnsatzParams {
            alphas: vec![Vec::new(); n_momenta],
        }
    }

    /// Highest order available for `k_index` (0 when only diagonals).
    pub fn order(&self, k_index: usize) -> usize {
        self.alphas.get(k_index).map_or(0, Vec::len)
    }

    pub fn get(&self, k_index: usize, length: usize, parity: usize) -> Result<S> {
        self.alphas
            .get(k_index)
            .and_then(|per_k| per_k.get(length - 1))
            .map(|pair| pair[parity])
            .ok_or(Error::MissingParameter {
                k_index,
                order: length,
            })
    }

    /// Append the next order for one momentum.
    pub fn push_order(&mut self, k_index: usize, alpha_even: S, alpha_odd: S) {
        self.alphas[k_index].push([alpha_even, alpha_odd]);
    }

    pub fn require_order(&self, k_index: usize, j: usize) -> Result<()> {
        if self.order(k_index) < j {
            Err(Error::MissingParameter { k_index, order: j })
        } else {
            Ok(())
        }
    }
}

/// Coefficient table `C_{m,n}` over ordered site pairs in the canonical
/// term order.
#[derive(Clone, Debug)]
pub struct MesonCoefficients<S: Scalar> {
    pub entries: Vec<((usize, usize), Cplx<S>)>,
    pub order: usize,
    /// Normalization constant divided out (1 for unnormalized tables).
    pub normalization: S,
}

impl<S: Scalar> MesonCoefficients<S> {
    pub fn get(&self, m: usize, n: usize) -> Option<Cplx<S>> {
        self.entries
            .iter()
            .find(|((a, b), _)| *a == m && *b == n)
            .map(|(_, c)| *c)
    }

    pub fn square_sum(&self) -> S {
        self.entries.iter().map(|(_, c)| c.norm_sqr()).sum()
    }
}

/// Canonical ordered site pairs through order `j`: diagonals by site, then
/// for each length the forward pairs by site, then the backward pairs. At
/// the half-lattice length forward and backward coincide and appear once.
pub fn canonical_pairs(j: usize, params: &LatticeParams<f64>) -> Vec<(usize, usize)> {
    canonical_pairs_n(j, params.n_stag(), params.n_phys)
}

pub fn canonical_pairs_n(j: usize, n_stag: usize, n_phys: usize) -> Vec<(usize, usize)> {
    assert!(j <= n_phys, "meson length cannot exceed half the lattice");
    let mut pairs = Vec::new();
    for m in 0..n_stag {
        pairs.push((m, m));
    }
    for length in 1..=j {
        for m in 0..n_stag {
            pairs.push((m, (m + length) % n_stag));
        }
        if length < n_phys {
            for m in 0..n_stag {
                pairs.push((m, (m + n_stag - length) % n_stag));
            }
        }
    }
    pairs
}

/// Per-momentum order-`j` coefficients: Gaussian-suppressed bare
/// coefficients over the canonical pairs, normalized to unit square sum.
pub fn order_j_coefficients<S: Scalar>(
    k_index: usize,
    j: usize,
    ap: &AnsatzParams<S>,
    table: &KinematicTable<S>,
    params: &LatticeParams<S>,
) -> Result<MesonCoefficients<S>> {
    if j > 0 {
        ap.require_order(k_index, j)?;
    }
    let bare = bare_coefficients(k_index, table, params);
    let n = params.n_stag();
    let pairs = canonical_pairs_n(j, n, params.n_phys);
    let mut entries = Vec::with_capacity(pairs.len());
    for (m, site) in pairs {
        let length = periodic_distance(m, site, n);
        let c = if length == 0 {
            bare[m][site]
        } else {
            let alpha = ap.get(k_index, length, m % 2)?;
            let damp = (-alpha * S::of((length * length) as f64)).exp();
            bare[m][site] * Complex::new(damp, S::zero())
        };
        entries.push(((m, site), c));
    }
    let norm: S = entries.iter().map(|(_, c)| c.norm_sqr()).sum::<S>().sqrt();
    for (_, c) in entries.iter_mut() {
        *c /= Complex::new(norm, S::zero());
    }
    Ok(MesonCoefficients {
        entries,
        order: j,
        normalization: norm,
    })
}

/// Wave-packet coefficients `C_{m,n} = sum_k Psi(k) C^{(j),k}_{m,n}`.
/// The per-momentum tables already carry their normalization; the sum is
/// not renormalized.
pub fn wavepacket_coefficients<S: Scalar>(
    profile: &WavePacketProfile<S>,
    j: usize,
    ap: &AnsatzParams<S>,
    table: &KinematicTable<S>,
    params: &LatticeParams<S>,
) -> Result<MesonCoefficients<S>> {
    let support_tol = S::of(1e-12);
    let pairs = canonical_pairs_n(j, params.n_stag(), params.n_phys);
    let zero = Complex::new(S::zero(), S::zero());
    let mut acc = vec![zero; pairs.len()];
    for (k_index, weight) in profile.values.iter().enumerate() {
        if weight.norm() <= support_tol {
            continue;
        }
        if j > 0 && ap.order(k_index) < j {
            return Err(Error::CoverageGap { k_index });
        }
        let per_k = order_j_coefficients(k_index, j, ap, table, params)?;
        for (slot, (_, c)) in per_k.entries.iter().enumerate() {
            acc[slot] += *weight * *c;
        }
    }
    Ok(MesonCoefficients {
        entries: pairs.into_iter().zip(acc).collect(),
        order: j,
        normalization: S::one(),
    })
}
