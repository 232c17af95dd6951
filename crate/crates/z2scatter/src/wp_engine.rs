//! Fast sector-level wave-packet preparation.
//!
//! Every term circuit in the wave-packet builder implements
//! `exp(-i theta Theta_term)` exactly (verified against dense
//! exponentials), and each `Theta_term` preserves the fermion number. The
//! same product of exponentials can therefore be evaluated directly on
//! `sector (x) ancilla` vectors, where each term exponential acts in closed
//! form on a precomputed list of coupled index pairs. This is the engine
//! behind the variational optimization objective, where full statevector
//! runs would dominate the runtime.

use crate::coeffs::MesonCoefficients;
use crate::error::Result;
use crate::lattice::LatticeParams;
use crate::meson::meson_route_operators;
use crate::scalar::{Cplx, Scalar};
use crate::sector::SectorBasis;
use num_complex::Complex;

/// `Theta_term` compiled to coupled pairs on the `sector (x) {0,1}` space:
/// `Theta |u> = c_u |w>`, `Theta |w> = conj(c_u) |u>`.
#[derive(Clone, Debug)]
struct PairTerm<S: Scalar> {
    /// (index of `u` = sector state with ancilla 0, index of `w` = sector
    /// state with ancilla 1, coupling) — indices into the doubled space.
    pairs: Vec<(u32, u32, Cplx<S>)>,
}

/// Product-formula engine for `exp(-i (pi/2) Theta_Psi)` on the doubled
/// sector space.
#[derive(Clone, Debug)]
pub struct WavePacketEngine<S: Scalar> {
    dim: usize,
    terms: Vec<PairTerm<S>>,
    steps: usize,
}

impl<S: Scalar> WavePacketEngine<S> {
    /// Compile the coefficient table. The doubled space stacks
    /// `[ancilla=0 sector | ancilla=1 sector]`.
    pub fn new(
        coeffs: &MesonCoefficients<S>,
        steps: usize,
        params: &LatticeParams<S>,
        basis: &SectorBasis,
    ) -> Result<Self> {
        assert!(steps >= 1);
        let dim = basis.len();
        let mut terms = Vec::with_capacity(coeffs.entries.len());
        for ((m, n), c) in &coeffs.entries {
            if c.norm_sqr() == S::zero() {
                continue;
            }
            // One exponential per string route, exactly mirroring the
            // circuit's term split.
            for route in meson_route_operators(*m, *n, params)? {
                let mut pairs = Vec::new();
                for (col, &bits) in basis.states().iter().enumerate() {
                    // Accumulate route|col> across the route's Pauli terms;
                    // routes act monomially, so at most one image survives.
                    let mut images: Vec<(usize, Cplx<S>)> = Vec::new();
                    for t in route.terms() {
                        let (image, phase) = t.string.apply_to_basis::<S>(bits);
                        if let Some(row) = basis.position(image) {
                            let amp = t.coeff * phase;
                            match images.iter_mut().find(|(r, _)| *r == row) {
                                Some((_, acc)) => *acc += amp,
                                None => images.push((row, amp)),
                            }
                        }
                    }
                    images.retain(|(_, amp)| amp.norm() > S::of(1e-14));
                    debug_assert!(images.len() <= 1, "route is not monomial");
                    for (row, amp) in images {
                        pairs.push((col as u32, row as u32, amp * *c));
                    }
                }
                terms.push(PairTerm { pairs });
            }
        }
        Ok(WavePacketEngine { dim, terms, steps })
    }

    pub fn doubled_dim(&self) -> usize {
        2 * self.dim
    }

    /// Apply `exp(-i theta Theta_term)` in place.
    ///
    /// For a single coupled pair the exponential closes over the pair. The
    /// diagonal (`m = n`) terms couple each state to itself with a complex
    /// weight; meson terms are one-to-one on the sector, so pairs do not
    /// interfere within a term.
    fn apply_term(&self, term: &PairTerm<S>, theta: S, v: &mut [Cplx<S>]) {
        let dim = self.dim;
        for &(u, w, c) in &term.pairs {
            let (u, w) = (u as usize, w as usize);
            let r = c.norm();
            if r == S::zero() {
                continue;
            }
            let phase = c / Complex::new(r, S::zero());
            let (s, co) = (theta * r).sin_cos();
            let a0 = v[u];
            let a1 = v[dim + w];
            let mi_s = Complex::new(S::zero(), -s);
            v[u] = a0 * Complex::new(co, S::zero()) + mi_s * phase.conj() * a1;
            v[dim + w] = a1 * Complex::new(co, S::zero()) + mi_s * phase * a0;
        }
    }

    /// Apply the full second-order product formula for the `pi/2` rotation
    /// to a doubled-space vector.
    pub fn apply(&self, v: &mut [Cplx<S>]) {
        assert_eq!(v.len(), 2 * self.dim);
        let theta = S::PI() / (S::of(4.0) * S::of(self.steps as f64));
        for _ in 0..self.steps {
            for term in &self.terms {
                self.apply_term(term, theta, v);
            }
            for term in self.terms.iter().rev() {
                self.apply_term(term, theta, v);
            }
        }
    }

    /// Prepare from a sector vector with the ancilla cleared; returns the
    /// doubled-space result.
    pub fn prepare(&self, vacuum: &[Cplx<S>]) -> Vec<Cplx<S>> {
        assert_eq!(vacuum.len(), self.dim);
        let mut v = vec![Complex::new(S::zero(), S::zero()); 2 * self.dim];
        v[..self.dim].copy_from_slice(vacuum);
        self.apply(&mut v);
        v
    }

    /// Split a doubled-space vector into the (unnormalized) ancilla-0 and
    /// ancilla-1 sector branches.
    pub fn split(&self, v: &[Cplx<S>]) -> (Vec<Cplx<S>>, Vec<Cplx<S>>) {
        (v[..self.dim].to_vec(), v[self.dim..].to_vec())
    }
}
