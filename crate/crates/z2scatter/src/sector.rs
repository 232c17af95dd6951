//! The symmetry-restricted Hilbert space with fermion number `Q = N_P`.
//!
//! Circuits act on the full register; exact diagonalization works in this
//! sector basis. The embedding/projection pair converts between the two,
//! since noisy circuits can leak out of the sector.

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::linalg::Mat;
use crate::pauli::PauliSum;
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;
use std::collections::HashMap;

/// Ordered basis of the `Q = N_P` sector: every fermion word of Hamming
/// weight `N_P` paired with both boson-qubit values.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_stag: usize,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl SectorBasis {
    pub fn new<S: Scalar>(params: &LatticeParams<S>) -> Self {
        let n = params.n_stag();
        let n_p = params.n_phys;
        let mut states = Vec::new();
        for mask in 0u64..(1 << n) {
            if mask.count_ones() as usize == n_p {
                states.push(mask);
                states.push(mask | (1 << n));
            }
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SectorBasis {
            n_stag: n,
            states,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Full-register bit pattern of basis state `i` (boson bit at `n_stag`).
    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn position(&self, bits: u64) -> Option<usize> {
        self.index.get(&bits).copied()
    }

    pub fn n_stag(&self) -> usize {
        self.n_stag
    }

    /// Number of qubits the sector states live on.
    pub fn n_qubits(&self) -> usize {
        self.n_stag + 1
    }
}

/// A `PauliSum` compiled to its action on sector vectors: for each term a
/// permutation-with-phase over basis indices.
#[derive(Clone, Debug)]
pub struct SectorOp<S: Scalar> {
    dim: usize,
    /// (source index, target index, amplitude) triplets.
    entries: Vec<(u32, u32, Cplx<S>)>,
}

impl<S: Scalar> SectorOp<S> {
    /// Compile `op` onto the sector. Individual Pauli words may leave the
    /// sector as long as their contributions cancel in the sum (the XX and
    /// YY halves of a hopping term do); any net amplitude outside the
    /// sector is an error.
    pub fn new(op: &PauliSum<S>, basis: &SectorBasis) -> Result<Self> {
        assert_eq!(op.n_qubits(), basis.n_qubits());
        let tol = S::of(1e-12);
        let scale = op
            .terms()
            .iter()
            .map(|t| t.coeff.norm())
            .fold(S::one(), S::max);
        let mut entries = Vec::new();
        let mut images: HashMap<u64, Cplx<S>> = HashMap::new();
        for (col, &bits) in basis.states().iter().enumerate() {
            images.clear();
            for term in op.terms() {
                let (image, phase) = term.string.apply_to_basis::<S>(bits);
                *images
                    .entry(image)
                    .or_insert(Complex::new(S::zero(), S::zero())) += term.coeff * phase;
            }
            for (&image, &amp) in images.iter() {
                if amp.norm() <= tol * scale {
                    continue;
                }
                match basis.position(image) {
                    Some(row) => entries.push((col as u32, row as u32, amp)),
                    None => {
                        return Err(Error::GaugeMismatch(format!(
                            "operator leaves the charge sector: {bits:b} -> {image:b}"
                        )))
                    }
                }
            }
        }
        entries.sort_by_key(|&(col, row, _)| (col, row));
        Ok(SectorOp {
            dim: basis.len(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[Cplx<S>]) -> Vec<Cplx<S>> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex::new(S::zero(), S::zero()); self.dim];
        for &(col, row, amp) in &self.entries {
            out[row as usize] += amp * v[col as usize];
        }
        out
    }

    pub fn apply_real(&self, v: &[S]) -> Vec<S> {
        let cv: Vec<Cplx<S>> = v.iter().map(|&x| Complex::new(x, S::zero())).collect();
        self.apply(&cv).iter().map(|z| z.re).collect()
    }

    /// Expectation value `<v|Op|v>`.
    pub fn expectation(&self, v: &[Cplx<S>]) -> Cplx<S> {
        let hv = self.apply(v);
        v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Dense matrix of the compiled operator.
    pub fn dense(&self) -> Vec<Vec<Cplx<S>>> {
        let mut m = vec![vec![Complex::new(S::zero(), S::zero()); self.dim]; self.dim];
        for &(col, row, amp) in &self.entries {
            m[row as usize][col as usize] += amp;
        }
        m
    }

    /// Real symmetric dense matrix; errors if any element has an imaginary
    /// residue above `tol`.
    pub fn dense_real(&self, tol: S) -> Result<Mat<S>> {
        let mut m = Mat::zeros(self.dim);
        let mut max_im = S::zero();
        for &(col, row, amp) in &self.entries {
            max_im = max_im.max(amp.im.abs());
            *m.at_mut(row as usize, col as usize) += amp.re;
        }
        if max_im > tol {
            return Err(Error::NotHermitian {
                defect: max_im.as_f64(),
            });
        }
        Ok(m)
    }
}

/// Embed a sector vector into the full register of `n_qubits` qubits, with
/// every qubit outside the system register set to `|0>`.
pub fn embed<S: Scalar>(v: &[Cplx<S>], basis: &SectorBasis, n_qubits: usize) -> Vec<Cplx<S>> {
    assert!(n_qubits >= basis.n_qubits());
    assert_eq!(v.len(), basis.len());
    let mut full = vec![Complex::new(S::zero(), S::zero()); 1 << n_qubits];
    for (i, &bits) in basis.states().iter().enumerate() {
        full[bits as usize] = v[i];
    }
    full
}

/// Project a full-register state onto the sector with the given fixed
/// assignment of qubits above the system register. Returns the
/// (unnormalized) sector vector and the squared norm captured.
pub fn project<S: Scalar>(
    full: &[Cplx<S>],
    basis: &SectorBasis,
    n_qubits: usize,
    upper_bits: u64,
) -> (Vec<Cplx<S>>, S) {
    assert_eq!(full.len(), 1 << n_qubits);
    let shift = basis.n_qubits();
    let mut v = vec![Complex::new(S::zero(), S::zero()); basis.len()];
    let mut captured = S::zero();
    for (i, &bits) in basis.states().iter().enumerate() {
        let idx = (bits | (upper_bits << shift)) as usize;
        v[i] = full[idx];
        captured += full[idx].norm_sqr();
    }
    (v, captured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_hamiltonian;
    use crate::lattice::scv_state;

    fn params(n_phys: usize) -> LatticeParams<f64> {
        LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
    }

    #[test]
    fn sector_dimension() {
        // 2 * C(2 N_P, N_P)
        assert_eq!(SectorBasis::new(&params(2)).len(), 12);
        assert_eq!(SectorBasis::new(&params(3)).len(), 40);
        assert_eq!(SectorBasis::new(&params(5)).len(), 504);
    }

    #[test]
    fn hamiltonian_closes_on_sector() {
        for n_phys in [2, 3] {
            let p = params(n_phys);
            let basis = SectorBasis::new(&p);
            let h = build_hamiltonian(&p);
            assert!(SectorOp::new(&h, &basis).is_ok());
        }
    }

    #[test]
    fn sector_matrix_matches_full_space_action() {
        // Independent route: apply the PauliSum to embedded basis vectors in
        // the full space and project back.
        let p = params(2);
        let basis = SectorBasis::new(&p);
        let h = build_hamiltonian(&p);
        let op = SectorOp::new(&h, &basis).unwrap();
        let m = op.dense();
        let nq = p.n_system_qubits();
        for col in 0..basis.len() {
            let mut v = vec![Cplx::new(0.0, 0.0); basis.len()];
            v[col] = Cplx::new(1.0, 0.0);
            let full = embed(&v, &basis, nq);
            let hv = h.apply_dense(&full);
            let (back, _) = project(&hv, &basis, nq, 0);
            for row in 0..basis.len() {
                assert!((m[row][col] - back[row]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn scv_is_a_sector_state() {
        let p = params(5);
        let basis = SectorBasis::new(&p);
        assert!(basis.position(scv_state(&p)).is_some());
    }
}
