//! Weighted sums of multi-qubit Pauli strings.
//!
//! Strings are stored in the symplectic mask representation: a word is
//! `i^{|x&z|} X^x Z^z`, so bit `i` of `(x, z)` encodes the letter on qubit
//! `i` as `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`, `(0,1) = Z`. Every
//! canonical word is Hermitian; a sum is Hermitian exactly when its
//! coefficients survive conjugation term by term.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    fn bits(self) -> (u64, u64) {
        match self {
            PauliOp::I => (0, 0),
            PauliOp::X => (1, 0),
            PauliOp::Y => (1, 1),
            PauliOp::Z => (0, 1),
        }
    }

    fn from_bits(x: u64, z: u64) -> Self {
        match (x, z) {
            (0, 0) => PauliOp::I,
            (1, 0) => PauliOp::X,
            (1, 1) => PauliOp::Y,
            _ => PauliOp::Z,
        }
    }
}

/// A Pauli word over at most 64 qubits, in symplectic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    /// Word with a single non-identity letter.
    pub fn single(qubit: usize, op: PauliOp) -> Self {
        let (x, z) = op.bits();
        PauliString {
            x: x << qubit,
            z: z << qubit,
        }
    }

    /// Letter on `qubit`.
    pub fn letter(&self, qubit: usize) -> PauliOp {
        PauliOp::from_bits((self.x >> qubit) & 1, (self.z >> qubit) & 1)
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Weight of the word (number of non-identity letters).
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Apply to a computational basis state `bits`; returns the image basis
    /// state and the accumulated phase, one of `{1, i, -1, -i}`.
    ///
    /// The string acts as `i^{|x&z|} (-1)^{|z & bits|} |bits ^ x>`.
    pub fn apply_to_basis<S: Scalar>(&self, bits: u64) -> (u64, Cplx<S>) {
        let quarter_turns = (self.x & self.z).count_ones() + 2 * (self.z & bits).count_ones();
        (bits ^ self.x, phase_i_pow(quarter_turns))
    }

    /// Product with phase: `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> (PauliString, Cplx<f64>) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{c1 + c2 - c3} * (-1)^{|z1 & x2|}
        let c1 = (self.x & self.z).count_ones() as i32;
        let c2 = (other.x & other.z).count_ones() as i32;
        let c3 = (x & z).count_ones() as i32;
        let swaps = (self.z & other.x).count_ones() as i32;
        let quarter_turns = (c1 + c2 - c3 + 2 * swaps).rem_euclid(4) as u32;
        (PauliString { x, z }, phase_i_pow(quarter_turns))
    }

    /// True when the two words commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }
}

fn phase_i_pow<S: Scalar>(quarter_turns: u32) -> Cplx<S> {
    match quarter_turns % 4 {
        0 => Complex::new(S::one(), S::zero()),
        1 => Complex::new(S::zero(), S::one()),
        2 => Complex::new(-S::one(), S::zero()),
        _ => Complex::new(S::zero(), -S::one()),
    }
}

/// One weighted term of a [`PauliSum`].
#[derive(Clone, Copy, Debug)]
pub struct PauliTerm<S: Scalar> {
    pub coeff: Cplx<S>,
    pub string: PauliString,
}

/// Weighted sum of Pauli words over a fixed register width.
#[derive(Clone, Debug)]
pub struct PauliSum<S: Scalar> {
    n_qubits: usize,
    terms: Vec<PauliTerm<S>>,
}

impl<S: Scalar> PauliSum<S> {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(
            n_qubits <= 64,
            "mask representation holds at most 64 qubits"
        );
        PauliSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: Cplx<S>) -> Self {
        let mut sum = Self::zero(n_qubits);
        sum.push(coeff, PauliString::IDENTITY);
        sum
    }

    /// Sum holding a single one-letter term.
    pub fn single(n_qubits: usize, qubit: usize, op: PauliOp, coeff: Cplx<S>) -> Self {
        assert!(qubit < n_qubits);
        let mut sum = Self::zero(n_qubits);
        sum.push(coeff, PauliString::single(qubit, op));
        sum
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coeff: Cplx<S>, string: PauliString) {
        debug_assert_eq!(
            string.support() >> self.n_qubits,
            0,
            "word exceeds register"
        );
        self.terms.push(PauliTerm { coeff, string });
    }

    pub fn add_assign(&mut self, other: &PauliSum<S>) {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.terms.extend_from_slice(&other.terms);
    }

    pub fn add(&self, other: &PauliSum<S>) -> PauliSum<S> {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scaled(&self, factor: Cplx<S>) -> PauliSum<S> {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= factor;
        }
        out
    }

    /// Term-by-term conjugate; canonical words are Hermitian, so the adjoint
    /// only conjugates coefficients.
    pub fn adjoint(&self) -> PauliSum<S> {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = t.coeff.conj();
        }
        out
    }

    /// Operator product, expanded term by term.
    pub fn mul(&self, other: &PauliSum<S>) -> PauliSum<S> {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut out = PauliSum::zero(self.n_qubits);
        out.terms.reserve(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let (string, ph) = a.string.mul(&b.string);
                let phase = Complex::new(S::of(ph.re), S::of(ph.im));
                out.push(a.coeff * b.coeff * phase, string);
            }
        }
        out.canonicalize();
        out
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &PauliSum<S>) -> PauliSum<S> {
        let mut ab = self.mul(other);
        let ba = other.mul(self);
        ab.add_assign(&ba.scaled(Complex::new(-S::one(), S::zero())));
        ab.canonicalize();
        ab
    }

    /// Sort words, merge duplicates, and drop negligible coefficients.
    pub fn canonicalize(&mut self) {
        self.canonicalize_with(S::of(1e-12));
    }

    pub fn canonicalize_with(&mut self, tol: S) {
        self.terms.sort_by_key(|t| t.string);
        let mut merged: Vec<PauliTerm<S>> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged.last_mut() {
                Some(last) if last.string == t.string => last.coeff += t.coeff,
                _ => merged.push(*t),
            }
        }
        merged.retain(|t| t.coeff.norm_sqr() > tol * tol);
        self.terms = merged;
    }

    /// Largest coefficient magnitude after canonicalizing `self - self†`.
    pub fn hermiticity_defect(&self) -> S {
        let mut diff = self.clone();
        diff.add_assign(&self.adjoint().scaled(Complex::new(-S::one(), S::zero())));
        diff.canonicalize_with(S::zero());
        diff.terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(S::zero(), S::max)
    }

    pub fn is_hermitian(&self, tol: S) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn require_hermitian(&self, tol: S) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect <= tol {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                defect: defect.as_f64(),
            })
        }
    }

    /// Dense matrix in the full computational basis, column-major action:
    /// `m[row][col]`. Intended for small oracle checks only.
    pub fn dense_matrix(&self) -> Vec<Vec<Cplx<S>>> {
        let dim = 1usize << self.n_qubits;
        assert!(
            self.n_qubits <= 14,
            "dense matrix oracle limited to 14 qubits"
        );
        let mut m = vec![vec![Complex::new(S::zero(), S::zero()); dim]; dim];
        for t in &self.terms {
            for col in 0..dim {
                let (row, phase) = t.string.apply_to_basis::<S>(col as u64);
                m[row as usize][col] += t.coeff * phase;
            }
        }
        m
    }

    /// Apply to a dense full-space vector.
    pub fn apply_dense(&self, v: &[Cplx<S>]) -> Vec<Cplx<S>> {
        let dim = 1usize << self.n_qubits;
        assert_eq!(v.len(), dim);
        let mut out = vec![Complex::new(S::zero(), S::zero()); dim];
        for t in &self.terms {
            for col in 0..dim {
                let (row, phase) = t.string.apply_to_basis::<S>(col as u64);
                out[row as usize] += t.coeff * phase * v[col];
            }
        }
        out
    }
}

/// `sigma^- = |1><0|` on one qubit, as `(X - iY)/2`.
pub fn sigma_minus<S: Scalar>(n_qubits: usize, qubit: usize) -> PauliSum<S> {
    let half = Complex::new(S::of(0.5), S::zero());
    let mhalf_i = Complex::new(S::zero(), -S::of(0.5));
    let mut sum = PauliSum::zero(n_qubits);
    sum.push(half, PauliString::single(qubit, PauliOp::X));
    sum.push(mhalf_i, PauliString::single(qubit, PauliOp::Y));
    sum
}

/// `sigma^+ = |0><1|` on one qubit, as `(X + iY)/2`.
pub fn sigma_plus<S: Scalar>(n_qubits: usize, qubit: usize) -> PauliSum<S> {
    let half = Complex::new(S::of(0.5), S::zero());
    let half_i = Complex::new(S::zero(), S::of(0.5));
    let mut sum = PauliSum::zero(n_qubits);
    sum.push(half, PauliString::single(qubit, PauliOp::X));
    sum.push(half_i, PauliString::single(qubit, PauliOp::Y));
    sum
}

/// Occupation-number projector `|1><1| = (1 - Z)/2` on one qubit.
pub fn number_operator<S: Scalar>(n_qubits: usize, qubit: usize) -> PauliSum<S> {
    let half = Complex::new(S::of(0.5), S::zero());
    let mut sum = PauliSum::identity(n_qubits, half);
    sum.push(-half, PauliString::single(qubit, PauliOp::Z));
    sum
}
