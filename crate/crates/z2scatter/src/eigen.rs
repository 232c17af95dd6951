//! Exact-diagonalization oracle: low-lying spectra, exact time evolution,
//! and state fidelities on the charge sector.
//!
//! Dense Householder/QL is used up to [`DENSE_LIMIT`]; above that a
//! restarted Lanczos finds the lowest states, and `exp(-itH)v` switches to
//! a Krylov propagator. Dimensions above [`HARD_LIMIT`] are refused.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, krylov_evolve, lanczos_lowest, sym_eigen, CMat};
use crate::pauli::PauliSum;
use crate::scalar::{Cplx, Scalar};
use crate::sector::{SectorBasis, SectorOp};
use num_complex::Complex;

/// Largest sector dimension solved densely.
pub const DENSE_LIMIT: usize = 4096;
/// Largest sector dimension accepted at all.
pub const HARD_LIMIT: usize = 200_000;

/// Eigenpairs of a sector Hamiltonian, ascending in energy.
#[derive(Clone, Debug)]
pub struct EigenSolution<S: Scalar> {
    pub energies: Vec<S>,
    /// Sector-basis eigenvectors matching `energies`.
    pub states: Vec<Vec<Cplx<S>>>,
    /// Per-state momentum assignment, filled in by momentum labeling.
    pub momentum_labels: Option<Vec<S>>,
}

impl<S: Scalar> EigenSolution<S> {
    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    /// Index of the lowest state labeled with momentum `k` (within `tol`).
    pub fn find_momentum(&self, k: S, tol: S) -> Option<usize> {
        let labels = self.momentum_labels.as_ref()?;
        (0..self.n_states()).find(|&i| (labels[i] - k).abs() < tol)
    }
}

/// Lowest `n_states` eigenpairs of a Hermitian `PauliSum` on the sector.
///
/// Residuals are verified to `1e-10` scaled by the spectral magnitude;
/// degenerate groups come out in a deterministic order (eigenvector phase
/// canonicalized, then lexicographic).
pub fn diagonalize<S: Scalar>(
    h: &PauliSum<S>,
    basis: &SectorBasis,
    n_states: usize,
) -> Result<EigenSolution<S>> {
    let dim = basis.len();
    if dim > HARD_LIMIT {
        return Err(Error::DimensionExceeded {
            dim,
            limit: HARD_LIMIT,
        });
    }
    h.require_hermitian(S::tol(1e-10))?;
    let op = SectorOp::new(h, basis)?;
    let n_take = n_states.min(dim);

    let (energies, states) = if dim <= DENSE_LIMIT {
        dense_eigen(&op, dim, n_take)?
    } else {
        let matvec = |v: &[S]| op.apply_real(v);
        let (vals, vecs) = lanczos_lowest(dim, n_take, matvec, S::of(1e-10));
        let states = vecs
            .into_iter()
            .map(|v| v.into_iter().map(|x| Complex::new(x, S::zero())).collect())
            .collect();
        (vals, states)
    };

    let mut solution = EigenSolution {
        energies,
        states,
        momentum_labels: None,
    };
    canonicalize_degenerate(&mut solution);
    verify_residuals(&op, &solution)?;
    Ok(solution)
}

fn dense_eigen<S: Scalar>(
    op: &SectorOp<S>,
    dim: usize,
    n_take: usize,
) -> Result<(Vec<S>, Vec<Vec<Cplx<S>>>)> {
    match op.dense_real(S::tol(1e-12)) {
        Ok(mat) => {
            let (evals, evecs) = sym_eigen(&mat);
            let states = (0..n_take)
                .map(|j| {
                    evecs
                        .column(j)
                        .into_iter()
                        .map(|x| Complex::new(x, S::zero()))
                        .collect()
                })
                .collect();
            Ok((evals[..n_take].to_vec(), states))
        }
        Err(_) => {
            // Complex Hermitian fallback for operators with Y-odd terms.
            if dim > 512 {
                return Err(Error::DimensionExceeded { dim, limit: 512 });
            }
            let dense = op.dense();
            let mut cm = CMat::zeros(dim);
            for r in 0..dim {
                for c in 0..dim {
                    *cm.at_mut(r, c) = dense[r][c];
                }
            }
            let (evals, evecs) = hermitian_eigen(&cm);
            let states = (0..n_take).map(|j| evecs.column(j)).collect();
            Ok((evals[..n_take].to_vec(), states))
        }
    }
}

/// Fix the global phase of each state (largest component real positive) and
/// sort exactly degenerate groups lexicographically, for reproducible
/// output.
fn canonicalize_degenerate<S: Scalar>(solution: &mut EigenSolution<S>) {
    for state in &mut solution.states {
        canonical_phase(state);
    }
    let n = solution.n_states();
    let mut order: Vec<usize> = (0..n).collect();
    let energies = solution.energies.clone();
    let states = solution.states.clone();
    let scale = energies.iter().map(|e| e.abs()).fold(S::one(), S::max);
    let tol = S::of(1e-9) * scale;
    order.sort_by(|&i, &j| {
        if (energies[i] - energies[j]).abs() > tol {
            return energies[i].partial_cmp(&energies[j]).unwrap();
        }
        for (a, b) in states[i].iter().zip(&states[j]) {
            let (ra, rb) = (a.re, b.re);
            if (ra - rb).abs() > S::of(1e-9) {
                return ra.partial_cmp(&rb).unwrap();
            }
        }
        std::cmp::Ordering::Equal
    });
    solution.energies = order.iter().map(|&i| energies[i]).collect();
    solution.states = order.iter().map(|&i| states[i].clone()).collect();
}

pub(crate) fn canonical_phase<S: Scalar>(state: &mut [Cplx<S>]) {
    let mut best = 0usize;
    let mut best_mag = S::zero();
    for (i, z) in state.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag + S::of(1e-15) {
            best_mag = m;
            best = i;
        }
    }
    if best_mag == S::zero() {
        return;
    }
    let phase = state[best] / Complex::new(state[best].norm(), S::zero());
    for z in state.iter_mut() {
        *z /= phase;
    }
}

fn verify_residuals<S: Scalar>(op: &SectorOp<S>, solution: &EigenSolution<S>) -> Result<()> {
    let scale = solution
        .energies
        .iter()
        .map(|e| e.abs())
        .fold(S::one(), S::max);
    for (e, v) in solution.energies.iter().zip(&solution.states) {
        let hv = op.apply(v);
        let mut res = S::zero();
        for (a, b) in hv.iter().zip(v) {
            res += (a - b * Complex::new(*e, S::zero())).norm_sqr();
        }
        if res.sqrt() > S::tol(1e-10) * scale {
            return Err(Error::GaugeMismatch(format!(
                "eigenpair residual {:e} exceeds tolerance",
                res.sqrt().as_f64()
            )));
        }
    }
    Ok(())
}

/// `exp(-itH) v` on the sector. Dense eigendecomposition below
/// [`DENSE_LIMIT`], Krylov above. Norm preserved to 1e-12.
pub fn exact_evolve<S: Scalar>(
    h: &PauliSum<S>,
    basis: &SectorBasis,
    v: &[Cplx<S>],
    t: S,
) -> Result<Vec<Cplx<S>>> {
    let dim = basis.len();
    if dim > HARD_LIMIT {
        return Err(Error::DimensionExceeded {
            dim,
            limit: HARD_LIMIT,
        });
    }
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: dim,
        });
    }
    let op = SectorOp::new(h, basis)?;
    if dim <= DENSE_LIMIT {
        let mat = op.dense_real(S::tol(1e-12))?;
        let (evals, evecs) = sym_eigen(&mat);
        // y = V^T v; out = V diag(e^{-i t E}) y
        let mut out = vec![Complex::new(S::zero(), S::zero()); dim];
        for j in 0..dim {
            let col = evecs.column(j);
            let mut amp = Complex::new(S::zero(), S::zero());
            for (c, vi) in col.iter().zip(v) {
                amp += vi * Complex::new(*c, S::zero());
            }
            let phase = Complex::from_polar(S::one(), -t * evals[j]);
            let w = amp * phase;
            for (oi, c) in out.iter_mut().zip(&col) {
                *oi += w * Complex::new(*c, S::zero());
            }
        }
        Ok(out)
    } else {
        Ok(krylov_evolve(dim, v, t, |x| op.apply(x), S::of(1e-11)))
    }
}

/// Reusable dense propagator for repeated `exp(-itH)` applications with the
/// same Hamiltonian.
pub struct Propagator<S: Scalar> {
    evals: Vec<S>,
    evecs: Vec<Vec<S>>,
}

impl<S: Scalar> Propagator<S> {
    pub fn new(h: &PauliSum<S>, basis: &SectorBasis) -> Result<Self> {
        let dim = basis.len();
        if dim > DENSE_LIMIT {
            return Err(Error::DimensionExceeded {
                dim,
                limit: DENSE_LIMIT,
            });
        }
        let op = SectorOp::new(h, basis)?;
        let mat = op.dense_real(S::tol(1e-12))?;
        let (evals, mat_v) = sym_eigen(&mat);
        let evecs = (0..dim).map(|j| mat_v.column(j)).collect();
        Ok(Propagator { evals, evecs })
    }

    pub fn evolve(&self, v: &[Cplx<S>], t: S) -> Vec<Cplx<S>> {
        let dim = self.evals.len();
        assert_eq!(v.len(), dim);
        let mut out = vec![Complex::new(S::zero(), S::zero()); dim];
        for (e, col) in self.evals.iter().zip(&self.evecs) {
            let mut amp = Complex::new(S::zero(), S::zero());
            for (c, vi) in col.iter().zip(v) {
                amp += vi * Complex::new(*c, S::zero());
            }
            let w = amp * Complex::from_polar(S::one(), -t * *e);
            for (oi, c) in out.iter_mut().zip(col) {
                *oi += w * Complex::new(*c, S::zero());
            }
        }
        out
    }
}

/// Squared overlap `|<a|b>|^2` of two normalized states.
pub fn fidelity<S: Scalar>(a: &[Cplx<S>], b: &[Cplx<S>]) -> Result<S> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut ov = Complex::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b) {
        ov += x.conj() * y;
    }
    Ok(ov.norm_sqr())
}

/// Overlap `<a|b>`.
pub fn overlap<S: Scalar>(a: &[Cplx<S>], b: &[Cplx<S>]) -> Cplx<S> {
    let mut ov = Complex::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b) {
        ov += x.conj() * y;
    }
    ov
}

/// L2 norm of a complex vector.
pub fn norm<S: Scalar>(v: &[Cplx<S>]) -> S {
    v.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
}

/// Normalize in place; returns the original norm.
pub fn normalize<S: Scalar>(v: &mut [Cplx<S>]) -> S {
    let n = norm(v);
    if n > S::zero() {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, build_hamiltonian_scaled};
    use crate::lattice::{scv_state, LatticeParams};
    use crate::linalg::CMat;

    fn params(n_phys: usize) -> LatticeParams<f64> {
        LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
    }

    #[test]
    fn ground_energy_np2_matches_jacobi_oracle() {
        // Independent dense brute-force over the 12-dim sector using the
        // complex Jacobi solver.
        let p = params(2);
        let basis = SectorBasis::new(&p);
        let h = build_hamiltonian(&p);
        let op = SectorOp::new(&h, &basis).unwrap();
        let dense = op.dense();
        let mut cm = CMat::zeros(basis.len());
        for r in 0..basis.len() {
            for c in 0..basis.len() {
                *cm.at_mut(r, c) = dense[r][c];
            }
        }
        let (oracle_vals, _) = hermitian_eigen(&cm);
        let sol = diagonalize(&h, &basis, 4).unwrap();
        for j in 0..4 {
            assert!((sol.energies[j] - oracle_vals[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_limit_ground_state_is_scv() {
        let p = LatticeParams::new(2, 1.0, 0.0).unwrap();
        let h = build_hamiltonian_scaled(&p, 0.0);
        let basis = SectorBasis::new(&p);
        let sol = diagonalize(&h, &basis, 1).unwrap();
        let n = p.n_stag() as f64;
        assert!((sol.energies[0] + n * 0.5).abs() < 1e-12);
        let scv_idx = basis.position(scv_state(&p)).unwrap();
        assert!((sol.states[0][scv_idx].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolve_identity_and_eigenphase() {
        let p = params(2);
        let basis = SectorBasis::new(&p);
        let h = build_hamiltonian(&p);
        let sol = diagonalize(&h, &basis, 2).unwrap();

        let v0 = sol.states[0].clone();
        let same = exact_evolve(&h, &basis, &v0, 0.0).unwrap();
        for (a, b) in same.iter().zip(&v0) {
            assert!((a - b).norm() < 1e-12);
        }

        let t = 0.7;
        let evolved = exact_evolve(&h, &basis, &v0, t).unwrap();
        let phase = Cplx::from_polar(1.0, -t * sol.energies[0]);
        for (a, b) in evolved.iter().zip(&v0) {
            assert!((a - b * phase).norm() < 1e-11);
        }
        assert!((norm(&evolved) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_matches_taylor_series_oracle() {
        // Order-4 Taylor expansion with step halving as an independent
        // propagator.
        let p = params(2);
        let basis = SectorBasis::new(&p);
        let h = build_hamiltonian(&p);
        let op = SectorOp::new(&h, &basis).unwrap();
        let dim = basis.len();
        let mut v: Vec<Cplx<f64>> = (0..dim)
            .map(|i| Cplx::new((0.3 * i as f64).cos(), (0.17 * i as f64).sin()))
            .collect();
        normalize(&mut v);

        let taylor_step = |v: &[Cplx<f64>], dt: f64| -> Vec<Cplx<f64>> {
            let mut acc = v.to_vec();
            let mut power = v.to_vec();
            let mut coeff = Cplx::new(1.0, 0.0);
            for k in 1..=4 {
                power = op.apply(&power);
                coeff *= Cplx::new(0.0, -dt) / Cplx::new(k as f64, 0.0);
                for (a, t) in acc.iter_mut().zip(&power) {
                    *a += coeff * t;
                }
            }
            acc
        };

        let t = 1.0;
        let steps = 2048;
        let dt = t / steps as f64;
        let mut taylor = v.clone();
        for _ in 0..steps {
            taylor = taylor_step(&taylor, dt);
        }
        let exact = exact_evolve(&h, &basis, &v, t).unwrap();
        let mut diff = 0.0;
        for (a, b) in exact.iter().zip(&taylor) {
            diff += (a - b).norm_sqr();
        }
        assert!(diff.sqrt() < 1e-8, "taylor mismatch {:e}", diff.sqrt());
    }

    #[test]
    fn fidelity_basics() {
        let a: Vec<Cplx<f64>> = vec![Cplx::new(1.0, 0.0), Cplx::new(0.0, 0.0)];
        let b: Vec<Cplx<f64>> = vec![Cplx::new(0.0, 0.0), Cplx::new(1.0, 0.0)];
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&a, &b).unwrap() < 1e-15);
        assert!(fidelity(&a, &[Cplx::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn dimension_guard_trips() {
        // N_P = 10 gives 2 * C(20, 10) = 369512 > HARD_LIMIT.
        let p = params(10);
        let basis = SectorBasis::new(&p);
        assert!(basis.len() > HARD_LIMIT);
        let h = build_hamiltonian(&p);
        match diagonalize(&h, &basis, 1) {
            Err(Error::DimensionExceeded { dim, .. }) => assert_eq!(dim, basis.len()),
            other => panic!("expected DimensionExceeded, got {other:?}"),
        }
    }
}
