//! Momentum labels from the lattice translation symmetry.
//!
//! The minimal gauge-link Hamiltonian hides translation invariance (one
//! link is singled out), but the symmetry survives the gauge fixing. The
//! translation by one physical site (two staggered sites) is manifest in
//! the explicit gauge-link formulation, where the physical subspace is
//! parameterized by the fermion word plus the last link: all other links
//! follow from the Gauss laws. We build the translation there as a signed
//! permutation, transport it into the minimal-formulation sector basis by
//! matching the two Hamiltonians gauge-entry by entry, and diagonalize it
//! inside each degenerate energy subspace. A state with translation
//! eigenvalue `exp(-2ik)` carries momentum `k`.

use crate::eigen::{canonical_phase, EigenSolution};
use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::lattice::LatticeParams;
use crate::linalg::{hermitian_eigen, CMat};
use crate::pauli::PauliSum;
use crate::scalar::{Cplx, Scalar};
use crate::sector::{SectorBasis, SectorOp};
use num_complex::Complex;

/// Signed permutation on the sector basis: `T |i> = sign_i |perm_i>`.
#[derive(Clone, Debug)]
pub struct SignedPermutation<S: Scalar> {
    pub perm: Vec<usize>,
    pub sign: Vec<S>,
}

impl<S: Scalar> SignedPermutation<S> {
    pub fn apply(&self, v: &[Cplx<S>]) -> Vec<Cplx<S>> {
        let mut out = vec![Complex::new(S::zero(), S::zero()); v.len()];
        for (i, (&p, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            out[p] = v[i] * Complex::new(s, S::zero());
        }
        out
    }

    pub fn scale(&mut self, s: S) {
        for x in self.sign.iter_mut() {
            *x *= s;
        }
    }
}

/// Link values `z_0..z_{N-1}` (as +-1) fixed by the Gauss laws from the
/// fermion word and the last link.
fn gauss_links(n_stag: usize, fermions: u64, last_link: i8) -> Vec<i8> {
    let mut z = vec![0i8; n_stag];
    let mut prev = last_link;
    for n in 0..n_stag {
        let f = (fermions >> n) & 1;
        // (-1)^{Qbar_n} with Qbar_n = f_n (even n) or f_n - 1 (odd n).
        let mut flip = f == 1;
        if n % 2 == 1 {
            flip = !flip;
        }
        prev = if flip { -prev } else { prev };
        z[n] = prev;
    }
    z
}

/// Sign of a fermion operator at mode `j` acting past the occupied modes
/// below it.
fn jw_sign(fermions: u64, j: usize) -> f64 {
    let below = fermions & ((1u64 << j) - 1);
    if below.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense Hamiltonian of the explicit gauge-link formulation on the
/// physical subspace, indexed by the same (fermion word, last link) basis
/// as the minimal-formulation sector.
pub fn explicit_formulation_matrix<S: Scalar>(
    params: &LatticeParams<S>,
    basis: &SectorBasis,
) -> Vec<Vec<S>> {
    let n = params.n_stag();
    let dim = basis.len();
    let mut h = vec![vec![S::zero(); dim]; dim];
    for (col, &bits) in basis.states().iter().enumerate() {
        let fermions = bits & ((1 << n) - 1);
        let beta = if (bits >> n) & 1 == 0 { 1i8 } else { -1i8 };
        let links = gauss_links(n, fermions, beta);

        // Diagonal: staggered mass and electric field.
        let mut diag = S::zero();
        for site in 0..n {
            let occ = ((fermions >> site) & 1) as f64;
            let stag = if site % 2 == 0 { 1.0 } else { -1.0 };
            diag += params.mass * S::of(stag * occ);
            diag += params.eps * S::of(links[site] as f64);
        }
        h[col][col] += diag;

        // Hopping through each link: xi_n^dag sx_n xi_{n+1} + h.c.
        for site in 0..n {
            let dst = site;
            let src = (site + 1) % n;
            if (fermions >> src) & 1 == 1 && (fermions >> dst) & 1 == 0 {
                let mut sign = jw_sign(fermions, src);
                let removed = fermions & !(1 << src);
                sign *= jw_sign(removed, dst);
                let new_f = removed | (1 << dst);
                let new_beta = if site == n - 1 { -beta } else { beta };
                let new_bits = new_f | if new_beta == 1 { 0 } else { 1 << n };
                let row = basis.position(new_bits).expect("hop stays in sector");
                let amp = S::of(0.5 * sign);
                h[row][col] += amp;
                h[col][row] += amp;
            }
        }
    }
    h
}

/// Two-staggered-site translation as a signed permutation on the explicit
/// formulation basis: fermion and link words shift together, fermionic
/// reordering supplies the sign.
pub fn translation_raw<S: Scalar>(
    params: &LatticeParams<S>,
    basis: &SectorBasis,
) -> SignedPermutation<S> {
    let n = params.n_stag();
    let n_p = params.n_phys;
    let dim = basis.len();
    let mut perm = vec![0usize; dim];
    let mut sign = vec![S::one(); dim];
    for (i, &bits) in basis.states().iter().enumerate() {
        let fermions = bits & ((1 << n) - 1);
        let beta = if (bits >> n) & 1 == 0 { 1i8 } else { -1i8 };
        let links = gauss_links(n, fermions, beta);

        // Occupations shift by +2 (cyclic).
        let shifted = ((fermions << 2) | (fermions >> (n - 2))) & ((1u64 << n) - 1);
        // Modes N-2, N-1 wrap to the front past the other occupied modes.
        let wrapped = ((fermions >> (n - 2)) & 0b11).count_ones() as usize;
        let others = n_p - wrapped;
        let parity = (wrapped * others) % 2;
        // Links shift by +2 as well; the new last link is the old z_{N-3}
        // (for N = 2 that wraps to z_{N-1} itself shifted, i.e. z_{N-1}).
        let new_last = if n >= 3 { links[n - 3] } else { links[n - 1] };
        let new_bits = shifted | if new_last == 1 { 0 } else { 1 << n };
        perm[i] = basis
            .position(new_bits)
            .expect("translation stays in sector");
        sign[i] = if parity == 0 { S::one() } else { -S::one() };
    }
    SignedPermutation { perm, sign }
}

/// Diagonal gauge (+-1 per basis state) relating the explicit-formulation
/// matrix to the minimal-formulation sector matrix, found by walking the
/// shared hopping graph. Both matrices must agree entrywise after
/// conjugation.
pub fn gauge_match<S: Scalar>(h_minimal: &[Vec<S>], h_explicit: &[Vec<S>]) -> Result<Vec<S>> {
    let dim = h_minimal.len();
    let tol = S::tol(1e-9);
    let mut gauge: Vec<Option<S>> = vec![None; dim];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..dim {
        if gauge[start].is_some() {
            continue;
        }
        gauge[start] = Some(S::one());
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let gi = gauge[i].unwrap();
            for j in 0..dim {
                if j == i || h_explicit[i][j].abs() <= tol {
                    continue;
                }
                let ratio = h_minimal[i][j] / (h_explicit[i][j] * gi);
                if (ratio.abs() - S::one()).abs() > tol {
                    return Err(Error::GaugeMismatch(format!(
                        "entry ({i},{j}) magnitude ratio {ratio}"
                    )));
                }
                let gj = if ratio > S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                match gauge[j] {
                    None => {
                        gauge[j] = Some(gj);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != gj => {
                        return Err(Error::GaugeMismatch(format!(
                            "inconsistent sign at entry ({i},{j})"
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let gauge: Vec<S> = gauge.into_iter().map(|g| g.unwrap()).collect();
    for i in 0..dim {
        for j in 0..dim {
            let lhs = h_minimal[i][j];
            let rhs = gauge[i] * h_explicit[i][j] * gauge[j];
            if (lhs - rhs).abs() > tol {
                return Err(Error::GaugeMismatch(format!(
                    "conjugated mismatch at ({i},{j}): {lhs} vs {rhs}"
                )));
            }
        }
    }
    Ok(gauge)
}

/// The translation operator on the minimal-formulation sector basis,
/// normalized so the ground state carries eigenvalue +1.
pub fn translation_operator<S: Scalar>(
    params: &LatticeParams<S>,
    basis: &SectorBasis,
    ground_state: &[Cplx<S>],
) -> Result<SignedPermutation<S>> {
    let h = build_hamiltonian(params);
    let op = SectorOp::new(&h, basis)?;
    let h_minimal_mat = op.dense_real(S::tol(1e-12))?;
    let dim = basis.len();
    let mut h_minimal = vec![vec![S::zero(); dim]; dim];
    for r in 0..dim {
        for c in 0..dim {
            h_minimal[r][c] = h_minimal_mat.at(r, c);
        }
    }
    let h_explicit = explicit_formulation_matrix(params, basis);
    let gauge = gauge_match(&h_minimal, &h_explicit)?;

    let raw = translation_raw(params, basis);
    let mut t = SignedPermutation {
        perm: raw.perm.clone(),
        sign: (0..dim)
            .map(|i| gauge[raw.perm[i]] * raw.sign[i] * gauge[i])
            .collect(),
    };

    // Fix the global sign: the (non-degenerate) ground state must be
    // translation invariant with eigenvalue exactly +1.
    let tv = t.apply(ground_state);
    let mut amp = Complex::new(S::zero(), S::zero());
    for (a, b) in ground_state.iter().zip(&tv) {
        amp += a.conj() * b;
    }
    if (amp.norm() - S::one()).abs() > S::of(1e-8) {
        return Err(Error::GaugeMismatch(format!(
            "ground state is not a translation eigenstate (|amp| = {})",
            amp.norm()
        )));
    }
    if amp.re < S::zero() {
        t.scale(-S::one());
    }
    Ok(t)
}

/// Frobenius norm of `[T, H]` on the sector, as a symmetry check.
pub fn commutator_norm<S: Scalar>(t: &SignedPermutation<S>, h: &SectorOp<S>) -> S {
    let dim = t.perm.len();
    let mut total = S::zero();
    for col in 0..dim {
        let mut e = vec![Complex::new(S::zero(), S::zero()); dim];
        e[col] = Complex::new(S::one(), S::zero());
        let th = t.apply(&h.apply(&e));
        let ht = h.apply(&t.apply(&e));
        for (a, b) in th.iter().zip(&ht) {
            total += (a - b).norm_sqr();
        }
    }
    total.sqrt()
}

/// Attach momentum labels to an eigensolution by diagonalizing the
/// translation inside each degenerate energy subspace. States within a
/// subspace are rotated to translation eigenstates and reordered by
/// eigenvalue phase ascending.
pub fn label_momenta<S: Scalar>(
    solution: &mut EigenSolution<S>,
    params: &LatticeParams<S>,
    basis: &SectorBasis,
) -> Result<()> {
    if solution.n_states() == 0 {
        return Ok(());
    }
    let t = translation_operator(params, basis, &solution.states[0])?;
    let n = solution.n_states();
    let scale = solution
        .energies
        .iter()
        .map(|e| e.abs())
        .fold(S::one(), S::max);
    let energy_tol = S::of(1e-8) * scale;
    let mut labels = vec![S::zero(); n];

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (solution.energies[end] - solution.energies[start]).abs() < energy_tol {
            end += 1;
        }
        let g = end - start;
        // Projected translation block B[a][b] = <v_a | T | v_b>.
        let mut block = CMat::zeros(g);
        let t_images: Vec<Vec<Cplx<S>>> =
            (start..end).map(|b| t.apply(&solution.states[b])).collect();
        for a in 0..g {
            for b in 0..g {
                let mut amp = Complex::new(S::zero(), S::zero());
                for (x, y) in solution.states[start + a].iter().zip(&t_images[b]) {
                    amp += x.conj() * y;
                }
                *block.at_mut(a, b) = amp;
            }
        }
        let (phases, rotation) =
            unitary_block_eigen(&block).map_err(|residual| Error::TranslationMixing {
                energy: solution.energies[start].as_f64(),
                residual,
            })?;

        // Rotate the states into translation eigenstates.
        let dim = basis.len();
        let mut rotated: Vec<Vec<Cplx<S>>> = Vec::with_capacity(g);
        for col in 0..g {
            let mut v = vec![Complex::new(S::zero(), S::zero()); dim];
            for row in 0..g {
                let w = rotation.at(row, col);
                for (vi, si) in v.iter_mut().zip(&solution.states[start + row]) {
                    *vi += w * si;
                }
            }
            canonical_phase(&mut v);
            rotated.push(v);
        }

        // Order by eigenvalue phase ascending; momentum k = -arg/2 snapped
        // to the Brillouin grid.
        let mut order: Vec<usize> = (0..g).collect();
        order.sort_by(|&a, &b| phases[a].arg().partial_cmp(&phases[b].arg()).unwrap());
        for (slot, &src) in order.iter().enumerate() {
            let lambda = phases[src];
            if (lambda.norm() - S::one()).abs() > S::of(1e-6) {
                return Err(Error::TranslationMixing {
                    energy: solution.energies[start].as_f64(),
                    residual: (lambda.norm() - S::one()).abs().as_f64(),
                });
            }
            let k = -lambda.arg() / S::of(2.0);
            let grid = S::of(params.n_phys as f64) * k / S::PI();
            let snapped = grid.round();
            if (grid - snapped).abs() > S::of(1e-5) {
                return Err(Error::TranslationMixing {
                    energy: solution.energies[start].as_f64(),
                    residual: (grid - snapped).abs().as_f64(),
                });
            }
            labels[start + slot] = snapped * S::PI() / S::of(params.n_phys as f64);
            solution.states[start + slot] = rotated[src].clone();
        }
        start = end;
    }
    solution.momentum_labels = Some(labels);
    Ok(())
}

/// Joint eigendecomposition of a (near-)unitary normal block: diagonalize
/// the Hermitian part, then the anti-Hermitian part inside its degenerate
/// blocks. Returns eigenvalues and the rotation, or the off-diagonal
/// residual on failure.
fn unitary_block_eigen<S: Scalar>(
    b: &CMat<S>,
) -> std::result::Result<(Vec<Cplx<S>>, CMat<S>), f64> {
    let g = b.n;
    let mut herm = CMat::zeros(g);
    let mut anti = CMat::zeros(g);
    for r in 0..g {
        for c in 0..g {
            let x = b.at(r, c);
            let y = b.at(c, r).conj();
            *herm.at_mut(r, c) = (x + y) * Complex::new(S::of(0.5), S::zero());
            *anti.at_mut(r, c) = (x - y) * Complex::new(S::zero(), -S::of(0.5));
        }
    }
    let (hvals, hvecs) = hermitian_eigen(&herm);
    let mut rotation = hvecs.clone();
    let tol = S::of(1e-8);
    let mut start = 0;
    while start < g {
        let mut end = start + 1;
        while end < g && (hvals[end] - hvals[start]).abs() < tol {
            end += 1;
        }
        let sub = end - start;
        if sub > 1 {
            let mut anti_block = CMat::zeros(sub);
            for a in 0..sub {
                for c in 0..sub {
                    let mut acc = Complex::new(S::zero(), S::zero());
                    for r1 in 0..g {
                        for r2 in 0..g {
                            acc += hvecs.at(r1, start + a).conj()
                                * anti.at(r1, r2)
                                * hvecs.at(r2, start + c);
                        }
                    }
                    *anti_block.at_mut(a, c) = acc;
                }
            }
            let (_, sub_rot) = hermitian_eigen(&anti_block);
            let mut new_cols = vec![vec![Complex::new(S::zero(), S::zero()); g]; sub];
            for (c, col) in new_cols.iter_mut().enumerate() {
                for (r, item) in col.iter_mut().enumerate() {
                    for m in 0..sub {
                        *item += hvecs.at(r, start + m) * sub_rot.at(m, c);
                    }
                }
            }
            for c in 0..sub {
                for r in 0..g {
                    *rotation.at_mut(r, start + c) = new_cols[c][r];
                }
            }
        }
        start = end;
    }
    // Eigenvalues from the rotated block; verify off-diagonal residual.
    let mut phases = vec![Complex::new(S::zero(), S::zero()); g];
    let mut residual = S::zero();
    for a in 0..g {
        for c in 0..g {
            let mut acc = Complex::new(S::zero(), S::zero());
            for r1 in 0..g {
                for r2 in 0..g {
                    acc += rotation.at(r1, a).conj() * b.at(r1, r2) * rotation.at(r2, c);
                }
            }
            if a == c {
                phases[a] = acc;
            } else {
                residual += acc.norm_sqr();
            }
        }
    }
    let residual = residual.sqrt();
    if residual > S::of(1e-8) {
        return Err(residual.as_f64());
    }
    Ok((phases, rotation))
}

/// Diagonalize and label momenta in one step, requesting a few spare
/// states so the last degenerate group is complete.
pub fn diagonalize_labeled<S: Scalar>(
    h: &PauliSum<S>,
    params: &LatticeParams<S>,
    basis: &SectorBasis,
    n_states: usize,
) -> Result<EigenSolution<S>> {
    let extra = (n_states + params.n_phys + 2).min(basis.len());
    let mut sol = crate::eigen::diagonalize(h, basis, extra)?;
    // The trailing degenerate group may continue past the requested
    // window; drop it entirely so only complete groups are labeled.
    if extra < basis.len() {
        let scale = sol.energies.iter().map(|e| e.abs()).fold(S::one(), S::max);
        let tol = S::of(1e-8) * scale;
        let last = sol.energies[extra - 1];
        let mut cut = extra;
        while cut > 0 && (sol.energies[cut - 1] - last).abs() < tol {
            cut -= 1;
        }
        if cut < n_states {
            return Err(Error::TranslationMixing {
                energy: last.as_f64(),
                residual: f64::NAN,
            });
        }
        sol.energies.truncate(cut);
        sol.states.truncate(cut);
    }
    label_momenta(&mut sol, params, basis)?;
    sol.energies.truncate(n_states);
    sol.states.truncate(n_states);
    if let Some(labels) = &mut sol.momentum_labels {
        labels.truncate(n_states);
    }
    Ok(sol)
}
