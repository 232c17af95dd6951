//! Gauge-invariant bare-meson operators in the minimal gauge-link
//! formulation, after the Jordan-Wigner transformation.
//!
//! `meson_operator(m, n)` creates a fermion at `m` and removes one at `n`,
//! connected by the shorter of the two string routes on the periodic
//! lattice. Routes that pass through the singled-out link pick up the
//! boson-qubit `X` and a sector-dependent sign; at half-lattice separation
//! both routes enter with weight `1/sqrt(2)`.

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::pauli::{number_operator, sigma_minus, sigma_plus, PauliOp, PauliString, PauliSum};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// Shortest periodic distance between staggered sites.
pub fn periodic_distance(m: usize, n: usize, n_stag: usize) -> usize {
    let d = (m as i64 - n as i64).rem_euclid(n_stag as i64) as usize;
    d.min(n_stag - d)
}

fn z_string<S: Scalar>(n_qubits: usize, sites: impl Iterator<Item = usize>) -> PauliSum<S> {
    let mut word = PauliString::IDENTITY;
    for s in sites {
        word.z |= 1 << s;
    }
    let mut sum = PauliSum::zero(n_qubits);
    sum.push(Complex::new(S::one(), S::zero()), word);
    sum
}

/// Direct-route meson `psi_m^dag psi_n`-type operator with the string
/// running inside `(lo, hi)`: creation at `m`, annihilation at `n`.
fn direct_meson<S: Scalar>(params: &LatticeParams<S>, m: usize, n: usize) -> PauliSum<S> {
    let nq = params.n_system_qubits();
    let (lo, hi) = (m.min(n), m.max(n));
    let string = z_string::<S>(nq, lo + 1..hi);
    let body = sigma_minus::<S>(nq, m).mul(&string).mul(&sigma_plus(nq, n));
    if m < n {
        body
    } else {
        body.scaled(Complex::new(-S::one(), S::zero()))
    }
}

/// Wrapped-route meson passing through the boson link: strings cover
/// `0..lo` and `hi+1..N`, the boson qubit carries `X`, and the sector sign
/// is `(-1)^{N_P}` for `m < n` and `(-1)^{N_P+1}` for `m > n`.
fn wrapped_meson<S: Scalar>(params: &LatticeParams<S>, m: usize, n: usize) -> PauliSum<S> {
    let nq = params.n_system_qubits();
    let nn = params.n_stag();
    let (lo, hi) = (m.min(n), m.max(n));
    let left = z_string::<S>(nq, 0..lo);
    let right = z_string::<S>(nq, hi + 1..nn);
    let boson = PauliSum::single(
        nq,
        params.boson_qubit(),
        PauliOp::X,
        Complex::new(S::one(), S::zero()),
    );
    let body = left
        .mul(&sigma_minus(nq, m))
        .mul(&sigma_plus(nq, n))
        .mul(&right)
        .mul(&boson);
    let mut sign = if params.n_phys % 2 == 0 {
        S::one()
    } else {
        -S::one()
    };
    if m > n {
        sign = -sign;
    }
    body.scaled(Complex::new(sign, S::zero()))
}

/// The string-route operators making up a bare meson: one for generic
/// separations, the direct and wrapped routes each with weight
/// `1/sqrt(2)` at half-lattice separation. Each route acts monomially on
/// basis states; their sum is [`meson_operator`].
pub fn meson_route_operators<S: Scalar>(
    m: usize,
    n: usize,
    params: &LatticeParams<S>,
) -> Result<Vec<PauliSum<S>>> {
    let nn = params.n_stag();
    if m >= nn || n >= nn {
        return Err(Error::SiteOutOfRange {
            site: m.max(n),
            n_sites: nn,
        });
    }
    if m == n {
        return Ok(vec![number_operator(params.n_system_qubits(), m)]);
    }
    let arith = (m as i64 - n as i64).unsigned_abs() as usize;
    let n_p = params.n_phys;
    let mut routes = if arith < n_p {
        vec![direct_meson(params, m, n)]
    } else if arith > n_p {
        vec![wrapped_meson(params, m, n)]
    } else {
        let w = Complex::new(S::one() / S::of(2.0).sqrt(), S::zero());
        vec![
            direct_meson(params, m, n).scaled(w),
            wrapped_meson(params, m, n).scaled(w),
        ]
    };
    for r in routes.iter_mut() {
        r.canonicalize_with(S::zero());
    }
    Ok(routes)
}

/// The Jordan-Wigner form of the bare-meson operator for sites `m`
/// (creation end) and `n` (annihilation end).
pub fn meson_operator<S: Scalar>(
    m: usize,
    n: usize,
    params: &LatticeParams<S>,
) -> Result<PauliSum<S>> {
    let routes = meson_route_operators(m, n, params)?;
    let mut op = PauliSum::zero(params.n_system_qubits());
    for r in &routes {
        op.add_assign(r);
    }
    op.canonicalize_with(S::zero());
    Ok(op)
}

/// Wave-packet creation operator `sum_{m,n} C_{m,n} M_{m,n}` from a
/// coefficient table over ordered site pairs.
pub fn packet_creation_operator<S: Scalar>(
    entries: &[((usize, usize), Cplx<S>)],
    params: &LatticeParams<S>,
) -> Result<PauliSum<S>> {
    let mut op = PauliSum::zero(params.n_system_qubits());
    for &((m, n), c) in entries {
        op.add_assign(&meson_operator(m, n, params)?.scaled(c));
    }
    op.canonicalize();
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n_phys: usize) -> LatticeParams<f64> {
        LatticeParams::new(n_phys, 1.0, -0.3).unwrap()
    }

    #[test]
    fn diagonal_case_is_number_operator() {
        let p = params(5);
        let op = meson_operator(3, 3, &p).unwrap();
        let expect = number_operator::<f64>(p.n_system_qubits(), 3);
        let diff = op.add(&expect.scaled(Cplx::new(-1.0, 0.0)));
        let mut d = diff;
        d.canonicalize();
        assert!(d.is_empty());
    }

    #[test]
    fn adjacent_pair_is_bare_hop() {
        // (m, n) = (0, 1): sigma^-_0 sigma^+_1 with an empty string.
        let p = params(5);
        let nq = p.n_system_qubits();
        let op = meson_operator(0, 1, &p).unwrap();
        let expect = sigma_minus::<f64>(nq, 0).mul(&sigma_plus(nq, 1));
        let mut diff = op.add(&expect.scaled(Cplx::new(-1.0, 0.0)));
        diff.canonicalize();
        assert!(diff.is_empty());
    }

    #[test]
    fn adjoint_swaps_creation_and_annihilation() {
        // M_{m,n}^dag is the swapped-ends operator, up to the fermion
        // anticommutation sign carried by the anti-ordered rows of the
        // operator table: -1 for m != n, +1 on the diagonal. Dense
        // comparison over all pairs at N_P = 2.
        let p = params(2);
        let n = p.n_stag();
        for m in 0..n {
            for site in 0..n {
                let a = meson_operator(m, site, &p).unwrap().adjoint();
                let sign = if m == site { 1.0 } else { -1.0 };
                let b = meson_operator(site, m, &p)
                    .unwrap()
                    .scaled(Cplx::new(sign, 0.0));
                let a_m = a.dense_matrix();
                let b_m = b.dense_matrix();
                let dim = a_m.len();
                for r in 0..dim {
                    for c in 0..dim {
                        assert!(
                            (a_m[r][c] - b_m[r][c]).norm() < 1e-13,
                            "adjoint mismatch for ({m},{site}) at ({r},{c})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_range_site_rejected() {
        let p = params(2);
        assert!(meson_operator(0, 4, &p).is_err());
    }

    #[test]
    fn wrapped_meson_touches_boson() {
        let p = params(5);
        let boson = p.boson_qubit();
        // (N-1, 0) has arithmetic distance N-1 > N_P: wrapped, length 1.
        let op = meson_operator(p.n_stag() - 1, 0, &p).unwrap();
        assert!(op
            .terms()
            .iter()
            .all(|t| t.string.letter(boson) == crate::pauli::PauliOp::X));
    }
}
