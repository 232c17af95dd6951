//! Dense linear algebra kernels: symmetric eigensolve (Householder
//! tridiagonalization + implicit QL), a complex-Hermitian Jacobi solver for
//! small blocks, Lanczos with full reorthogonalization, and a Krylov
//! propagator for `exp(-itH)v` on large sectors.

use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;

/// Row-major real matrix.
#[derive(Clone, Debug)]
pub struct Mat<S> {
    pub n: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> S {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.n + c]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.n).map(|r| self.at(r, c)).collect()
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// On return `a` holds the accumulated orthogonal transform Q (columns are
/// the basis change), `d` the diagonal, `e` the off-diagonal (e[0] unused).
fn tred2<S: Scalar>(a: &mut Mat<S>, d: &mut [S], e: &mut [S]) {
    let n = a.n;
    for i in (1..n).rev() {
        let l = i;
        let mut h = S::zero();
        if l > 1 {
            let mut scale = S::zero();
            for k in 0..l {
                scale += a.at(i, k).abs();
            }
            if scale == S::zero() {
                e[i] = a.at(i, l - 1);
            } else {
                for k in 0..l {
                    *a.at_mut(i, k) = a.at(i, k) / scale;
                    h += a.at(i, k) * a.at(i, k);
                }
                let mut f = a.at(i, l - 1);
                let g = if f >= S::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                *a.at_mut(i, l - 1) = f - g;
                f = S::zero();
                for j in 0..l {
                    *a.at_mut(j, i) = a.at(i, j) / h;
                    let mut g = S::zero();
                    for k in 0..=j {
                        g += a.at(j, k) * a.at(i, k);
                    }
                    for k in j + 1..l {
                        g += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * a.at(i, j);
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let fj = a.at(i, j);
                    e[j] -= hh * fj;
                    let gj = e[j];
                    for k in 0..=j {
                        let delta = fj * e[k] + gj * a.at(i, k);
                        *a.at_mut(j, k) -= delta;
                    }
                }
            }
        } else {
            e[i] = a.at(i, l - 1);
        }
        d[i] = h;
    }
    d[0] = S::zero();
    e[0] = S::zero();
    for i in 0..n {
        if d[i] != S::zero() {
            for j in 0..i {
                let mut g = S::zero();
                for k in 0..i {
                    g += a.at(i, k) * a.at(k, j);
                }
                for k in 0..i {
                    let delta = g * a.at(k, i);
                    *a.at_mut(k, j) -= delta;
                }
            }
        }
        d[i] = a.at(i, i);
        *a.at_mut(i, i) = S::one();
        for j in 0..i {
            *a.at_mut(j, i) = S::zero();
            *a.at_mut(i, j) = S::zero();
        }
    }
}

fn pythag<S: Scalar>(a: S, b: S) -> S {
    let (absa, absb) = (a.abs(), b.abs());
    if absa > absb {
        let r = absb / absa;
        absa * (S::one() + r * r).sqrt()
    } else if absb == S::zero() {
        S::zero()
    } else {
        let r = absa / absb;
        absb * (S::one() + r * r).sqrt()
    }
}

/// Implicit-shift QL on a tridiagonal matrix, rotating the columns of `z`.
fn tqli<S: Scalar>(d: &mut [S], e: &mut [S], z: &mut Mat<S>) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= S::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tqli failed to converge");
            let mut g = (d[l + 1] - d[l]) / (S::of(2.0) * e[l]);
            let mut r = pythag(g, S::one());
            let sign_r = if g >= S::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (S::one(), S::one());
            let mut p = S::zero();
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == S::zero() {
                    d[i + 1] -= p;
                    e[m] = S::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + S::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z.at(k, i + 1);
                    *z.at_mut(k, i + 1) = s * z.at(k, i) + c * f;
                    *z.at_mut(k, i) = c * z.at(k, i) - s * f;
                }
            }
            if r == S::zero() && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = S::zero();
        }
    }
}

/// Eigendecomposition of a real symmetric matrix. Returns eigenvalues in
/// ascending order and the matching orthonormal eigenvectors as columns.
pub fn sym_eigen<S: Scalar>(a: &Mat<S>) -> (Vec<S>, Mat<S>) {
    let n = a.n;
    let mut q = a.clone();
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    if n == 1 {
        return (vec![a.at(0, 0)], Mat::identity(1));
    }
    tred2(&mut q, &mut d, &mut e);
    tqli(&mut d, &mut e, &mut q);
    // Sort ascending, carrying columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let evals: Vec<S> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = Mat::zeros(n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            *vecs.at_mut(r, new_c) = q.at(r, old_c);
        }
    }
    (evals, vecs)
}

/// Eigendecomposition of the symmetric tridiagonal matrix `(diag, off)`;
/// `off[i]` couples `i` and `i+1`. Used by the Lanczos paths.
pub fn tridiag_eigen<S: Scalar>(diag: &[S], off: &[S]) -> (Vec<S>, Mat<S>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![S::zero(); n];
    e[1..n].copy_from_slice(&off[..n - 1]);
    let mut z = Mat::identity(n);
    if n > 1 {
        tqli(&mut d, &mut e, &mut z);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let evals: Vec<S> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = Mat::zeros(n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            *vecs.at_mut(r, new_c) = z.at(r, old_c);
        }
    }
    (evals, vecs)
}

/// Row-major complex matrix for small Hermitian blocks.
#[derive(Clone, Debug)]
pub struct CMat<S: Scalar> {
    pub n: usize,
    pub data: Vec<Cplx<S>>,
}

impl<S: Scalar> CMat<S> {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex::new(S::zero(), S::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(S::one(), S::zero());
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Cplx<S> {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Cplx<S> {
        &mut self.data[r * self.n + c]
    }

    pub fn column(&self, c: usize) -> Vec<Cplx<S>> {
        (0..self.n).map(|r| self.at(r, c)).collect()
    }

    pub fn off_diagonal_norm(&self) -> S {
        let mut s = S::zero();
        for r in 0..self.n {
            for c in 0..self.n {
                if r != c {
                    s += self.at(r, c).norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Jacobi eigendecomposition of a small complex Hermitian matrix.
/// Returns ascending eigenvalues and orthonormal eigenvector columns.
pub fn hermitian_eigen<S: Scalar>(h: &CMat<S>) -> (Vec<S>, CMat<S>) {
    let n = h.n;
    let mut a = h.clone();
    let mut v = CMat::identity(n);
    let tol = S::epsilon() * S::of(n as f64);
    for _sweep in 0..100 {
        if a.off_diagonal_norm() <= tol * frobenius(&a).max(S::one()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.at(p, q);
                if apq.norm() <= tol {
                    continue;
                }
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let mag = apq.norm();
                let phase = apq / Complex::new(mag, S::zero());
                // Rotation angle from the real 2x2 problem after phase
                // alignment.
                let theta = (S::of(2.0) * mag).atan2(aqq - app) / S::of(2.0);
                let (s, c) = theta.sin_cos();
                let cs = Complex::new(c, S::zero());
                let sn = phase * Complex::new(s, S::zero());
                // Columns p, q of A and V rotate; rows follow by symmetry.
                for r in 0..n {
                    let arp = a.at(r, p);
                    let arq = a.at(r, q);
                    *a.at_mut(r, p) = arp * cs - arq * sn.conj();
                    *a.at_mut(r, q) = arp * sn + arq * cs;
                }
                for cidx in 0..n {
                    let apc = a.at(p, cidx);
                    let aqc = a.at(q, cidx);
                    *a.at_mut(p, cidx) = apc * cs - aqc * sn;
                    *a.at_mut(q, cidx) = apc * sn.conj() + aqc * cs;
                }
                for r in 0..n {
                    let vrp = v.at(r, p);
                    let vrq = v.at(r, q);
                    *v.at_mut(r, p) = vrp * cs - vrq * sn.conj();
                    *v.at_mut(r, q) = vrp * sn + vrq * cs;
                }
            }
        }
    }
    let mut pairs: Vec<(S, usize)> = (0..n).map(|i| (a.at(i, i).re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let evals: Vec<S> = pairs.iter().map(|p| p.0).collect();
    let mut vecs = CMat::zeros(n);
    for (new_c, &(_, old_c)) in pairs.iter().enumerate() {
        for r in 0..n {
            *vecs.at_mut(r, new_c) = v.at(r, old_c);
        }
    }
    (evals, vecs)
}

fn frobenius<S: Scalar>(a: &CMat<S>) -> S {
    a.data.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
}

/// Lanczos with full reorthogonalization for the lowest `n_states`
/// eigenpairs of a symmetric operator given as a mat-vec closure.
pub fn lanczos_lowest<S: Scalar>(
    dim: usize,
    n_states: usize,
    matvec: impl Fn(&[S]) -> Vec<S>,
    residual_tol: S,
) -> (Vec<S>, Vec<Vec<S>>) {
    assert!(n_states >= 1 && n_states <= dim);
    let mut m = (2 * n_states + 40).min(dim);
    loop {
        let (alphas, betas, basis) = lanczos_run(dim, m, &matvec);
        let steps = alphas.len();
        let (tvals, tvecs) = tridiag_eigen(&alphas, &betas);
        let n_take = n_states.min(steps);
        let mut evals = Vec::with_capacity(n_take);
        let mut evecs: Vec<Vec<S>> = Vec::with_capacity(n_take);
        let mut worst = S::zero();
        for j in 0..n_take {
            let mut v = vec![S::zero(); dim];
            for (i, b) in basis.iter().enumerate().take(steps) {
                let w = tvecs.at(i, j);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += w * *bi;
                }
            }
            normalize(&mut v);
            let hv = matvec(&v);
            let mut res = S::zero();
            for i in 0..dim {
                let r = hv[i] - tvals[j] * v[i];
                res += r * r;
            }
            worst = worst.max(res.sqrt());
            evals.push(tvals[j]);
            evecs.push(v);
        }
        if worst <= residual_tol || steps == dim || m >= dim {
            return (evals, evecs);
        }
        m = (2 * m).min(dim);
    }
}

fn lanczos_run<S: Scalar>(
    dim: usize,
    m: usize,
    matvec: &impl Fn(&[S]) -> Vec<S>,
) -> (Vec<S>, Vec<S>, Vec<Vec<S>>) {
    // Deterministic pseudo-random start vector.
    let mut v = vec![S::zero(); dim];
    let mut state = 0x9e3779b97f4a7c15u64;
    for vi in v.iter_mut() {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        *vi = S::of(((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5);
    }
    normalize(&mut v);
    let mut basis = vec![v];
    let mut alphas: Vec<S> = Vec::new();
    let mut betas: Vec<S> = Vec::new();
    for step in 0..m {
        let mut w = matvec(&basis[step]);
        let alpha = dot(&w, &basis[step]);
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&basis[step]) {
            *wi -= alpha * *vi;
        }
        if step > 0 {
            let beta_prev = betas[step - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[step - 1]) {
                *wi -= beta_prev * *vi;
            }
        }
        // Full reorthogonalization, twice for numerical safety.
        for _ in 0..2 {
            for b in &basis {
                let overlap = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= overlap * *bi;
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        if beta <= S::epsilon() * S::of(100.0) {
            break;
        }
        betas.push(beta);
        for wi in w.iter_mut() {
            *wi /= beta;
        }
        basis.push(w);
        if basis.len() > m {
            break;
        }
    }
    (alphas, betas, basis)
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn normalize<S: Scalar>(v: &mut [S]) {
    let n = dot(v, v).sqrt();
    for vi in v.iter_mut() {
        *vi /= n;
    }
}

/// Krylov propagator: `exp(-i t H) v` for a symmetric real operator acting
/// on complex vectors, without forming `H`. Lanczos on the complex vector
/// with real tridiagonal coefficients; adaptive subspace growth against a
/// step-halving error estimate.
pub fn krylov_evolve<S: Scalar>(
    dim: usize,
    v: &[Cplx<S>],
    t: S,
    matvec: impl Fn(&[Cplx<S>]) -> Vec<Cplx<S>>,
    tol: S,
) -> Vec<Cplx<S>> {
    let norm_v = cnorm(v);
    if norm_v == S::zero() {
        return v.to_vec();
    }
    let mut current: Vec<Cplx<S>> = v.to_vec();
    let n_sub = ((t.abs().as_f64() / 0.5).ceil() as usize).max(1);
    let dt = t / S::of(n_sub as f64);
    for _ in 0..n_sub {
        current = krylov_step(dim, &current, dt, &matvec, tol);
    }
    current
}

fn krylov_step<S: Scalar>(
    dim: usize,
    v: &[Cplx<S>],
    t: S,
    matvec: &impl Fn(&[Cplx<S>]) -> Vec<Cplx<S>>,
    tol: S,
) -> Vec<Cplx<S>> {
    let beta0 = cnorm(v);
    let mut basis: Vec<Vec<Cplx<S>>> = vec![v.iter().map(|z| z / beta0).collect()];
    let mut alphas: Vec<S> = Vec::new();
    let mut betas: Vec<S> = Vec::new();
    let m_max = 40.min(dim);
    let mut previous: Option<Vec<Cplx<S>>> = None;
    loop {
        let step = alphas.len();
        let mut w = matvec(&basis[step]);
        let alpha = cdot(&basis[step], &w).re;
        alphas.push(alpha);
        axpy(&mut w, -Complex::new(alpha, S::zero()), &basis[step]);
        if step > 0 {
            axpy(
                &mut w,
                -Complex::new(betas[step - 1], S::zero()),
                &basis[step - 1],
            );
        }
        for b in &basis {
            let overlap = cdot(b, &w);
            axpy(&mut w, -overlap, b);
        }
        let beta = cnorm(&w);
        let breakdown = beta <= S::epsilon() * S::of(100.0);
        // Assemble the current estimate.
        let est = assemble_exp(&alphas, &betas, &basis, t, beta0);
        if let Some(prev) = &previous {
            let mut diff = S::zero();
            for i in 0..dim {
                diff += (est[i] - prev[i]).norm_sqr();
            }
            if diff.sqrt() <= tol || breakdown || alphas.len() >= m_max {
                return est;
            }
        } else if breakdown || alphas.len() >= m_max {
            return est;
        }
        previous = Some(est);
        betas.push(beta);
        let next: Vec<Cplx<S>> = w.iter().map(|z| z / beta).collect();
        basis.push(next);
    }
}

fn assemble_exp<S: Scalar>(
    alphas: &[S],
    betas: &[S],
    basis: &[Vec<Cplx<S>>],
    t: S,
    beta0: S,
) -> Vec<Cplx<S>> {
    let m = alphas.len();
    let (tvals, tvecs) = tridiag_eigen(alphas, &betas[..m.saturating_sub(1)]);
    let dim = basis[0].len();
    // coeff_j = sum_l V[j,l] exp(-i t lambda_l) V[0,l] * beta0
    let mut out = vec![Complex::new(S::zero(), S::zero()); dim];
    for j in 0..m {
        let mut cj = Complex::new(S::zero(), S::zero());
        for l in 0..m {
            let phase = Complex::from_polar(S::one(), -t * tvals[l]);
            cj += phase * Complex::new(tvecs.at(j, l) * tvecs.at(0, l), S::zero());
        }
        cj *= Complex::new(beta0, S::zero());
        for (oi, bi) in out.iter_mut().zip(&basis[j]) {
            *oi += cj * bi;
        }
    }
    out
}

fn cdot<S: Scalar>(a: &[Cplx<S>], b: &[Cplx<S>]) -> Cplx<S> {
    let mut s = Complex::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s
}

fn cnorm<S: Scalar>(a: &[Cplx<S>]) -> S {
    a.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
}

fn axpy<S: Scalar>(y: &mut [Cplx<S>], a: Cplx<S>, x: &[Cplx<S>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
