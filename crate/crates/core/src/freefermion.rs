//! Exact solution of the quadratic model `H = (i/2) sum_ij K_ij c_i c_j`.
//!
//! The canonical form `R K R^T = diag([[0, e_n], [-e_n, 0]])` is built from the
//! eigenvectors of the symmetric matrix `K^T K`, whose eigenvalues are `e_n^2`:
//! for each unit vector `r` in an eigenspace the partner `K^T r / e` completes
//! a 2x2 block, and the span of each pair is invariant under `K`.

use crate::error::Result;
use crate::hamiltonians::{fermionic_terms, Couplings};
use crate::lattice::{GaugeConfig, Lattice};
use crate::linalg::{determinant, symmetric_eigen};
use crate::scalar::Real;

/// Single-particle energies below this value are reported as exact zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-12;

/// Antisymmetric coupling matrix (row-major), plus any constant from lowering.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem<T: Real> {
    pub n: usize,
    pub k: Vec<T>,
    pub offset: T,
}

impl<T: Real> QuadraticProblem<T> {
    pub fn new(n: usize, k: Vec<T>) -> Self {
        assert_eq!(k.len(), n * n);
        QuadraticProblem { n, k, offset: T::zero() }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.k[i * self.n + j]
    }

    pub fn nonzero_count(&self) -> usize {
        self.k.iter().filter(|v| **v != T::zero()).count()
    }
}

/// Orthogonal `R` (row-major) with `R K R^T` in 2x2 block form.
#[derive(Debug, Clone)]
pub struct CanonicalForm<T: Real> {
    pub n: usize,
    pub r: Vec<T>,
    /// Single-particle energies, descending.
    pub eps: Vec<T>,
    /// `det R`, either `+1` or `-1`.
    pub det: T,
    pub offset: T,
}

/// Builds `K` for `gauge` from the lowered bond and second-neighbor terms
/// (`kappa_int` and the field are ignored).
pub fn build_k<T: Real>(lattice: &Lattice, gauge: &GaugeConfig, c: &Couplings<T>) -> Result<QuadraticProblem<T>> {
    let quad = Couplings { kappa_int: T::zero(), h: [T::zero(); 3], ..*c };
    let n = lattice.n_sites();
    let mut k = vec![T::zero(); n * n];
    let mut offset = T::zero();
    for (coeff, cs) in fermionic_terms(lattice, gauge, &quad)? {
        match cs.as_slice() {
            // coeff c_i c_j = i K_ij c_i c_j for i < j
            [i, j] => {
                let v = coeff.im;
                debug_assert!(coeff.re.abs() <= T::lit(1e-12));
                k[i * n + j] += v;
                k[j * n + i] -= v;
            }
            [] => offset += coeff.re,
            _ => unreachable!("quadratic couplings lower to pairs"),
        }
    }
    Ok(QuadraticProblem { n, k, offset })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn normalize_sign<T: Real>(v: &mut [T]) {
    let tol = T::lit(1e-10);
    if let Some(first) = v.iter().find(|x| x.abs() > tol) {
        if *first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn orthogonalize<T: Real>(v: &mut [T], basis: &[Vec<T>]) -> T {
    for _ in 0..2 {
        for b in basis {
            let p = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * *y);
        }
    }
    let nrm = dot(v, v).sqrt();
    if nrm > T::zero() {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// Canonical form of an antisymmetric matrix.
pub fn canonical_form<T: Real>(q: &QuadraticProblem<T>) -> Result<CanonicalForm<T>> {
    let n = q.n;
    let k = &q.k;
    let kt_mul = |v: &[T]| -> Vec<T> { (0..n).map(|i| (0..n).map(|j| k[j * n + i] * v[j]).sum()).collect() };
    let k_mul = |v: &[T]| -> Vec<T> { (0..n).map(|i| (0..n).map(|j| k[i * n + j] * v[j]).sum()).collect() };
    let mut ktk = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            ktk[i * n + j] = (0..n).map(|m| k[m * n + i] * k[m * n + j]).sum();
        }
    }
    let (vals, vecs) = symmetric_eigen(&ktk, n)?;
    let scale = vals.iter().fold(T::one(), |m, v| m.max(v.abs())).sqrt();
    let zero_tol = T::lit(ZERO_MODE_TOL) * scale.max(T::one());
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut pairs: Vec<(T, usize)> = Vec::new();
    for col in (0..n).rev() {
        let mut v: Vec<T> = (0..n).map(|i| vecs[i * n + col]).collect();
        if orthogonalize(&mut v, &rows) < T::lit(0.5) {
            continue;
        }
        let mut w = kt_mul(&v);
        let e = dot(&w, &w).sqrt();
        if e <= zero_tol {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= e);
        orthogonalize(&mut w, &rows);
        normalize_sign(&mut v);
        normalize_sign(&mut w);
        let orient = dot(&v, &k_mul(&w));
        let (r0, r1) = if orient >= T::zero() { (v, w) } else { (w, v) };
        let eps = dot(&r0, &k_mul(&r1));
        pairs.push((eps, rows.len()));
        rows.push(r0);
        rows.push(r1);
    }
    // Remaining directions span the kernel; pair them with zero energy.
    let mut extra: Vec<Vec<T>> = Vec::new();
    for col in 0..n {
        if rows.len() + extra.len() >= n {
            break;
        }
        let mut v: Vec<T> = (0..n).map(|i| vecs[i * n + col]).collect();
        let mut basis = rows.clone();
        basis.extend(extra.iter().cloned());
        if orthogonalize(&mut v, &basis) >= T::lit(0.5) {
            normalize_sign(&mut v);
            extra.push(v);
        }
    }
    for chunk in extra.chunks(2) {
        pairs.push((T::zero(), rows.len()));
        rows.extend(chunk.iter().cloned());
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite energies"));
    let mut r = Vec::with_capacity(n * n);
    let mut eps = Vec::with_capacity(n / 2);
    for (e, idx) in pairs {
        r.extend_from_slice(&rows[idx]);
        r.extend_from_slice(&rows[idx + 1]);
        eps.push(if e <= zero_tol { T::zero() } else { e });
    }
    let det = determinant(&r, n).signum();
    Ok(CanonicalForm { n, r, eps, det, offset: q.offset })
}

/// `E_0 = -sum_n e_n` (plus any constant offset).
pub fn ground_energy<T: Real>(cf: &CanonicalForm<T>) -> T {
    cf.offset - cf.eps.iter().copied().sum::<T>()
}

/// Gap between the two fermion-parity ground states, `2 min_n e_n`.
pub fn parity_splitting<T: Real>(cf: &CanonicalForm<T>) -> T {
    let m = cf.eps.iter().copied().fold(T::infinity(), T::min);
    if m <= T::lit(ZERO_MODE_TOL) {
        T::zero()
    } else {
        m + m
    }
}

/// Residuals of a canonical form: `(|R R^T - I|_max, |R K R^T - blocks|_max)`.
pub fn residuals<T: Real>(q: &QuadraticProblem<T>, cf: &CanonicalForm<T>) -> (T, T) {
    let n = q.n;
    let r = &cf.r;
    let mut orth = T::zero();
    for i in 0..n {
        for j in 0..n {
            let v: T = (0..n).map(|m| r[i * n + m] * r[j * n + m]).sum();
            let target = if i == j { T::one() } else { T::zero() };
            orth = orth.max((v - target).abs());
        }
    }
    let mut rk = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            rk[i * n + j] = (0..n).map(|m| r[i * n + m] * q.k[m * n + j]).sum();
        }
    }
    let mut block = T::zero();
    for i in 0..n {
        for j in 0..n {
            let v: T = (0..n).map(|m| rk[i * n + m] * r[j * n + m]).sum();
            let target = if i % 2 == 0 && j == i + 1 {
                cf.eps[i / 2]
            } else if i % 2 == 1 && j + 1 == i {
                -cf.eps[j / 2]
            } else {
                T::zero()
            };
            block = block.max((v - target).abs());
        }
    }
    (orth, block)
}
