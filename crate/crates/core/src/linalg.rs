//! Dense eigensolvers: Hermitian matrices via Householder reduction to a real
//! symmetric tridiagonal matrix followed by implicit QL iterations, with
//! inverse iteration when only a few eigenvectors are needed.
//!
//! Matrices are row-major `n x n` slices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
///
/// `d` is the diagonal and `e[i] = T[i, i+1]` (length `n - 1`). When `z` is
/// given (row-major `n x n`, usually the identity) it is multiplied on the
/// right by the eigenvector matrix. Eigenvalues are returned ascending.
pub fn tridiagonal_eigen<T: Real>(d: &mut [T], e: &[T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e2 = vec![T::zero(); n];
    e2[..n - 1].copy_from_slice(&e[..n - 1]);
    let e = &mut e2;
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence { what: "tridiagonal QL", residual: e[l].abs().as_f64() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk1 = z[k * n + i + 1];
                            let zk = z[k * n + i];
                            z[k * n + i + 1] = s * zk + c * zk1;
                            z[k * n + i] = c * zk - s * zk1;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    // Selection sort keeps eigenvector columns aligned.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if let Some(z) = z.as_deref_mut() {
                for j in 0..n {
                    z.swap(j * n + i, j * n + k);
                }
            }
        }
    }
    Ok(())
}

/// Result of a Hermitian eigen-decomposition.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    /// Eigenvalues ascending.
    pub values: Vec<T>,
    /// Row-major `n x n`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Option<Vec<C<T>>>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<C<T>> {
        let v = self.vectors.as_ref().expect("vectors requested");
        let n = self.values.len();
        (0..n).map(|i| v[i * n + j]).collect()
    }
}

/// Householder reduction `A = Q T Q^H` with `T` real symmetric tridiagonal.
struct Tridiagonal<T: Real> {
    n: usize,
    d: Vec<T>,
    e: Vec<T>,
    /// Reflector `I - tau v v^H` acting on indices `k+1..n`, `v[0] = 1`.
    reflectors: Vec<(C<T>, Vec<C<T>>)>,
}

impl<T: Real> Tridiagonal<T> {
    fn new(a: &[C<T>], n: usize) -> Self {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let mut a = a.to_vec();
        for i in 0..n {
            for j in i + 1..n {
                a[i * n + j] = a[j * n + i].conj();
            }
        }
        let zero = C::<T>::default();
        let half = T::lit(0.5);
        let mut e = vec![T::zero(); n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
        let mut w = vec![zero; n];
        for k in 0..n.saturating_sub(1) {
            let m = n - k - 1;
            let alpha = a[(k + 1) * n + k];
            let xnorm2: T = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
            if xnorm2 == T::zero() && alpha.im == T::zero() {
                e[k] = alpha.re;
                reflectors.push((zero, Vec::new()));
                continue;
            }
            let mut beta = (alpha.norm_sqr() + xnorm2).sqrt();
            if alpha.re >= T::zero() {
                beta = -beta;
            }
            let tau = Complex::new((beta - alpha.re) / beta, -alpha.im / beta);
            let scale = Complex::new(T::one(), T::zero()) / (alpha - beta);
            let mut v = vec![zero; m];
            v[0] = Complex::new(T::one(), T::zero());
            for i in 1..m {
                v[i] = a[(k + 1 + i) * n + k] * scale;
            }
            e[k] = beta;
            // w = tau A22 v - 0.5 tau (w^H v) v ; A22 -= v w^H + w v^H
            for i in 0..m {
                let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                let mut acc = zero;
                for (x, y) in row.iter().zip(&v) {
                    acc += *x * *y;
                }
                w[i] = acc * tau;
            }
            let mut dot = zero;
            for i in 0..m {
                dot += w[i].conj() * v[i];
            }
            let alpha2 = -(tau * dot) * half;
            for i in 0..m {
                w[i] += alpha2 * v[i];
            }
            for i in 0..m {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                for (j, x) in row.iter_mut().enumerate() {
                    *x -= vi * w[j].conj() + wi * v[j].conj();
                }
            }
            reflectors.push((tau, v));
        }
        let d = (0..n).map(|i| a[i * n + i].re).collect();
        Tridiagonal { n, d, e, reflectors }
    }

    /// `x <- Q x` for a vector in the tridiagonal basis.
    fn back_transform(&self, x: &mut [C<T>]) {
        for (k, (tau, v)) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let tail = &mut x[k + 1..];
            let mut acc = C::<T>::default();
            for (a, b) in v.iter().zip(tail.iter()) {
                acc += a.conj() * *b;
            }
            let t = *tau * acc;
            for (a, b) in tail.iter_mut().zip(v) {
                *a -= t * *b;
            }
        }
    }

    fn q_matrix(&self) -> Vec<C<T>> {
        let n = self.n;
        let mut q = vec![C::<T>::default(); n * n];
        let mut col = vec![C::<T>::default(); n];
        for c in 0..n {
            col.iter_mut().for_each(|x| *x = C::<T>::default());
            col[c] = Complex::new(T::one(), T::zero());
            self.back_transform(&mut col);
            for r in 0..n {
                q[r * n + c] = col[r];
            }
        }
        q
    }
}

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is read).
pub fn hermitian_eigen<T: Real>(a: &[C<T>], n: usize, want_vectors: bool) -> Result<HermitianEigen<T>> {
    let tri = Tridiagonal::new(a, n);
    let mut d = tri.d.clone();
    if !want_vectors {
        tridiagonal_eigen(&mut d, &tri.e, None)?;
        return Ok(HermitianEigen { values: d, vectors: None });
    }
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tridiagonal_eigen(&mut d, &tri.e, Some(&mut z))?;
    let q = tri.q_matrix();
    let zero = C::<T>::default();
    let mut vecs = vec![zero; n * n];
    for r in 0..n {
        for k in 0..n {
            let qrk = q[r * n + k];
            if qrk == zero {
                continue;
            }
            for c in 0..n {
                vecs[r * n + c] += qrk * z[k * n + c];
            }
        }
    }
    Ok(HermitianEigen { values: d, vectors: Some(vecs) })
}

/// Output of [`hermitian_lowest`].
pub type LowestPairs<T> = (Vec<T>, Vec<Vec<C<T>>>);

/// All eigenvalues (ascending) and the eigenvectors of the `k` lowest ones.
///
/// Vectors of the tridiagonal form come from inverse iteration, orthogonalized
/// within clusters of close eigenvalues, so the cost is dominated by the
/// `O(n^3)` reduction.
pub fn hermitian_lowest<T: Real>(a: &[C<T>], n: usize, k: usize) -> Result<LowestPairs<T>> {
    let tri = Tridiagonal::new(a, n);
    let mut values = tri.d.clone();
    tridiagonal_eigen(&mut values, &tri.e, None)?;
    let k = k.min(n);
    let norm = values.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
    let cluster_tol = T::lit(1e-8) * norm.max(T::one());
    let mut found: Vec<Vec<T>> = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = values[j];
        let cluster: Vec<usize> = (0..j).filter(|&i| (values[i] - lambda).abs() <= cluster_tol).collect();
        let mut x = inverse_iteration(&tri.d, &tri.e, lambda, norm, j, |x| {
            for &i in &cluster {
                let p: T = found[i].iter().zip(x.iter()).map(|(a, b)| *a * *b).sum();
                x.iter_mut().zip(&found[i]).for_each(|(y, b)| *y -= p * *b);
            }
        })?;
        let nrm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
        found.push(x);
    }
    let vectors = found
        .into_iter()
        .map(|x| {
            let mut v: Vec<C<T>> = x.into_iter().map(|r| Complex::new(r, T::zero())).collect();
            tri.back_transform(&mut v);
            v
        })
        .collect();
    Ok((values, vectors))
}

/// Solves `(T - mu) x = b` for symmetric tridiagonal `T` by partial-pivot elimination.
fn tridiagonal_solve<T: Real>(d: &[T], e: &[T], mu: T, b: &mut [T], tiny: T) {
    let n = d.len();
    // Rows hold (sub, diag, sup, sup2) after pivoting.
    let mut diag: Vec<T> = d.iter().map(|&x| x - mu).collect();
    let mut sup: Vec<T> = (0..n).map(|i| if i + 1 < n { e[i] } else { T::zero() }).collect();
    let mut sup2 = vec![T::zero(); n];
    let mut sub: Vec<T> = (0..n).map(|i| if i + 1 < n { e[i] } else { T::zero() }).collect();
    for i in 0..n.saturating_sub(1) {
        if sub[i].abs() > diag[i].abs() {
            // Swap rows i and i+1.
            let (d1, s1, t1) = (diag[i], sup[i], sup2[i]);
            diag[i] = sub[i];
            sup[i] = diag[i + 1];
            sup2[i] = if i + 1 < n - 1 { sup[i + 1] } else { T::zero() };
            let f = d1 / diag[i];
            diag[i + 1] = s1 - f * sup[i];
            let next_sup = if i + 1 < n - 1 { t1 - f * sup2[i] } else { T::zero() };
            if i + 1 < n - 1 {
                sup[i + 1] = next_sup;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        } else {
            if diag[i] == T::zero() {
                diag[i] = tiny;
            }
            let f = sub[i] / diag[i];
            diag[i + 1] -= f * sup[i];
            b[i + 1] -= f * b[i];
        }
        sub[i] = T::zero();
    }
    if diag[n - 1] == T::zero() {
        diag[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc -= sup[i] * b[i + 1];
        }
        if i + 2 < n {
            acc -= sup2[i] * b[i + 2];
        }
        let p = if diag[i] == T::zero() { tiny } else { diag[i] };
        b[i] = acc / p;
    }
}

fn inverse_iteration<T: Real>(
    d: &[T],
    e: &[T],
    lambda: T,
    norm: T,
    seed: usize,
    orthogonalize: impl Fn(&mut [T]),
) -> Result<Vec<T>> {
    let n = d.len();
    let eps = T::epsilon();
    let tiny = eps * norm;
    let mu = lambda + tiny * T::lit(10.0);
    // Deterministic, well-spread start vector.
    let mut x: Vec<T> = (0..n)
        .map(|i| {
            let h = (i as u64 + 1)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((seed as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
            T::lit(((h >> 11) as f64 / (1u64 << 53) as f64) - 0.5)
        })
        .collect();
    let mut residual = T::infinity();
    for _ in 0..8 {
        orthogonalize(&mut x);
        let nrm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        if nrm == T::zero() {
            return Err(Error::NoConvergence { what: "inverse iteration", residual: f64::INFINITY });
        }
        x.iter_mut().for_each(|v| *v /= nrm);
        let mut y = x.clone();
        tridiagonal_solve(d, e, mu, &mut y, tiny);
        orthogonalize(&mut y);
        let ny = y.iter().map(|v| *v * *v).sum::<T>().sqrt();
        y.iter_mut().for_each(|v| *v /= ny);
        // Residual |T y - lambda y|.
        residual = (0..n)
            .map(|i| {
                let mut t = (d[i] - lambda) * y[i];
                if i > 0 {
                    t += e[i - 1] * y[i - 1];
                }
                if i + 1 < n {
                    t += e[i] * y[i + 1];
                }
                t * t
            })
            .sum::<T>()
            .sqrt();
        x = y;
        if residual <= T::lit(1e-12) * norm.max(T::one()) {
            return Ok(x);
        }
    }
    if residual <= T::lit(1e-9) * norm.max(T::one()) {
        Ok(x)
    } else {
        Err(Error::NoConvergence { what: "inverse iteration", residual: residual.as_f64() })
    }
}

/// Eigen-decomposition of a real symmetric matrix; returns (ascending values, row-major vectors).
pub fn symmetric_eigen<T: Real>(a: &[T], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let ac: Vec<C<T>> = a.iter().map(|&x| Complex::new(x, T::zero())).collect();
    let eig = hermitian_eigen(&ac, n, true)?;
    let vecs = eig.vectors.expect("vectors").into_iter().map(|z| z.re).collect();
    Ok((eig.values, vecs))
}

/// Determinant of a real square matrix by partial-pivot elimination.
pub fn determinant<T: Real>(a: &[T], n: usize) -> T {
    let mut m = a.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap()).unwrap();
        if m[piv * n + col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for i in col + 1..n {
            let f = m[i * n + col] / p;
            for j in col..n {
                let v = m[col * n + j];
                m[i * n + j] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_hermitian() {
        let a = vec![Complex::new(3.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(-1.0, 0.0)];
        let e: HermitianEigen<f64> = hermitian_eigen(&a, 2, true).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
    }

    #[test]
    fn pauli_y_spectrum() {
        let a = vec![Complex::new(0.0, 0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)];
        let e: HermitianEigen<f64> = hermitian_eigen(&a, 2, true).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v = e.vector(0);
        // Y v = -v
        let yv0 = Complex::new(0.0, -1.0) * v[1];
        assert!((yv0 + v[0]).norm() < 1e-14);
    }

    #[test]
    fn lowest_vectors_match_full_solver_with_degeneracy() {
        // diag(-1, -1, -1, 0, 2, ...) rotated by a fixed unitary-ish mixing.
        let n = 12;
        let mut a = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = Complex::new(if i < 3 { -1.0 } else { i as f64 * 0.5 }, 0.0);
        }
        // Conjugate by a product of Givens-like complex rotations.
        for (p, q, t) in [(0usize, 5usize, 0.3f64), (1, 7, 0.9), (2, 4, -0.4), (3, 11, 1.1), (0, 9, 0.2)] {
            let (c, s) = (t.cos(), Complex::new(0.0, t.sin()));
            let mut b = a.clone();
            for k in 0..n {
                b[p * n + k] = a[p * n + k] * c + a[q * n + k] * s;
                b[q * n + k] = a[p * n + k] * s + a[q * n + k] * c;
            }
            let b2 = b.clone();
            for k in 0..n {
                b[k * n + p] = b2[k * n + p] * c + b2[k * n + q] * s.conj();
                b[k * n + q] = b2[k * n + p] * s.conj() + b2[k * n + q] * c;
            }
            a = b;
        }
        let (values, vectors) = hermitian_lowest::<f64>(&a, n, 4).unwrap();
        let full = hermitian_eigen::<f64>(&a, n, false).unwrap();
        for (x, y) in values.iter().zip(&full.values) {
            assert!((x - y).abs() < 1e-12);
        }
        for (j, v) in vectors.iter().enumerate() {
            for r in 0..n {
                let av: Complex<f64> = (0..n).map(|c| a[r * n + c] * v[c]).sum();
                assert!((av - v[r] * values[j]).norm() < 1e-10);
            }
            for (i, w) in vectors.iter().enumerate() {
                let ip: Complex<f64> = w.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).norm() < 1e-10, "{i} {j} {ip}");
            }
        }
    }

    #[test]
    fn determinant_of_swap() {
        assert_eq!(determinant(&[0.0, 1.0, 1.0, 0.0], 2), -1.0);
        assert_eq!(determinant(&[2.0, 0.0, 0.0, 3.0], 2), 6.0);
    }
}
