//! Exact-diagonalization reference: dense Hermitian solver for small registers
//! and a matrix-free Lanczos solver for larger ones.
//!
//! Operator action goes through [`crate::statevector::apply_sum_into`], so the
//! oracle and the simulator share one Pauli semantics.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonians::{spin_hamiltonian, Couplings};
use crate::lattice::Lattice;
use crate::linalg::{hermitian_eigen, hermitian_lowest, tridiagonal_eigen};
use crate::pauli::PauliSum;
use crate::scalar::{Real, C};
use crate::statevector::{apply_sum_into, inner};

/// Largest register for the dense solver.
pub const DENSE_MAX_QUBITS: usize = 12;
/// Largest register for the iterative solver.
pub const ITERATIVE_MAX_QUBITS: usize = 20;
/// Registers up to this size use the dense solver in [`SolverMode::Auto`].
pub const AUTO_DENSE_QUBITS: usize = 10;
/// Postcondition on `|Hv - lambda v|`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Eigenvalues closer than this to the lowest one form the ground manifold.
pub const DEGENERACY_TOL: f64 = 1e-8;

const LANCZOS_SEED: u64 = 0x5e_ed1a_2c05;
const LANCZOS_MEMORY_BYTES: usize = 512 << 20;
const LANCZOS_MAX_RESTARTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    Dense,
    Iterative,
    Auto,
}

/// Request for the `k` lowest eigenpairs of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectrumRequest<'a, T: Real> {
    pub operator: &'a PauliSum<T>,
    pub k: usize,
    pub mode: SolverMode,
}

#[derive(Debug, Clone)]
pub struct Eigenpair<T: Real> {
    pub value: T,
    pub vector: Vec<C<T>>,
}

/// Dense row-major matrix of a Pauli sum.
pub fn to_dense<T: Real>(h: &PauliSum<T>) -> Result<Vec<C<T>>> {
    if h.n > DENSE_MAX_QUBITS {
        return Err(Error::QubitLimit { n: h.n, max: DENSE_MAX_QUBITS });
    }
    let dim = 1usize << h.n;
    let mut m = vec![C::default(); dim * dim];
    let mut col = vec![C::default(); dim];
    let mut e = vec![C::default(); dim];
    for j in 0..dim {
        e.iter_mut().for_each(|v| *v = C::default());
        e[j] = Complex::new(T::one(), T::zero());
        col.iter_mut().for_each(|v| *v = C::default());
        apply_sum_into(h, &e, &mut col);
        for i in 0..dim {
            m[i * dim + j] = col[i];
        }
    }
    Ok(m)
}

fn check_hermitian<T: Real>(h: &PauliSum<T>) -> Result<()> {
    let imag = h.max_imag();
    if imag > T::lit(1e-10) {
        return Err(Error::NonHermitian { imag: imag.as_f64() });
    }
    Ok(())
}

fn residual<T: Real>(h: &PauliSum<T>, value: T, v: &[C<T>]) -> T {
    let mut hv = vec![C::default(); v.len()];
    apply_sum_into(h, v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| (*a - *b * value).norm_sqr()).sum::<T>().sqrt()
}

/// The `k` lowest eigenpairs, eigenvalues ascending, each with a verified residual.
pub fn lowest_eigenpairs<T: Real>(req: &SpectrumRequest<T>) -> Result<Vec<Eigenpair<T>>> {
    let h = req.operator;
    check_hermitian(h)?;
    let dim = 1usize << h.n;
    let k = req.k.min(dim);
    let dense = match req.mode {
        SolverMode::Dense => true,
        SolverMode::Iterative => false,
        SolverMode::Auto => h.n <= AUTO_DENSE_QUBITS,
    };
    let pairs = if dense { dense_pairs(h, k)? } else { lanczos_pairs(h, k)? };
    let tol = T::lit(RESIDUAL_TOL);
    for p in &pairs {
        let r = residual(h, p.value, &p.vector);
        if r > tol {
            return Err(Error::NoConvergence { what: "eigenpair residual", residual: r.as_f64() });
        }
    }
    Ok(pairs)
}

fn dense_pairs<T: Real>(h: &PauliSum<T>, k: usize) -> Result<Vec<Eigenpair<T>>> {
    let m = to_dense(h)?;
    let dim = 1usize << h.n;
    let (values, vectors) = hermitian_lowest(&m, dim, k)?;
    Ok(values.into_iter().zip(vectors).map(|(value, vector)| Eigenpair { value, vector }).collect())
}

/// All eigenvalues of a small operator, ascending (dense solver).
pub fn spectrum<T: Real>(h: &PauliSum<T>) -> Result<Vec<T>> {
    check_hermitian(h)?;
    let m = to_dense(h)?;
    Ok(hermitian_eigen(&m, 1usize << h.n, false)?.values)
}

fn orthogonalize<T: Real>(v: &mut [C<T>], basis: &[Vec<C<T>>]) {
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= *y * p);
        }
    }
}

fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
}

fn scale<T: Real>(v: &mut [C<T>], s: T) {
    v.iter_mut().for_each(|a| *a *= s);
}

/// Lanczos with full reorthogonalization, explicit restarts from the current
/// Ritz vector and deflation against already converged eigenvectors.
fn lanczos_pairs<T: Real>(h: &PauliSum<T>, k: usize) -> Result<Vec<Eigenpair<T>>> {
    if h.n > ITERATIVE_MAX_QUBITS {
        return Err(Error::QubitLimit { n: h.n, max: ITERATIVE_MAX_QUBITS });
    }
    let dim = 1usize << h.n;
    let per_vec = dim * std::mem::size_of::<C<T>>();
    let m_max = (LANCZOS_MEMORY_BYTES / per_vec).clamp(20, 150).min(dim);
    let hnorm = T::one().max(h.norm1());
    let tol = T::lit(RESIDUAL_TOL * 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut found: Vec<Eigenpair<T>> = Vec::new();
    let mut locked: Vec<Vec<C<T>>> = Vec::new();
    while found.len() < k {
        let mut v: Vec<C<T>> =
            (0..dim).map(|_| Complex::new(T::lit(rng.gen::<f64>() - 0.5), T::lit(rng.gen::<f64>() - 0.5))).collect();
        orthogonalize(&mut v, &locked);
        let nv = norm(&v);
        scale(&mut v, T::one() / nv);
        let mut converged = None;
        let mut last_res = T::infinity();
        for _ in 0..LANCZOS_MAX_RESTARTS {
            let (theta, x) = lanczos_cycle(h, &v, &locked, m_max, hnorm)?;
            let r = residual(h, theta, &x);
            last_res = r;
            if r <= tol {
                converged = Some(Eigenpair { value: theta, vector: x });
                break;
            }
            v = x;
        }
        let pair = converged.ok_or(Error::NoConvergence { what: "Lanczos", residual: last_res.as_f64() })?;
        locked.push(pair.vector.clone());
        found.push(pair);
    }
    found.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite eigenvalues"));
    Ok(found)
}

/// One Lanczos cycle from `v0`; returns the lowest Ritz pair.
fn lanczos_cycle<T: Real>(h: &PauliSum<T>, v0: &[C<T>], locked: &[Vec<C<T>>], m_max: usize, hnorm: T) -> Result<(T, Vec<C<T>>)> {
    let dim = v0.len();
    let mut basis: Vec<Vec<C<T>>> = vec![v0.to_vec()];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let breakdown = T::lit(1e-12) * hnorm;
    let mut prev_theta = T::infinity();
    let (theta, y) = loop {
        let j = basis.len() - 1;
        let mut w = vec![C::default(); dim];
        apply_sum_into(h, &basis[j], &mut w);
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, locked);
        let b = norm(&w);
        let m = alpha.len();
        let full = m >= m_max || m >= dim - locked.len();
        let check = full || b <= breakdown || m.is_multiple_of(5);
        if check {
            let mut d = alpha.clone();
            let mut z = vec![T::zero(); m * m];
            for i in 0..m {
                z[i * m + i] = T::one();
            }
            tridiagonal_eigen(&mut d, &beta, Some(&mut z))?;
            let y: Vec<T> = (0..m).map(|i| z[i * m]).collect();
            let est = b * y[m - 1].abs();
            let settled = (d[0] - prev_theta).abs() <= T::lit(1e-14) * hnorm;
            prev_theta = d[0];
            if full || b <= breakdown || est <= T::lit(RESIDUAL_TOL * 1e-3) || settled {
                break (d[0], y);
            }
        }
        scale(&mut w, T::one() / b);
        beta.push(b);
        basis.push(w);
    };
    let mut x = vec![C::default(); dim];
    for (coef, vec) in y.iter().zip(&basis) {
        x.iter_mut().zip(vec).for_each(|(xi, vi)| *xi += *vi * *coef);
    }
    orthogonalize(&mut x, locked);
    let nx = norm(&x);
    scale(&mut x, T::one() / nx);
    Ok((theta, x))
}

/// Ground energy and an orthonormal basis of the ground manifold
/// (eigenvalues within [`DEGENERACY_TOL`] of the lowest).
pub fn ground_manifold<T: Real>(h: &PauliSum<T>, mode: SolverMode, max_states: usize) -> Result<(T, Vec<Vec<C<T>>>)> {
    let tol = T::lit(DEGENERACY_TOL);
    let mut k = 2usize.min(max_states.max(1));
    loop {
        let pairs = lowest_eigenpairs(&SpectrumRequest { operator: h, k, mode })?;
        let e0 = pairs[0].value;
        let count = pairs.iter().take_while(|p| p.value - e0 <= tol).count();
        if count < pairs.len() || k >= max_states || k >= (1usize << h.n) {
            return Ok((e0, pairs.into_iter().take(count).map(|p| p.vector).collect()));
        }
        k = (2 * k).min(max_states);
    }
}

/// `1 - sum_k |<v_k|psi>|^2` over an orthonormal manifold; `psi` is normalized first.
pub fn infidelity<T: Real>(manifold: &[Vec<C<T>>], psi: &[C<T>]) -> T {
    let np = norm(psi);
    let f: T = manifold.iter().map(|v| inner(v, psi).norm_sqr()).sum::<T>() / (np * np);
    (T::one() - f).max(T::zero())
}

/// Average of `<v|O|v>` over an orthonormal manifold (trace of the projected operator per state).
pub fn manifold_average<T: Real>(op: &PauliSum<T>, manifold: &[Vec<C<T>>]) -> T {
    let dim = 1usize << op.n;
    let mut total = T::zero();
    for v in manifold {
        let mut ov = vec![C::default(); dim];
        apply_sum_into(op, v, &mut ov);
        total += inner(v, &ov).re;
    }
    total / T::from_usize(manifold.len()).expect("count")
}

/// Ground energy of the spin Hamiltonian.
pub fn ground_energy_spin<T: Real>(lattice: &Lattice, couplings: &Couplings<T>) -> Result<T> {
    let h = spin_hamiltonian(lattice, couplings);
    Ok(lowest_eigenpairs(&SpectrumRequest { operator: &h, k: 1, mode: SolverMode::Auto })?[0].value)
}
