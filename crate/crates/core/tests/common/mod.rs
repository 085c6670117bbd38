//! Dense reference matrices built with nalgebra, independent of the crate's own
//! operator application.
#![allow(dead_code)]

use kitaev_vqe::pauli::{Letter, PauliString, PauliSum};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn letter_matrix(l: Letter) -> DMatrix<Complex64> {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match l {
        Letter::I => DMatrix::from_row_slice(2, 2, &[one, o, o, one]),
        Letter::X => DMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        Letter::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Letter::Z => DMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    }
}

/// Dense matrix of a Pauli string; qubit `q` is bit `q` of the basis index,
/// so the Kronecker product runs from the highest qubit down.
pub fn dense_string(p: &PauliString<f64>) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, p.coeff);
    for q in (0..p.n).rev() {
        m = m.kronecker(&letter_matrix(p.letter(q)));
    }
    m
}

pub fn dense_sum(h: &PauliSum<f64>) -> DMatrix<Complex64> {
    let d = 1usize << h.n;
    let mut m = DMatrix::zeros(d, d);
    for t in &h.terms {
        m += dense_string(t);
    }
    m
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Random Pauli string with unit coefficient.
pub fn random_string(n: usize, seed: u64) -> PauliString<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)]);
    }
    p
}

pub fn random_amplitudes(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..1usize << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}
