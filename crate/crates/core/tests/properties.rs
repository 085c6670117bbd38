mod common;

use common::{c, eigenvalues, random_amplitudes, random_string};
use kitaev_vqe::freefermion::{canonical_form, residuals, QuadraticProblem};
use kitaev_vqe::linalg::{hermitian_eigen, hermitian_lowest};
use kitaev_vqe::statevector::inner;
use kitaev_vqe::State64;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn antisymmetric(n: usize, entries: &[f64]) -> Vec<f64> {
    let mut k = vec![0.0; n * n];
    let mut it = entries.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = *it.next().unwrap();
            k[i * n + j] = v;
            k[j * n + i] = -v;
        }
    }
    k
}

fn hermitian(n: usize, entries: &[(f64, f64)]) -> Vec<Complex64> {
    let mut a = vec![c(0.0, 0.0); n * n];
    let mut it = entries.iter();
    for i in 0..n {
        for j in i..n {
            let &(re, im) = it.next().unwrap();
            if i == j {
                a[i * n + i] = c(re, 0.0);
            } else {
                a[i * n + j] = c(re, im);
                a[j * n + i] = c(re, -im);
            }
        }
    }
    a
}

fn antisymmetric_case() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=20).prop_flat_map(|half| {
        let n = 2 * half;
        (Just(n), prop::collection::vec(-1.0f64..1.0, n * (n - 1) / 2))
    })
}

fn hermitian_case() -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
    (1usize..=24).prop_flat_map(|n| (Just(n), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * (n + 1) / 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_matches_reference((n, entries) in antisymmetric_case()) {
        let q = QuadraticProblem::new(n, antisymmetric(n, &entries));
        let cf = canonical_form(&q).unwrap();
        let (orth, block) = residuals(&q, &cf);
        prop_assert!(orth < 1e-10, "orthogonality {orth}");
        prop_assert!(block < 1e-10, "block form {block}");
        prop_assert!((cf.det.abs() - 1.0).abs() < 1e-12);
        let ik = DMatrix::from_fn(n, n, |i, j| c(0.0, q.get(i, j)));
        let mut reference = eigenvalues(&ik);
        reference.reverse();
        for (e, r) in cf.eps.iter().zip(&reference) {
            prop_assert!((e - r).abs() < 1e-10, "{e} vs {r}");
        }
    }

    #[test]
    fn hermitian_solvers_match_reference((n, entries) in hermitian_case(), k in 1usize..4) {
        let a = hermitian(n, &entries);
        let reference = eigenvalues(&DMatrix::from_row_slice(n, n, &a));
        let full = hermitian_eigen(&a, n, true).unwrap();
        for (v, r) in full.values.iter().zip(&reference) {
            prop_assert!((v - r).abs() < 1e-10);
        }
        let k = k.min(n);
        let (values, vectors) = hermitian_lowest(&a, n, k).unwrap();
        for (v, r) in values.iter().zip(&reference) {
            prop_assert!((v - r).abs() < 1e-10);
        }
        let m = DMatrix::from_row_slice(n, n, &a);
        for (j, x) in vectors.iter().enumerate() {
            let xv = nalgebra::DVector::from_column_slice(x);
            let residual = (&m * &xv - &xv * c(values[j], 0.0)).norm();
            prop_assert!(residual < 1e-8, "residual {residual}");
            for (l, y) in vectors.iter().enumerate() {
                let o = inner(y, x).norm();
                let target = if l == j { 1.0 } else { 0.0 };
                prop_assert!((o - target).abs() < 1e-8, "overlap {o}");
            }
        }
    }

    #[test]
    fn rotation_then_inverse_is_identity(n in 1usize..7, seed in any::<u64>(), theta in -10.0f64..10.0) {
        let p = random_string(n, seed);
        let psi = State64::from_amplitudes(random_amplitudes(n, seed ^ 1)).unwrap();
        let mut s = psi.clone();
        s.apply_rotation(&p, theta).unwrap();
        s.apply_rotation(&p, -theta).unwrap();
        for (a, b) in s.amps.iter().zip(&psi.amps) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rotations_compose_additively(n in 1usize..7, seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = random_string(n, seed);
        let psi = State64::from_amplitudes(random_amplitudes(n, seed ^ 2)).unwrap();
        let mut two = psi.clone();
        two.apply_rotation(&p, a).unwrap();
        two.apply_rotation(&p, b).unwrap();
        let mut one = psi;
        one.apply_rotation(&p, a + b).unwrap();
        for (x, y) in two.amps.iter().zip(&one.amps) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}
