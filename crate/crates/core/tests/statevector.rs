mod common;

use common::{c, dense_string, dense_sum, random_amplitudes, random_string};
use kitaev_vqe::oracle::{lowest_eigenpairs, SolverMode, SpectrumRequest};
use kitaev_vqe::pauli::{Letter, PauliString, PauliSum};
use kitaev_vqe::statevector::{expectation, zero_state, State};
use kitaev_vqe::{PauliString64, State64};
use nalgebra::{DMatrix, DVector};

fn column(s: &State64) -> DVector<num_complex::Complex64> {
    DVector::from_vec(s.amps.clone())
}

#[test]
fn basis_actions() {
    let mut s: State64 = zero_state(1).unwrap();
    s.apply_pauli(&PauliString::single(1, 0, Letter::X)).unwrap();
    assert_eq!(s.amps, vec![c(0.0, 0.0), c(1.0, 0.0)]);
    s.apply_pauli(&PauliString::single(1, 0, Letter::Z)).unwrap();
    assert_eq!(s.amps, vec![c(0.0, 0.0), c(-1.0, 0.0)]);
    let z = zero_state::<f64>(5).unwrap();
    for q in 0..5 {
        assert_eq!(z.pauli_expectation(&PauliString::single(5, q, Letter::Z)).unwrap(), c(1.0, 0.0));
    }
}

#[test]
fn pauli_action_matches_dense_matrix() {
    for seed in 0..50 {
        let p = random_string(4, seed).scale(c(0.3, -0.7));
        let mut s = State::from_amplitudes(random_amplitudes(4, seed + 99)).unwrap();
        let expected = dense_string(&p) * column(&s);
        s.apply_pauli(&p).unwrap();
        assert!((expected - column(&s)).norm() < 1e-12, "seed {seed}");
    }
}

#[test]
fn rotation_matches_matrix_exponential() {
    for seed in 0..30 {
        let p: PauliString64 = random_string(4, seed);
        let theta = 0.37 * seed as f64 - 2.0;
        let mut s = State::from_amplitudes(random_amplitudes(4, seed + 7)).unwrap();
        let generator: DMatrix<_> = dense_string(&p) * c(0.0, theta);
        let expected = generator.exp() * column(&s);
        s.apply_rotation(&p, theta).unwrap();
        assert!((expected - column(&s)).norm() < 1e-12, "seed {seed}");
    }
}

#[test]
fn rotation_edge_cases() {
    let x = PauliString::single(1, 0, Letter::X);
    let mut s: State64 = zero_state(1).unwrap();
    s.apply_rotation(&x, 0.0).unwrap();
    assert_eq!(s.amps, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    s.apply_rotation(&x, std::f64::consts::FRAC_PI_2).unwrap();
    assert!((s.amps[1] - c(0.0, 1.0)).norm() < 1e-15 && s.amps[0].norm() < 1e-15);
    assert!(s.apply_rotation(&x.scale_re(2.0), 0.1).is_err());
}

#[test]
fn rotation_inverse_and_norm_drift() {
    let mut s = State::from_amplitudes(random_amplitudes(6, 3)).unwrap();
    let start = s.clone();
    let strings: Vec<PauliString64> = (0..1000).map(|i| random_string(6, i)).collect();
    for (i, p) in strings.iter().enumerate() {
        s.apply_rotation(p, 0.001 * i as f64 + 0.3).unwrap();
    }
    assert!((s.norm() - 1.0).abs() < 1e-12);
    for (i, p) in strings.iter().enumerate().rev() {
        s.apply_rotation(p, -(0.001 * i as f64 + 0.3)).unwrap();
    }
    let err = s.amps.iter().zip(&start.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err:e}");
}

#[test]
fn expectation_is_linear_and_exact_on_eigenvectors() {
    let a = PauliSum::from_terms(3, vec![random_string(3, 1), random_string(3, 2).scale_re(0.5)]).unwrap().simplify();
    let b = PauliSum::from_terms(3, vec![random_string(3, 3).scale_re(-1.5)]).unwrap();
    let s = State::from_amplitudes(random_amplitudes(3, 4)).unwrap();
    let combo = a.scale_re(2.0).add(&b.scale_re(-3.0)).unwrap();
    let lhs = expectation(&combo, &s).unwrap();
    let rhs = 2.0 * expectation(&a, &s).unwrap() - 3.0 * expectation(&b, &s).unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
    let dense = dense_sum(&combo);
    let direct = (column(&s).adjoint() * &dense * column(&s))[(0, 0)].re;
    assert!((lhs - direct).abs() < 1e-12);
    for pair in lowest_eigenpairs(&SpectrumRequest { operator: &combo, k: 3, mode: SolverMode::Dense }).unwrap() {
        let v = expectation(&combo, &State::from_amplitudes(pair.vector).unwrap()).unwrap();
        assert!((v - pair.value).abs() < 1e-10);
    }
}

#[test]
fn non_hermitian_expectation_is_rejected() {
    let h = PauliSum::from_terms(1, vec![PauliString::single(1, 0, Letter::Z).scale(c(0.0, 1.0))]).unwrap();
    assert!(expectation::<f64>(&h, &zero_state(1).unwrap()).is_err());
}
