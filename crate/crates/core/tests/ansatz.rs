mod common;

use common::random_amplitudes;
use kitaev_vqe::ansatz::{
    bind, dynamical_counts, dynamical_gauge_ansatz, fixed_gauge_ansatz, fixed_quadratic_count, fixed_quartic_count, prepare, Gate,
};
use kitaev_vqe::hamiltonians::DynamicalLayout;
use kitaev_vqe::lattice::standard_gauge;
use kitaev_vqe::statevector::{zero_state, State};
use kitaev_vqe::{build_lattice, Circuit64, LatticeKind};

#[test]
fn fixed_gauge_parameter_counts() {
    for n in (4..=20).step_by(2) {
        let m = n / 2;
        assert_eq!(fixed_quadratic_count(n), m * (m - 1));
        let quartic = if m >= 4 { n * (m - 1) * (m - 2) * (m - 3) / 24 } else { 0 };
        assert_eq!(fixed_quartic_count(n), quartic);
        let c: Circuit64 = fixed_gauge_ansatz(n, false, false).unwrap();
        assert_eq!(c.parameter_count, fixed_quadratic_count(n));
        if n <= 16 {
            let c: Circuit64 = fixed_gauge_ansatz(n, true, false).unwrap();
            assert_eq!(c.parameter_count, fixed_quadratic_count(n) + fixed_quartic_count(n));
        }
    }
    assert_eq!(fixed_quadratic_count(18) + fixed_quartic_count(18), 324);
    assert!(fixed_gauge_ansatz::<f64>(5, false, false).is_err());
    assert!(fixed_gauge_ansatz::<f64>(2, false, false).is_err());
}

#[test]
fn dynamical_parameter_counts() {
    for (kind, l1, l2) in [(LatticeKind::SquareOctagon, 1, 1), (LatticeKind::Honeycomb, 2, 2), (LatticeKind::SquareOctagon, 2, 1)]
    {
        let lat = build_lattice(kind, l1, l2).unwrap();
        let n = lat.n_sites();
        let (a, b, c) = dynamical_counts(n);
        assert_eq!(a, (n / 2) * (n / 2 - 1));
        assert_eq!(b, (3 * n / 2) * (3 * n / 2 - 1));
        assert_eq!(a + b + c, 2 * n * (2 * n - 1));
        let circuit: Circuit64 = dynamical_gauge_ansatz(&lat).unwrap();
        assert_eq!(circuit.parameter_count, 2 * n * (2 * n - 1));
        assert_eq!(circuit.n_qubits, 2 * n);
    }
}

#[test]
fn zero_parameters_act_as_identity() {
    let c: Circuit64 = fixed_gauge_ansatz(8, true, false).unwrap();
    let psi = prepare(&c, &vec![0.0; c.parameter_count]).unwrap();
    assert_eq!(psi.amps, zero_state::<f64>(4).unwrap().amps);

    let lat = build_lattice(LatticeKind::SquareOctagon, 1, 1).unwrap();
    let layout = DynamicalLayout::new(&lat, standard_gauge(&lat));
    let c: Circuit64 = dynamical_gauge_ansatz(&lat).unwrap();
    let psi = prepare(&c, &vec![0.0; c.parameter_count]).unwrap();
    for e in 0..lat.n_edges() {
        assert!((psi.pauli_expectation(&layout.link::<f64>(e)).unwrap().re - 1.0).abs() < 1e-15);
    }
}

#[test]
fn particle_hole_prefix_flips_parity() {
    let c: Circuit64 = fixed_gauge_ansatz(8, false, true).unwrap();
    assert!(matches!(c.gates[0], Gate::Fixed(_)));
    let psi = prepare(&c, &vec![0.3; c.parameter_count]).unwrap();
    assert!((kitaev_vqe::ansatz::parity(&psi) + 1.0).abs() < 1e-12);
    let even: Circuit64 = fixed_gauge_ansatz(8, true, false).unwrap();
    let psi = prepare(&even, &vec![0.3; even.parameter_count]).unwrap();
    assert!((kitaev_vqe::ansatz::parity(&psi) - 1.0).abs() < 1e-12);
}

#[test]
fn bind_preserves_norm() {
    let c: Circuit64 = fixed_gauge_ansatz(8, true, true).unwrap();
    for seed in 0..5 {
        let theta: Vec<f64> = (0..c.parameter_count).map(|i| ((i as f64 + 1.0) * (seed as f64 + 0.7)).sin()).collect();
        let start = State::from_amplitudes(random_amplitudes(4, seed)).unwrap();
        assert!((bind(&c, &theta, &start).unwrap().norm() - 1.0).abs() < 1e-12);
    }
    assert!(prepare(&c, &[0.0]).is_err());
}

#[test]
fn display_lists_rotations() {
    let c: Circuit64 = fixed_gauge_ansatz(4, false, true).unwrap();
    let text = c.to_string();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fixed XI");
    assert_eq!(lines.len(), 1 + c.rotation_count());
    assert!(lines[1].starts_with("theta[0] * "));
}
