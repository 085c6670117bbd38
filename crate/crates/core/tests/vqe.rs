mod common;

use common::random_amplitudes;
use kitaev_vqe::ansatz::{fixed_gauge_ansatz, prepare};
use kitaev_vqe::freefermion::{build_k, canonical_form, ground_energy};
use kitaev_vqe::hamiltonians::{
    dynamical_gauge_hamiltonian, fixed_gauge_hamiltonian, projector, reference_gauge, site_operators, spin_hamiltonian,
    Couplings, DynamicalLayout,
};
use kitaev_vqe::lattice::insert_vortex_pair;
use kitaev_vqe::oracle::{ground_energy_spin, lowest_eigenpairs, SolverMode, SpectrumRequest};
use kitaev_vqe::pauli::PauliSum;
use kitaev_vqe::statevector::{expectation, State};
use kitaev_vqe::vqe::{
    energy_cost, minimize, projected_cost, run_dynamical, run_fixed_gauge, Cost, DynamicalProblem, GradientMethod,
    OptimizerConfig, Variational,
};
use kitaev_vqe::{build_lattice, Couplings64, Error, Lattice, LatticeKind};
use rand::{Rng, SeedableRng};

const S2: f64 = std::f64::consts::SQRT_2;

fn lattice(kind: LatticeKind, l1: usize, l2: usize) -> Lattice {
    build_lattice(kind, l1, l2).unwrap()
}

fn random_theta(n: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn free_fermion_energy(lat: &Lattice, c: &Couplings64) -> f64 {
    let g = reference_gauge(lat, c).unwrap();
    ground_energy(&canonical_form(&build_k(lat, &g, c).unwrap()).unwrap())
}

#[test]
fn zero_angles_give_the_diagonal_part() {
    let lat = lattice(LatticeKind::Honeycomb, 2, 2);
    let c = Couplings64::new([1.0; 3]).with_kappa(0.2, 0.1);
    let h = fixed_gauge_hamiltonian(&lat, &reference_gauge(&lat, &c).unwrap(), &c).unwrap();
    let circuit = fixed_gauge_ansatz(8, true, false).unwrap();
    let e = energy_cost(&h, &circuit, &vec![0.0; circuit.parameter_count]).unwrap();
    let diagonal: f64 = h.terms.iter().filter(|t| t.x == 0).map(|t| t.coeff.re).sum();
    assert!((e - diagonal).abs() < 1e-14);
}

#[test]
fn cost_obeys_the_variational_bound() {
    let lat = lattice(LatticeKind::SquareOctagon, 2, 2);
    let c = Couplings64::new([1.0, 1.0, S2]).with_kappa(0.3, 0.3);
    let h = fixed_gauge_hamiltonian(&lat, &reference_gauge(&lat, &c).unwrap(), &c).unwrap();
    let e0 = lowest_eigenpairs(&SpectrumRequest { operator: &h, k: 1, mode: SolverMode::Dense }).unwrap()[0].value;
    for branch in [false, true] {
        let circuit = fixed_gauge_ansatz(16, true, branch).unwrap();
        for seed in 0..20 {
            let e = energy_cost(&h, &circuit, &random_theta(circuit.parameter_count, seed, 1.0)).unwrap();
            assert!(e >= e0 - 1e-12);
        }
    }
}

#[test]
fn gradient_methods_agree() {
    // Fixed gauge with the particle-hole prefix and quartic block.
    let lat = lattice(LatticeKind::Honeycomb, 2, 2);
    let c = Couplings64::new([1.0, 0.9, 1.1]).with_kappa(0.2, 0.15);
    let h = fixed_gauge_hamiltonian(&lat, &reference_gauge(&lat, &c).unwrap(), &c).unwrap();
    let circuit = fixed_gauge_ansatz(8, true, true).unwrap();
    let fixed_cost = Cost::Energy(h);
    // Dynamical gauge with the projected cost.
    let so = lattice(LatticeKind::SquareOctagon, 1, 1);
    let problem = DynamicalProblem::new(&so, &Couplings64::new([1.0, 1.0, S2]).with_field([0.1, 0.05, 0.08])).unwrap();
    for (circuit, cost, scale) in [(&circuit, &fixed_cost, 1.0), (&problem.circuit, &problem.cost, 0.2)] {
        let theta = random_theta(circuit.parameter_count, 11, scale);
        let grads: Vec<Vec<f64>> = [GradientMethod::Adjoint, GradientMethod::ParameterShift, GradientMethod::FiniteDifference]
            .into_iter()
            .map(|gradient| {
                let cfg = OptimizerConfig { gradient, ..OptimizerConfig::default() };
                let obj = Variational::new(circuit, cost, &cfg).unwrap();
                let (v, g) = match gradient {
                    GradientMethod::Adjoint => obj.adjoint_gradient(&theta).unwrap(),
                    GradientMethod::ParameterShift => obj.shift_gradient(&theta).unwrap(),
                    GradientMethod::FiniteDifference => {
                        let v = cost.evaluate(&prepare(circuit, &theta).unwrap()).unwrap();
                        let f = |x: &[f64]| cost.evaluate(&prepare(circuit, x)?);
                        (v, kitaev_vqe::vqe::finite_difference(f, &theta, cfg.fd_step).unwrap())
                    }
                };
                assert!(v.is_finite());
                g
            })
            .collect();
        for (i, ((a, s), f)) in grads[0].iter().zip(&grads[1]).zip(&grads[2]).enumerate() {
            assert!((a - s).abs() < 1e-9, "adjoint vs shift at {i}: {a} {s}");
            assert!((s - f).abs() < 1e-6, "shift vs finite difference at {i}: {s} {f}");
        }
    }
}

#[test]
fn exactly_solvable_limit_is_reached() {
    let lat = lattice(LatticeKind::Honeycomb, 2, 2);
    for kappa in [0.0, 0.3] {
        let c = Couplings64::new([1.0; 3]).with_kappa(kappa, 0.0);
        let r = run_fixed_gauge(&lat, &reference_gauge(&lat, &c).unwrap(), &c, &OptimizerConfig::default()).unwrap();
        let e0 = free_fermion_energy(&lat, &c);
        assert!(((r.best_energy - e0) / e0).abs() <= 1e-7, "kappa {kappa}: {} vs {e0}", r.best_energy);
        assert!(r.best_energy >= e0 - 1e-9);
    }
}

#[test]
fn multistart_from_random_points_is_consistent() {
    let lat = lattice(LatticeKind::Honeycomb, 2, 2);
    let c = Couplings64::new([1.0; 3]);
    let h = fixed_gauge_hamiltonian(&lat, &reference_gauge(&lat, &c).unwrap(), &c).unwrap();
    let circuit = fixed_gauge_ansatz(8, false, false).unwrap();
    let cost = Cost::Energy(h);
    let cfg = OptimizerConfig::default();
    let obj = Variational::new(&circuit, &cost, &cfg).unwrap();
    let energies: Vec<f64> = (0..5)
        .map(|seed| {
            minimize(
                &obj,
                &random_theta(circuit.parameter_count, seed, std::f64::consts::PI),
                &OptimizerConfig { seed, ..cfg.clone() },
                None,
            )
            .unwrap()
            .f
        })
        .collect();
    for e in &energies {
        assert!((e - energies[0]).abs() < 1e-6, "{energies:?}");
    }
    assert!((energies[0] - free_fermion_energy(&lat, &c)).abs() < 1e-6);
}

#[test]
fn vortex_pair_costs_energy() {
    let lat = lattice(LatticeKind::Honeycomb, 3, 3);
    let c = Couplings64::new([1.0; 3]).with_kappa(0.1, 0.0);
    let cfg = OptimizerConfig::default();
    let reference = reference_gauge(&lat, &c).unwrap();
    let free = run_fixed_gauge(&lat, &reference, &c, &cfg).unwrap();
    let pair = run_fixed_gauge(&lat, &insert_vortex_pair(&lat, &reference, 0, 1).unwrap(), &c, &cfg).unwrap();
    assert!(pair.best_energy > free.best_energy);
}

#[test]
fn projected_cost_on_physical_eigenstates_and_unphysical_states() {
    let lat = lattice(LatticeKind::SquareOctagon, 1, 1);
    let c = Couplings64::new([1.0, 1.0, S2]).with_field([0.05, 0.05, 0.05]);
    let layout = DynamicalLayout::new(&lat, reference_gauge(&lat, &c).unwrap());
    let h = dynamical_gauge_hamiltonian(&lat, &layout, &c).unwrap();
    let p = projector::<f64>(&lat, &layout).unwrap();
    let site_ops = site_operators::<f64>(&lat, &layout).unwrap();
    let cost = Cost::Projected { h: h.clone(), site_ops: site_ops.clone() };
    // Lowest physical eigenstate: ground state of P H P + 100 (1 - P).
    let shift = PauliSum::identity(h.n).add(&p.scale_re(-1.0)).unwrap().scale_re(100.0);
    let op = p.multiply(&h).unwrap().multiply(&p).unwrap().add(&shift).unwrap().simplify();
    let ground = lowest_eigenpairs(&SpectrumRequest { operator: &op, k: 1, mode: SolverMode::Dense }).unwrap().remove(0);
    let psi = State::from_amplitudes(ground.vector).unwrap();
    let energy = expectation(&h, &psi).unwrap();
    assert!((cost.evaluate(&psi).unwrap() - energy).abs() < 1e-10);
    assert!((energy - ground_energy_spin(&lat, &c).unwrap()).abs() < 1e-10);
    // (1 - D_0)/2 maps any state out of the physical subspace.
    let mut phi = State::from_amplitudes(random_amplitudes(h.n, 5)).unwrap();
    let mut d_phi = phi.clone();
    d_phi.apply_pauli(&site_ops[0]).unwrap();
    phi.amps.iter_mut().zip(&d_phi.amps).for_each(|(a, b)| *a = (*a - *b) * 0.5);
    phi.normalize();
    assert!(matches!(cost.evaluate(&phi), Err(Error::DegenerateCost { .. })));
}

#[test]
fn factored_and_symbolic_projection_agree() {
    let lat = lattice(LatticeKind::SquareOctagon, 1, 1);
    let problem = DynamicalProblem::new(&lat, &Couplings64::new([1.0, 1.0, S2]).with_field([0.1, 0.0, 0.2])).unwrap();
    let Cost::Projected { h, .. } = &problem.cost else { unreachable!() };
    let p = projector::<f64>(&lat, &problem.layout).unwrap();
    let theta = random_theta(problem.circuit.parameter_count, 3, 0.3);
    let symbolic = projected_cost(h, &p, &problem.circuit, &theta).unwrap();
    let factored = problem.cost.evaluate(&prepare(&problem.circuit, &theta).unwrap()).unwrap();
    assert!((symbolic - factored).abs() < 1e-12);
}

#[test]
fn dynamical_zero_field_matches_spin_ed() {
    let lat = lattice(LatticeKind::SquareOctagon, 1, 1);
    let c: Couplings<f64> = Couplings::new([1.0, 1.0, S2]);
    let r = run_dynamical(&lat, &c, &OptimizerConfig::default()).unwrap();
    let e = ground_energy_spin(&lat, &c).unwrap();
    assert!((r.best_energy - e).abs() < 1e-6);
    assert!(r.physical_norm.unwrap() > 1e-3);
    assert!((r.w.unwrap() - 1.0).abs() < 1e-6);
    assert!(r.m_z.unwrap().abs() < 1e-6);
    let spin = spin_hamiltonian(&lat, &c);
    assert_eq!(spin.n, lat.n_sites());
}

#[test]
fn large_x_field_suppresses_plaquettes() {
    let lat = lattice(LatticeKind::SquareOctagon, 1, 1);
    let r =
        run_dynamical(&lat, &Couplings64::new([1.0, 1.0, S2]).with_field([5.0, 0.0, 0.0]), &OptimizerConfig::default()).unwrap();
    assert!(r.w.unwrap() < 0.1);
}
