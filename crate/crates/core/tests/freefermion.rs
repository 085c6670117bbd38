mod common;

use common::{dense_sum, eigenvalues};
use kitaev_vqe::freefermion::{build_k, canonical_form, ground_energy, parity_splitting, residuals, QuadraticProblem};
use kitaev_vqe::hamiltonians::{fixed_gauge_hamiltonian, reference_gauge};
use kitaev_vqe::lattice::{insert_vortex_pair, standard_gauge};
use kitaev_vqe::{build_lattice, CanonicalForm64, Couplings64, LatticeKind, QuadraticProblem64};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Nonnegative eigenvalues of `iK`, ascending; the spectrum is `+-e_n`.
fn reference_energies(q: &QuadraticProblem64) -> Vec<f64> {
    let m = DMatrix::from_fn(q.n, q.n, |i, j| Complex64::new(0.0, q.get(i, j)));
    let mut e: Vec<f64> = eigenvalues(&m).into_iter().filter(|v| *v > -1e-12).collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn two_by_two_blocks() {
    let cf: CanonicalForm64 = canonical_form(&QuadraticProblem::new(2, vec![0.0, 1.0, -1.0, 0.0])).unwrap();
    assert_eq!(cf.eps, vec![1.0]);
    assert_eq!(cf.det, 1.0);
    let cf: CanonicalForm64 = canonical_form(&QuadraticProblem::new(2, vec![0.0, -1.0, 1.0, 0.0])).unwrap();
    assert_eq!(cf.eps, vec![1.0]);
    assert_eq!(cf.det, -1.0);
}

#[test]
fn honeycomb_k_structure() {
    let lat = build_lattice(LatticeKind::Honeycomb, 2, 2).unwrap();
    let k = build_k(&lat, &standard_gauge(&lat), &Couplings64::new([1.0; 3])).unwrap();
    assert_eq!(k.nonzero_count(), 24);
    for i in 0..k.n {
        for j in 0..k.n {
            assert_eq!(k.get(i, j), -k.get(j, i));
        }
    }
}

#[test]
fn vortex_pair_changes_two_entries_per_flipped_edge() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let std = standard_gauge(&lat);
    let g = insert_vortex_pair(&lat, &std, 0, 4).unwrap();
    let flipped = g.u.iter().zip(&std.u).filter(|(a, b)| a != b).count();
    let c = Couplings64::new([1.0; 3]);
    let a = build_k(&lat, &std, &c).unwrap();
    let b = build_k(&lat, &g, &c).unwrap();
    let changed = a.k.iter().zip(&b.k).filter(|(x, y)| x != y).count();
    assert_eq!(changed, 2 * flipped);
}

#[test]
fn ground_energy_matches_fixed_gauge_ed() {
    let s2 = std::f64::consts::SQRT_2;
    for (kind, l1, l2, j, kappa) in [
        (LatticeKind::Honeycomb, 2, 2, [1.0; 3], 0.0),
        (LatticeKind::Honeycomb, 2, 2, [1.0, 0.5, 1.5], 0.3),
        (LatticeKind::SquareOctagon, 2, 2, [1.0, 1.0, s2], 0.0),
        (LatticeKind::SquareOctagon, 1, 1, [1.0, 1.0, s2], 0.25),
    ] {
        let lat = build_lattice(kind, l1, l2).unwrap();
        let g = standard_gauge(&lat);
        let c = Couplings64::new(j).with_kappa(kappa, 0.0);
        let e0 = ground_energy(&canonical_form(&build_k(&lat, &g, &c).unwrap()).unwrap());
        let ed = eigenvalues(&dense_sum(&fixed_gauge_hamiltonian(&lat, &g, &c).unwrap()))[0];
        assert!((e0 - ed).abs() < 1e-10, "{kind:?} {l1}x{l2}: {e0} vs {ed}");
    }
}

#[test]
fn energy_is_linear_in_k() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let g = standard_gauge(&lat);
    let e1 = ground_energy(
        &canonical_form(&build_k(&lat, &g, &Couplings64::new([1.0, 0.8, 0.6]).with_kappa(0.2, 0.0)).unwrap()).unwrap(),
    );
    let e3 = ground_energy(
        &canonical_form(&build_k(&lat, &g, &Couplings64::new([3.0, 2.4, 1.8]).with_kappa(0.6, 0.0)).unwrap()).unwrap(),
    );
    assert!((3.0 * e1 - e3).abs() < 1e-10);
}

#[test]
fn splitting_matches_independent_eigensolver() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let c = Couplings64::new([1.0; 3]).with_kappa(0.2, 0.0);
    for g in [standard_gauge(&lat), insert_vortex_pair(&lat, &standard_gauge(&lat), 0, 1).unwrap()] {
        let k = build_k(&lat, &g, &c).unwrap();
        let cf = canonical_form(&k).unwrap();
        let reference = reference_energies(&k);
        assert!((parity_splitting(&cf) - 2.0 * reference[0]).abs() < 1e-10);
        let mut eps = cf.eps.clone();
        eps.sort_by(f64::total_cmp);
        for (n, e) in eps.iter().enumerate() {
            assert!((e - reference[n]).abs() < 1e-10);
        }
    }
}

#[test]
fn adjacent_vortex_splitting_has_a_minimum_near_0_4() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let grid: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let s: Vec<f64> = grid
        .iter()
        .map(|&k| {
            let c = Couplings64::new([1.0; 3]).with_kappa(k, 0.0);
            let g = insert_vortex_pair(&lat, &reference_gauge(&lat, &c).unwrap(), 0, 1).unwrap();
            parity_splitting(&canonical_form(&build_k(&lat, &g, &c).unwrap()).unwrap())
        })
        .collect();
    let argmin = (0..s.len()).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    assert!(argmin > 0 && argmin < s.len() - 1);
    assert!((0.3..=0.5).contains(&grid[argmin]), "argmin {}", grid[argmin]);
}

#[test]
fn canonical_form_residuals_are_small() {
    let lat = build_lattice(LatticeKind::SquareOctagon, 2, 2).unwrap();
    let k = build_k(&lat, &standard_gauge(&lat), &Couplings64::new([1.0, 1.0, 1.4]).with_kappa(0.3, 0.0)).unwrap();
    let (orth, block) = residuals(&k, &canonical_form(&k).unwrap());
    assert!(orth < 1e-12 && block < 1e-12, "{orth:e} {block:e}");
}
