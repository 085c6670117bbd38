use kitaev_vqe::lattice::{fluxes, insert_vortex_pair, standard_gauge, PlaquetteKind};
use kitaev_vqe::{build_lattice, LatticeKind};

#[test]
fn site_edge_and_plaquette_counts() {
    let hc = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    assert_eq!((hc.n_sites(), hc.n_edges(), hc.plaquettes.len()), (18, 27, 9));
    assert!(hc.plaquettes.iter().all(|p| p.kind == PlaquetteKind::Hexagon));

    let so = build_lattice(LatticeKind::SquareOctagon, 1, 1).unwrap();
    assert_eq!((so.n_sites(), so.n_edges()), (4, 6));

    let so = build_lattice(LatticeKind::SquareOctagon, 2, 2).unwrap();
    assert_eq!((so.n_sites(), so.n_edges()), (16, 24));
    let squares = so.plaquettes.iter().filter(|p| p.kind == PlaquetteKind::Square).count();
    let octagons = so.plaquettes.iter().filter(|p| p.kind == PlaquetteKind::Octagon).count();
    assert_eq!((squares, octagons), (4, 4));
    assert_eq!(so.n_edges(), 3 * so.n_sites() / 2);
}

#[test]
fn every_site_is_trivalent() {
    for (kind, l1, l2) in [(LatticeKind::Honeycomb, 2, 3), (LatticeKind::SquareOctagon, 2, 1)] {
        let lat = build_lattice(kind, l1, l2).unwrap();
        let mut degree = vec![0; lat.n_sites()];
        for e in &lat.edges {
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        assert!(degree.iter().all(|&d| d == 3), "{kind:?}");
    }
}

#[test]
fn standard_gauge_is_vortex_free() {
    for (kind, l1, l2) in [(LatticeKind::Honeycomb, 2, 2), (LatticeKind::SquareOctagon, 1, 1), (LatticeKind::SquareOctagon, 2, 2)]
    {
        let lat = build_lattice(kind, l1, l2).unwrap();
        assert!(fluxes(&lat, &standard_gauge(&lat)).unwrap().iter().all(|&w| w == 1), "{kind:?}");
    }
}

#[test]
fn flipping_all_links_keeps_fluxes() {
    for (kind, l1, l2) in [(LatticeKind::Honeycomb, 3, 3), (LatticeKind::SquareOctagon, 2, 2)] {
        let lat = build_lattice(kind, l1, l2).unwrap();
        let mut g = standard_gauge(&lat);
        for e in 0..lat.n_edges() {
            g.flip(e);
        }
        assert_eq!(fluxes(&lat, &g).unwrap(), fluxes(&lat, &standard_gauge(&lat)).unwrap());
    }
}

#[test]
fn single_flip_marks_both_adjacent_hexagons() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    for e in 0..lat.n_edges() {
        let mut g = standard_gauge(&lat);
        g.flip(e);
        let adjacent = lat.edge_plaquettes(e);
        assert_eq!(adjacent.len(), 2);
        for (p, w) in fluxes(&lat, &g).unwrap().into_iter().enumerate() {
            assert_eq!(w, if adjacent.contains(&p) { -1 } else { 1 }, "edge {e} plaquette {p}");
        }
    }
}

#[test]
fn vortex_pair_census_and_involution() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let std = standard_gauge(&lat);
    for pb in 1..lat.plaquettes.len() {
        let g = insert_vortex_pair(&lat, &std, 0, pb).unwrap();
        let w = fluxes(&lat, &g).unwrap();
        assert_eq!(w.iter().filter(|&&x| x == -1).count(), 2);
        assert_eq!((w[0], w[pb]), (-1, -1));
        assert_eq!(insert_vortex_pair(&lat, &g, 0, pb).unwrap(), std);
    }
}

#[test]
fn adjacent_vortices_flip_one_edge() {
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    let std = standard_gauge(&lat);
    let neighbors: Vec<usize> = lat.plaquette_edges(0).iter().flat_map(|&e| lat.edge_plaquettes(e)).filter(|&p| p != 0).collect();
    assert!(!neighbors.is_empty());
    for pb in neighbors {
        let g = insert_vortex_pair(&lat, &std, 0, pb).unwrap();
        assert_eq!(g.u.iter().zip(&std.u).filter(|(a, b)| a != b).count(), 1);
    }
}

#[test]
fn rejects_degenerate_requests() {
    assert!(build_lattice(LatticeKind::Honeycomb, 1, 1).is_err());
    assert!(build_lattice(LatticeKind::SquareOctagon, 0, 2).is_err());
    let lat = build_lattice(LatticeKind::Honeycomb, 3, 3).unwrap();
    assert!(insert_vortex_pair(&lat, &standard_gauge(&lat), 2, 2).is_err());
    assert!(insert_vortex_pair(&lat, &standard_gauge(&lat), 0, 99).is_err());
}
