//! Honeycomb and square-octagon lattices with periodic boundaries, plaquettes,
//! and Z2 gauge configurations.
//!
//! Sites are ordered cell-major (`cell = i1 * L2 + i2`) and basis-minor. Every
//! edge is stored with the orientation of the standard-gauge arrow, so the
//! standard gauge is `u = +1` on every stored edge.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Lattice family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Honeycomb,
    SquareOctagon,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Honeycomb => "honeycomb",
            LatticeKind::SquareOctagon => "square-octagon",
        }
    }

    /// Sites per unit cell.
    pub fn basis_size(self) -> usize {
        match self {
            LatticeKind::Honeycomb => 2,
            LatticeKind::SquareOctagon => 4,
        }
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "honeycomb" => Ok(LatticeKind::Honeycomb),
            "square-octagon" | "square_octagon" => Ok(LatticeKind::SquareOctagon),
            other => Err(format!("unknown lattice kind '{other}'")),
        }
    }
}

/// Bond direction label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeType {
    X,
    Y,
    Z,
}

impl EdgeType {
    pub const ALL: [EdgeType; 3] = [EdgeType::X, EdgeType::Y, EdgeType::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        ['x', 'y', 'z'][self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub cell: (usize, usize),
    pub basis: usize,
}

/// Edge stored as `(a, b)` along the standard-gauge arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub ty: EdgeType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaquetteKind {
    Hexagon,
    Square,
    Octagon,
}

impl PlaquetteKind {
    pub fn name(self) -> &'static str {
        match self {
            PlaquetteKind::Hexagon => "hexagon",
            PlaquetteKind::Square => "square",
            PlaquetteKind::Octagon => "octagon",
        }
    }
}

/// One step `s_k -> s_{k+1}` of a plaquette cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStep {
    pub edge: usize,
    /// `u_{s_{k+1}, s_k} = sign * u_edge`.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaquette {
    pub kind: PlaquetteKind,
    pub sites: Vec<usize>,
    pub steps: Vec<CycleStep>,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub l1: usize,
    pub l2: usize,
    pub sites: Vec<Site>,
    pub edges: Vec<Edge>,
    pub plaquettes: Vec<Plaquette>,
    /// `neighbors[s][t] = (other site, edge index)` for edge type `t`.
    neighbors: Vec<[(usize, usize); 3]>,
}

impl Lattice {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbor of `site` across its `ty` edge, with the edge index.
    pub fn neighbor(&self, site: usize, ty: EdgeType) -> (usize, usize) {
        self.neighbors[site][ty.index()]
    }

    /// Edge index of the `ty` edge incident to `site`.
    pub fn incident_edge(&self, site: usize, ty: EdgeType) -> usize {
        self.neighbors[site][ty.index()].1
    }

    /// Whether flux products over plaquettes are well defined.
    pub fn plaquettes_well_defined(&self) -> bool {
        self.kind == LatticeKind::SquareOctagon || (self.l1 >= 2 && self.l2 >= 2)
    }

    fn check_plaquette(&self, p: usize) -> Result<()> {
        if !self.plaquettes_well_defined() {
            return Err(Error::DegeneratePlaquette);
        }
        if p >= self.plaquettes.len() {
            return Err(Error::IndexOutOfRange { what: "plaquette", index: p, bound: self.plaquettes.len() });
        }
        Ok(())
    }

    /// Edges appearing an odd number of times in the cycle of plaquette `p`.
    pub fn plaquette_edges(&self, p: usize) -> Vec<usize> {
        let mut count = vec![0u8; self.edges.len()];
        for st in &self.plaquettes[p].steps {
            count[st.edge] ^= 1;
        }
        (0..self.edges.len()).filter(|&e| count[e] == 1).collect()
    }

    /// Plaquettes whose flux toggles when edge `e` is flipped.
    pub fn edge_plaquettes(&self, e: usize) -> Vec<usize> {
        (0..self.plaquettes.len()).filter(|&p| self.plaquettes[p].steps.iter().filter(|s| s.edge == e).count() % 2 == 1).collect()
    }

    /// Edge sets whose simultaneous flip moves the gauge to another loop sector
    /// without changing any plaquette flux (one per lattice direction).
    pub fn loop_cuts(&self) -> [Vec<usize>; 2] {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let site = self.sites[e.a];
            let (i1, i2) = site.cell;
            match self.kind {
                LatticeKind::Honeycomb => {
                    if e.ty == EdgeType::X && i1 == 0 {
                        c1.push(k);
                    }
                    if e.ty == EdgeType::Y && i2 == 0 {
                        c2.push(k);
                    }
                }
                LatticeKind::SquareOctagon => {
                    if e.ty == EdgeType::Z && site.basis == 4 && i1 == self.l1 - 1 {
                        c1.push(k);
                    }
                    if e.ty == EdgeType::Z && site.basis == 3 && i2 == self.l2 - 1 {
                        c2.push(k);
                    }
                }
            }
        }
        [c1, c2]
    }

    /// Tab-separated description: one record per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lattice\t{}\t{}\t{}", self.kind.name(), self.l1, self.l2);
        for (i, s) in self.sites.iter().enumerate() {
            let _ = writeln!(out, "site\t{i}\t{}\t{}\t{}", s.cell.0, s.cell.1, s.basis);
        }
        for (k, e) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "edge\t{k}\t{}\t{}\t{}", e.a, e.b, e.ty.letter());
        }
        for (p, pl) in self.plaquettes.iter().enumerate() {
            let sites: Vec<String> = pl.sites.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "plaquette\t{p}\t{}\t{}", pl.kind.name(), sites.join("\t"));
        }
        out
    }
}

/// Z2 link variables, one per stored (oriented) edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaugeConfig {
    pub u: Vec<i8>,
}

impl GaugeConfig {
    pub fn uniform(n_edges: usize) -> Self {
        GaugeConfig { u: vec![1; n_edges] }
    }

    /// `u_{from,to}`: the stored value, negated when read against the arrow.
    pub fn oriented(&self, lattice: &Lattice, e: usize, from: usize, to: usize) -> i8 {
        let edge = lattice.edges[e];
        if edge.a == from && edge.b == to {
            self.u[e]
        } else {
            -self.u[e]
        }
    }

    pub fn flip(&mut self, e: usize) {
        self.u[e] = -self.u[e];
    }

    /// Gauge transformation at `site`: flips the three incident links.
    pub fn gauge_transform(&mut self, lattice: &Lattice, site: usize) {
        for ty in EdgeType::ALL {
            self.flip(lattice.incident_edge(site, ty));
        }
    }

    /// Flips every edge of `lattice.loop_cuts()[dir]`.
    pub fn flip_cut(&mut self, lattice: &Lattice, dir: usize) {
        for &e in &lattice.loop_cuts()[dir] {
            self.flip(e);
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, u) in self.u.iter().enumerate() {
            let _ = writeln!(out, "u\t{k}\t{u}");
        }
        out
    }
}

/// Builds a periodic lattice of `l1 x l2` unit cells.
pub fn build_lattice(kind: LatticeKind, l1: usize, l2: usize) -> Result<Lattice> {
    if l1 == 0 || l2 == 0 {
        return Err(Error::InvalidDimensions { l1, l2, reason: "empty lattice" });
    }
    if kind == LatticeKind::Honeycomb && l1 == 1 && l2 == 1 {
        return Err(Error::InvalidDimensions { l1, l2, reason: "honeycomb 1x1 hexagon repeats edges" });
    }
    let nb = kind.basis_size();
    let cell = |i1: isize, i2: isize| -> usize {
        let a = i1.rem_euclid(l1 as isize) as usize;
        let b = i2.rem_euclid(l2 as isize) as usize;
        a * l2 + b
    };
    let mut sites = Vec::with_capacity(nb * l1 * l2);
    for i1 in 0..l1 {
        for i2 in 0..l2 {
            for t in 0..nb {
                let basis = if kind == LatticeKind::Honeycomb { t } else { t + 1 };
                sites.push(Site { cell: (i1, i2), basis });
            }
        }
    }
    let mut edges = Vec::new();
    let mut plaquettes = Vec::new();
    match kind {
        LatticeKind::Honeycomb => {
            let s = |i1: isize, i2: isize, t: usize| 2 * cell(i1, i2) + t;
            for i1 in 0..l1 as isize {
                for i2 in 0..l2 as isize {
                    let a = s(i1, i2, 0);
                    edges.push(Edge { a, b: s(i1 - 1, i2, 1), ty: EdgeType::X });
                    edges.push(Edge { a, b: s(i1, i2 - 1, 1), ty: EdgeType::Y });
                    edges.push(Edge { a, b: s(i1, i2, 1), ty: EdgeType::Z });
                }
            }
            let e = |i1: isize, i2: isize, k: usize| 3 * cell(i1, i2) + k;
            for i1 in 0..l1 as isize {
                for i2 in 0..l2 as isize {
                    let sites = vec![
                        s(i1, i2, 0),
                        s(i1, i2, 1),
                        s(i1 + 1, i2, 0),
                        s(i1 + 1, i2 - 1, 1),
                        s(i1 + 1, i2 - 1, 0),
                        s(i1, i2 - 1, 1),
                    ];
                    let steps = vec![
                        CycleStep { edge: e(i1, i2, 2), sign: -1 },
                        CycleStep { edge: e(i1 + 1, i2, 0), sign: 1 },
                        CycleStep { edge: e(i1 + 1, i2, 1), sign: -1 },
                        CycleStep { edge: e(i1 + 1, i2 - 1, 2), sign: 1 },
                        CycleStep { edge: e(i1 + 1, i2 - 1, 0), sign: -1 },
                        CycleStep { edge: e(i1, i2, 1), sign: 1 },
                    ];
                    plaquettes.push(Plaquette { kind: PlaquetteKind::Hexagon, sites, steps });
                }
            }
        }
        LatticeKind::SquareOctagon => {
            let s = |i1: isize, i2: isize, t: usize| 4 * cell(i1, i2) + t - 1;
            for i1 in 0..l1 as isize {
                for i2 in 0..l2 as isize {
                    edges.push(Edge { a: s(i1, i2, 1), b: s(i1, i2, 2), ty: EdgeType::Y });
                    edges.push(Edge { a: s(i1, i2, 3), b: s(i1, i2, 4), ty: EdgeType::Y });
                    edges.push(Edge { a: s(i1, i2, 2), b: s(i1, i2, 3), ty: EdgeType::X });
                    edges.push(Edge { a: s(i1, i2, 1), b: s(i1, i2, 4), ty: EdgeType::X });
                    edges.push(Edge { a: s(i1, i2, 4), b: s(i1 + 1, i2, 2), ty: EdgeType::Z });
                    edges.push(Edge { a: s(i1, i2, 3), b: s(i1, i2 + 1, 1), ty: EdgeType::Z });
                }
            }
            let e = |i1: isize, i2: isize, k: usize| 6 * cell(i1, i2) + k;
            for i1 in 0..l1 as isize {
                for i2 in 0..l2 as isize {
                    let square = Plaquette {
                        kind: PlaquetteKind::Square,
                        sites: vec![s(i1, i2, 1), s(i1, i2, 2), s(i1, i2, 3), s(i1, i2, 4)],
                        steps: vec![
                            CycleStep { edge: e(i1, i2, 0), sign: -1 },
                            CycleStep { edge: e(i1, i2, 2), sign: -1 },
                            CycleStep { edge: e(i1, i2, 1), sign: -1 },
                            CycleStep { edge: e(i1, i2, 3), sign: 1 },
                        ],
                    };
                    let octagon = Plaquette {
                        kind: PlaquetteKind::Octagon,
                        sites: vec![
                            s(i1, i2, 4),
                            s(i1 + 1, i2, 2),
                            s(i1 + 1, i2, 3),
                            s(i1 + 1, i2 + 1, 1),
                            s(i1 + 1, i2 + 1, 2),
                            s(i1, i2 + 1, 4),
                            s(i1, i2 + 1, 1),
                            s(i1, i2, 3),
                        ],
                        steps: vec![
                            CycleStep { edge: e(i1, i2, 4), sign: -1 },
                            CycleStep { edge: e(i1 + 1, i2, 2), sign: -1 },
                            CycleStep { edge: e(i1 + 1, i2, 5), sign: -1 },
                            CycleStep { edge: e(i1 + 1, i2 + 1, 0), sign: -1 },
                            CycleStep { edge: e(i1, i2 + 1, 4), sign: 1 },
                            CycleStep { edge: e(i1, i2 + 1, 3), sign: 1 },
                            CycleStep { edge: e(i1, i2, 5), sign: 1 },
                            CycleStep { edge: e(i1, i2, 1), sign: -1 },
                        ],
                    };
                    plaquettes.push(square);
                    plaquettes.push(octagon);
                }
            }
        }
    }
    let mut neighbors = vec![[(usize::MAX, usize::MAX); 3]; sites.len()];
    for (k, e) in edges.iter().enumerate() {
        for (s, o) in [(e.a, e.b), (e.b, e.a)] {
            let slot = &mut neighbors[s][e.ty.index()];
            debug_assert_eq!(slot.0, usize::MAX, "site {s} has two {:?} edges", e.ty);
            *slot = (o, k);
        }
    }
    Ok(Lattice { kind, l1, l2, sites, edges, plaquettes, neighbors })
}

/// The standard gauge: `u = +1` on every edge read along its arrow.
pub fn standard_gauge(lattice: &Lattice) -> GaugeConfig {
    GaugeConfig::uniform(lattice.n_edges())
}

/// Plaquette flux `W_p = -prod_k u_{s_{k+1}, s_k}` around the ordered cycle.
///
/// The overall minus sign applies to every plaquette kind; with the stored
/// orientations the standard gauge gives `+1` everywhere.
pub fn plaquette_flux(lattice: &Lattice, gauge: &GaugeConfig, p: usize) -> Result<i8> {
    lattice.check_plaquette(p)?;
    let prod = lattice.plaquettes[p].steps.iter().fold(1i8, |acc, st| acc * st.sign * gauge.u[st.edge]);
    Ok(-prod)
}

/// Fluxes of all plaquettes.
pub fn fluxes(lattice: &Lattice, gauge: &GaugeConfig) -> Result<Vec<i8>> {
    (0..lattice.plaquettes.len()).map(|p| plaquette_flux(lattice, gauge, p)).collect()
}

/// Edges along the shortest dual path from `p_a` to `p_b`, lowest edge index first at ties.
pub fn dual_path(lattice: &Lattice, p_a: usize, p_b: usize) -> Result<Vec<usize>> {
    lattice.check_plaquette(p_a)?;
    lattice.check_plaquette(p_b)?;
    if p_a == p_b {
        return Err(Error::SamePlaquette(p_a));
    }
    let np = lattice.plaquettes.len();
    let adjacency: Vec<Vec<(usize, usize)>> = (0..np)
        .map(|p| {
            let mut adj = Vec::new();
            for e in lattice.plaquette_edges(p) {
                for q in lattice.edge_plaquettes(e) {
                    if q != p {
                        adj.push((e, q));
                    }
                }
            }
            adj.sort_unstable();
            adj
        })
        .collect();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; np];
    let mut seen = vec![false; np];
    seen[p_a] = true;
    let mut queue = VecDeque::from([p_a]);
    while let Some(p) = queue.pop_front() {
        if p == p_b {
            break;
        }
        for &(e, q) in &adjacency[p] {
            if !seen[q] {
                seen[q] = true;
                parent[q] = Some((p, e));
                queue.push_back(q);
            }
        }
    }
    if !seen[p_b] {
        return Err(Error::NoDualPath(p_a, p_b));
    }
    let mut path = Vec::new();
    let mut cur = p_b;
    while let Some((prev, e)) = parent[cur] {
        path.push(e);
        cur = prev;
    }
    path.reverse();
    Ok(path)
}

/// Flips the links on the shortest dual path between `p_a` and `p_b`,
/// toggling exactly those two fluxes.
pub fn insert_vortex_pair(lattice: &Lattice, gauge: &GaugeConfig, p_a: usize, p_b: usize) -> Result<GaugeConfig> {
    let path = dual_path(lattice, p_a, p_b)?;
    let mut out = gauge.clone();
    for e in path {
        out.flip(e);
    }
    Ok(out)
}
