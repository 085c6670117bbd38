//! Operator builders: spin Hamiltonians, fixed-gauge and dynamical-gauge fermionic
//! Hamiltonians, the physical-subspace projector and observables.
//!
//! Fermionic images are derived from the spin operators by exact Majorana
//! lowering ([`crate::majorana`]), so the signs of the second-neighbor and
//! interaction terms follow from the spin model without extra conventions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::freefermion;
use crate::lattice::{fluxes, EdgeType, GaugeConfig, Lattice};
use crate::majorana::{canonicalize, lower_spin, site_operator, total_site_parity, Lowered, Majorana};
use crate::pauli::{jw_c, jw_majorana, Letter, PauliString, PauliSum};
use crate::scalar::{mul_i_pow, Real, C};

/// Largest spin count for which the projector is expanded.
pub const PROJECTOR_MAX_SPINS: usize = 12;

/// Model parameters: bond couplings, three-spin terms and magnetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings<T: Real> {
    pub j: [T; 3],
    pub kappa: T,
    pub kappa_int: T,
    pub h: [T; 3],
}

impl<T: Real> Couplings<T> {
    pub fn new(j: [T; 3]) -> Self {
        Couplings { j, kappa: T::zero(), kappa_int: T::zero(), h: [T::zero(); 3] }
    }

    pub fn with_kappa(mut self, kappa: T, kappa_int: T) -> Self {
        self.kappa = kappa;
        self.kappa_int = kappa_int;
        self
    }

    pub fn with_field(mut self, h: [T; 3]) -> Self {
        self.h = h;
        self
    }

    pub fn has_field(&self) -> bool {
        self.h.iter().any(|v| *v != T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.j.iter().chain(self.h.iter()).chain([&self.kappa, &self.kappa_int]).all(|v| v.is_finite())
    }
}

/// Neighbors `(i, j, k)` of site `l` across its x, y and z edges, with the sign
/// `n_ijk` of the interaction image `kappa_int n_ijk u_il u_jl u_kl c_i c_j c_k c_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub l: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub n_ijk: i8,
}

/// All triples of a lattice, one per site.
pub fn triples(lattice: &Lattice) -> Result<Vec<Triple>> {
    (0..lattice.n_sites())
        .map(|l| {
            let (i, ei) = lattice.neighbor(l, EdgeType::X);
            let (j, ej) = lattice.neighbor(l, EdgeType::Y);
            let (k, ek) = lattice.neighbor(l, EdgeType::Z);
            let mut n_ijk = 0;
            let distinct = i != j && j != k && i != k;
            if distinct {
                let low: Lowered<f64> =
                    lower_spin(lattice, Complex::new(-1.0, 0.0), &[(i, EdgeType::X), (j, EdgeType::Y), (k, EdgeType::Z)])?;
                // Reorient links to u_{il}, u_{jl}, u_{kl} and reorder c's to (i, j, k, l).
                let mut sign = low.coeff.re;
                for (e, s) in [(ei, i), (ej, j), (ek, k)] {
                    if lattice.edges[e].a != s {
                        sign = -sign;
                    }
                }
                sign *= permutation_sign(&[i, j, k, l]) as f64;
                n_ijk = if sign > 0.0 { 1 } else { -1 };
            }
            Ok(Triple { l, i, j, k, n_ijk })
        })
        .collect()
}

fn permutation_sign(v: &[usize]) -> i32 {
    let mut s = 1;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if v[a] > v[b] {
                s = -s;
            }
        }
    }
    s
}

type SpinTerm<T> = (T, Vec<(usize, EdgeType)>);

/// Gauge-diagonal spin terms (bond and three-spin terms), without the field.
fn spin_terms<T: Real>(lattice: &Lattice, c: &Couplings<T>) -> Vec<SpinTerm<T>> {
    use EdgeType::{X, Y, Z};
    let mut out = Vec::new();
    for e in &lattice.edges {
        let jv = c.j[e.ty.index()];
        if jv != T::zero() {
            out.push((-jv, vec![(e.a, e.ty), (e.b, e.ty)]));
        }
    }
    for l in 0..lattice.n_sites() {
        let i = lattice.neighbor(l, X).0;
        let j = lattice.neighbor(l, Y).0;
        let k = lattice.neighbor(l, Z).0;
        if c.kappa != T::zero() {
            out.push((-c.kappa, vec![(i, X), (j, Y), (l, Z)]));
            out.push((-c.kappa, vec![(i, X), (l, Y), (k, Z)]));
            out.push((-c.kappa, vec![(l, X), (j, Y), (k, Z)]));
        }
        if c.kappa_int != T::zero() {
            out.push((-c.kappa_int, vec![(i, X), (j, Y), (k, Z)]));
        }
    }
    out
}

fn letter(ty: EdgeType) -> Letter {
    match ty {
        EdgeType::X => Letter::X,
        EdgeType::Y => Letter::Y,
        EdgeType::Z => Letter::Z,
    }
}

/// Spin-language Hamiltonian on `N` qubits.
pub fn spin_hamiltonian<T: Real>(lattice: &Lattice, c: &Couplings<T>) -> PauliSum<T> {
    let n = lattice.n_sites();
    let mut sum = PauliSum::zero(n);
    for (coeff, factors) in spin_terms(lattice, c) {
        let mut p = PauliString::identity(n);
        for (s, ty) in factors {
            p = p * PauliString::single(n, s, letter(ty));
        }
        sum.push(p.scale_re(coeff));
    }
    for (a, ty) in EdgeType::ALL.iter().enumerate() {
        if c.h[a] != T::zero() {
            for s in 0..n {
                sum.push(PauliString::single(n, s, letter(*ty)).scale_re(-c.h[a]));
            }
        }
    }
    sum.simplify()
}

/// Plaquette operator `W_p = prod_s sigma^{ext(s)}_s` in spin language.
///
/// Requires a plaquette that visits distinct sites.
pub fn spin_plaquette_operator<T: Real>(lattice: &Lattice, p: usize) -> Result<PauliSum<T>> {
    if p >= lattice.plaquettes.len() {
        return Err(Error::IndexOutOfRange { what: "plaquette", index: p, bound: lattice.plaquettes.len() });
    }
    let pl = &lattice.plaquettes[p];
    let mut sites = pl.sites.clone();
    sites.sort_unstable();
    sites.dedup();
    if sites.len() != pl.sites.len() || !lattice.plaquettes_well_defined() {
        return Err(Error::DegeneratePlaquette);
    }
    let inside: Vec<usize> = pl.steps.iter().map(|s| s.edge).collect();
    let n = lattice.n_sites();
    let mut w = PauliString::identity(n);
    for &s in &pl.sites {
        let ext = EdgeType::ALL
            .into_iter()
            .find(|&t| !inside.contains(&lattice.incident_edge(s, t)))
            .ok_or(Error::DegeneratePlaquette)?;
        w = w * PauliString::single(n, s, letter(ext));
    }
    Ok(PauliSum { n, terms: vec![w] })
}

/// Lowered fermionic terms `(coeff, matter indices)` of the gauge-diagonal part in `gauge`.
pub fn fermionic_terms<T: Real>(lattice: &Lattice, gauge: &GaugeConfig, c: &Couplings<T>) -> Result<Vec<(C<T>, Vec<usize>)>> {
    spin_terms(lattice, c)
        .into_iter()
        .map(|(coeff, factors)| {
            let low = lower_spin(lattice, Complex::new(coeff, T::zero()), &factors)?;
            Ok((low.coeff_in(gauge), low.cs))
        })
        .collect()
}

fn matter_image<T: Real>(coeff: C<T>, cs: &[usize], n_qubits: usize) -> Result<PauliString<T>> {
    let mut p = PauliString::identity(n_qubits).with_coeff(coeff);
    for &s in cs {
        p = p * jw_c(s, n_qubits)?;
    }
    Ok(p)
}

/// Fixed-gauge Hamiltonian on the `N/2` matter qubits.
pub fn fixed_gauge_hamiltonian<T: Real>(lattice: &Lattice, gauge: &GaugeConfig, c: &Couplings<T>) -> Result<PauliSum<T>> {
    if c.has_field() {
        return Err(Error::FieldInFixedGauge);
    }
    let nq = lattice.n_sites() / 2;
    let mut sum = PauliSum::zero(nq);
    for (coeff, cs) in fermionic_terms(lattice, gauge, c)? {
        sum.push(matter_image(coeff, &cs, nq)?);
    }
    Ok(sum.simplify())
}

/// Operator `prod_s D_s` restricted to the gauge sector `gauge`, on the matter qubits.
/// Physical matter states are its `+1` eigenstates.
pub fn fixed_gauge_parity<T: Real>(lattice: &Lattice, gauge: &GaugeConfig) -> Result<PauliString<T>> {
    let low: Lowered<T> = total_site_parity(lattice)?;
    matter_image(low.coeff_in(gauge), &low.cs, lattice.n_sites() / 2)
}

/// Whether the matter vacuum `|0...0>` is physical in the sector `gauge`.
pub fn vacuum_is_physical(lattice: &Lattice, gauge: &GaugeConfig) -> Result<bool> {
    let p: PauliString<f64> = fixed_gauge_parity(lattice, gauge)?;
    debug_assert_eq!(p.x, 0);
    Ok(p.coeff.re > 0.0)
}

/// Vortex-free reference gauge: among the four loop sectors reachable from the
/// standard gauge, the lowest free-fermion energy sector with a physical
/// vacuum, ties broken by sector order `(0,0), (0,1), (1,0), (1,1)`.
pub fn reference_gauge<T: Real>(lattice: &Lattice, c: &Couplings<T>) -> Result<GaugeConfig> {
    let base = crate::lattice::standard_gauge(lattice);
    let quad = Couplings { kappa_int: T::zero(), h: [T::zero(); 3], ..*c };
    let mut best: Option<(bool, f64, GaugeConfig)> = None;
    for f1 in 0..2 {
        for f2 in 0..2 {
            let mut g = base.clone();
            if f1 == 1 {
                g.flip_cut(lattice, 0);
            }
            if f2 == 1 {
                g.flip_cut(lattice, 1);
            }
            let phys = vacuum_is_physical(lattice, &g)?;
            let k = freefermion::build_k(lattice, &g, &quad)?;
            let e0 = freefermion::ground_energy(&freefermion::canonical_form(&k)?).as_f64();
            let better = match &best {
                None => true,
                Some((bp, be, _)) => (phys && !bp) || (phys == *bp && e0 < be - 1e-9),
            };
            if better {
                best = Some((phys, e0, g));
            }
        }
    }
    Ok(best.expect("four sectors").2)
}

/// Qubit layout of the dynamical-gauge representation: matter qubits `0..N/2`,
/// then one gauge qubit per edge. The computational `|0>` of gauge qubit `e`
/// represents the link value `reference.u[e]`.
#[derive(Debug, Clone)]
pub struct DynamicalLayout {
    pub n_spins: usize,
    pub n_qubits: usize,
    pub reference: GaugeConfig,
}

impl DynamicalLayout {
    pub fn new(lattice: &Lattice, reference: GaugeConfig) -> Self {
        let n = lattice.n_sites();
        assert_eq!(reference.u.len(), lattice.n_edges());
        DynamicalLayout { n_spins: n, n_qubits: 2 * n, reference }
    }

    pub fn gauge_qubit(&self, e: usize) -> usize {
        self.n_spins / 2 + e
    }

    /// Jordan-Wigner image of a Majorana operator.
    ///
    /// For edge `e = (a, b)`: `b_a = b^1_e`, `b_b = -u_ref(e) b^2_e`, so that
    /// `u_e = i b_a b_b = u_ref(e) Z_e`.
    pub fn majorana<T: Real>(&self, lattice: &Lattice, m: Majorana) -> Result<PauliString<T>> {
        match m {
            Majorana::C(s) => jw_c(s, self.n_qubits),
            Majorana::B { site, ty } => {
                let e = lattice.incident_edge(site, ty);
                let q = self.gauge_qubit(e);
                if lattice.edges[e].a == site {
                    jw_majorana(q, 0, self.n_qubits)
                } else {
                    let s = -T::from_i8(self.reference.u[e]).expect("sign");
                    Ok(jw_majorana::<T>(q, 1, self.n_qubits)?.scale_re(s))
                }
            }
        }
    }

    /// Spin operator image `i b^ty_s c_s`.
    pub fn sigma<T: Real>(&self, lattice: &Lattice, s: usize, ty: EdgeType) -> Result<PauliString<T>> {
        let b = self.majorana::<T>(lattice, Majorana::B { site: s, ty })?;
        let c = self.majorana::<T>(lattice, Majorana::C(s))?;
        Ok((b * c).scale(Complex::new(T::zero(), T::one())))
    }

    /// Site operator `D_s`.
    pub fn site_operator<T: Real>(&self, lattice: &Lattice, s: usize) -> Result<PauliString<T>> {
        let mut p = PauliString::identity(self.n_qubits);
        for m in site_operator(s) {
            p = p * self.majorana(lattice, m)?;
        }
        Ok(p)
    }

    /// Link operator `u_e` along the stored orientation.
    pub fn link<T: Real>(&self, e: usize) -> PauliString<T> {
        let s = T::from_i8(self.reference.u[e]).expect("sign");
        PauliString::single(self.n_qubits, self.gauge_qubit(e), Letter::Z).scale_re(s)
    }
}

/// Dynamical-gauge Hamiltonian on `2N` qubits (all spin terms mapped through `i b c`).
pub fn dynamical_gauge_hamiltonian<T: Real>(
    lattice: &Lattice,
    layout: &DynamicalLayout,
    c: &Couplings<T>,
) -> Result<PauliSum<T>> {
    let n = lattice.n_sites();
    let mut sum = PauliSum::zero(layout.n_qubits);
    for (coeff, factors) in spin_terms(lattice, c) {
        let mut p = PauliString::identity(layout.n_qubits).scale_re(coeff);
        for (s, ty) in factors {
            p = p * layout.sigma(lattice, s, ty)?;
        }
        sum.push(p);
    }
    for (a, ty) in EdgeType::ALL.iter().enumerate() {
        if c.h[a] != T::zero() {
            for s in 0..n {
                sum.push(layout.sigma::<T>(lattice, s, *ty)?.scale_re(-c.h[a]));
            }
        }
    }
    Ok(sum.simplify())
}

/// The site operators `D_s` of every site.
pub fn site_operators<T: Real>(lattice: &Lattice, layout: &DynamicalLayout) -> Result<Vec<PauliString<T>>> {
    (0..lattice.n_sites()).map(|s| layout.site_operator(lattice, s)).collect()
}

/// Projector `prod_s (1 + D_s)/2`, expanded exactly.
pub fn projector<T: Real>(lattice: &Lattice, layout: &DynamicalLayout) -> Result<PauliSum<T>> {
    let n = lattice.n_sites();
    if n > PROJECTOR_MAX_SPINS {
        return Err(Error::ProjectorCap { n, max: PROJECTOR_MAX_SPINS });
    }
    let half = T::lit(0.5);
    let mut p = PauliSum::identity(layout.n_qubits);
    for d in site_operators::<T>(lattice, layout)? {
        let factor =
            PauliSum { n: layout.n_qubits, terms: vec![PauliString::identity(layout.n_qubits).scale_re(half), d.scale_re(half)] };
        p = p.multiply(&factor)?;
    }
    Ok(p)
}

/// Observables in the dynamical-gauge representation.
#[derive(Debug, Clone)]
pub struct Observables<T: Real> {
    /// `(1/N) sum_s sigma^z_s`.
    pub m_z: PauliSum<T>,
    /// One operator per plaquette: `-prod_k u_{s_{k+1}, s_k}`.
    pub plaquettes: Vec<PauliSum<T>>,
    /// `sigma[s][a]` for site `s` and direction `a`.
    pub sigma: Vec<[PauliString<T>; 3]>,
}

impl<T: Real> Observables<T> {
    /// Average of all plaquette operators.
    pub fn plaquette_average(&self) -> PauliSum<T> {
        let n = self.m_z.n;
        let mut w = PauliSum::zero(n);
        let inv = T::one() / T::from_usize(self.plaquettes.len()).expect("count");
        for p in &self.plaquettes {
            for t in &p.terms {
                w.push(t.scale_re(inv));
            }
        }
        w.simplify()
    }
}

pub fn observables<T: Real>(lattice: &Lattice, layout: &DynamicalLayout) -> Result<Observables<T>> {
    let n = lattice.n_sites();
    let mut sigma = Vec::with_capacity(n);
    for s in 0..n {
        sigma.push([
            layout.sigma(lattice, s, EdgeType::X)?,
            layout.sigma(lattice, s, EdgeType::Y)?,
            layout.sigma(lattice, s, EdgeType::Z)?,
        ]);
    }
    let inv = T::one() / T::from_usize(n).expect("count");
    let m_z = PauliSum { n: layout.n_qubits, terms: sigma.iter().map(|s| s[2].scale_re(inv)).collect() }.simplify();
    let mut plaquettes = Vec::new();
    for pl in &lattice.plaquettes {
        let mut w = PauliString::identity(layout.n_qubits).scale_re(-T::one());
        for st in &pl.steps {
            w = w * layout.link::<T>(st.edge).scale_re(T::from_i8(st.sign).expect("sign"));
        }
        plaquettes.push(PauliSum { n: layout.n_qubits, terms: vec![w] });
    }
    Ok(Observables { m_z, plaquettes, sigma })
}

/// Sum of spin Paulis `(1/N) sum_s sigma^z_s` on the spin register.
pub fn spin_magnetization<T: Real>(lattice: &Lattice) -> PauliSum<T> {
    let n = lattice.n_sites();
    let inv = T::one() / T::from_usize(n).expect("count");
    PauliSum { n, terms: (0..n).map(|s| PauliString::single(n, s, Letter::Z).scale_re(inv)).collect() }
}

/// Spin-language plaquette operators, via the bond-product form valid for any cycle.
///
/// `prod_k sigma^{t_k}_{s_k} sigma^{t_k}_{s_{k+1}}` over the cycle lowers to a pure
/// link product; it is rescaled so that it equals `-prod_k u_{s_{k+1}, s_k}`.
pub fn spin_plaquette_operators<T: Real>(lattice: &Lattice) -> Result<Vec<PauliSum<T>>> {
    let n = lattice.n_sites();
    let mut out = Vec::new();
    for pl in &lattice.plaquettes {
        let mut factors = Vec::new();
        let mut seq = Vec::new();
        let mut coeff = Complex::new(T::one(), T::zero());
        let mut target = -1i32;
        for (k, st) in pl.steps.iter().enumerate() {
            let e = lattice.edges[st.edge];
            let (from, to) = (pl.sites[k], pl.sites[(k + 1) % pl.sites.len()]);
            factors.push((from, e.ty));
            factors.push((to, e.ty));
            for s in [from, to] {
                seq.push(Majorana::B { site: s, ty: e.ty });
                seq.push(Majorana::C(s));
                coeff = mul_i_pow(coeff, 1);
            }
            target *= st.sign as i32;
        }
        // Bonds pair along the cycle and every c appears twice, so no dressing is needed.
        let low: Lowered<T> = canonicalize(lattice, coeff, &seq)?;
        if !low.cs.is_empty() {
            return Err(Error::NotGaugeDiagonal);
        }
        // prod(bonds) = coeff * prod u (each link once per odd multiplicity); W = target * prod u.
        let scale = Complex::new(T::from_i32(target).expect("sign"), T::zero()) / low.coeff;
        let mut p = PauliString::identity(n).with_coeff(scale);
        for (s, ty) in factors {
            p = p * PauliString::single(n, s, letter(ty));
        }
        out.push(PauliSum { n, terms: vec![p] }.simplify());
    }
    Ok(out)
}

/// Checks that every plaquette in `gauge` carries flux `+1`.
pub fn is_vortex_free(lattice: &Lattice, gauge: &GaugeConfig) -> Result<bool> {
    Ok(fluxes(lattice, gauge)?.iter().all(|&f| f == 1))
}
