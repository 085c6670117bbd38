//! Exact rewriting of gauge-diagonal spin operators in the Majorana representation
//! `sigma^a_s = i b^a_s c_s`.
//!
//! A spin monomial is dressed with the site operators `D_s = b^x_s b^y_s b^z_s c_s`
//! (equal to one on the physical subspace) so that every bond Majorana pairs with
//! its partner across the same edge. The product is then sorted with sign
//! tracking and each adjacent bond pair is replaced by a link operator
//! `u_e = i b_a b_b` read along the stored edge orientation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::{EdgeType, GaugeConfig, Lattice};
use crate::scalar::{mul_i_pow, Real, C};

/// A single Majorana operator of the extended Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Majorana {
    B { site: usize, ty: EdgeType },
    C(usize),
}

/// Canonical form `coeff * prod_e u_e * c_{s_1} ... c_{s_m}` with `s_1 < ... < s_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lowered<T: Real> {
    pub coeff: C<T>,
    /// Edges whose link operator (stored orientation) appears in the product.
    pub links: Vec<usize>,
    /// Matter Majorana indices in increasing order.
    pub cs: Vec<usize>,
}

impl<T: Real> Lowered<T> {
    /// Coefficient after substituting the link values of `gauge`.
    pub fn coeff_in(&self, gauge: &GaugeConfig) -> C<T> {
        let sign: i32 = self.links.iter().map(|&e| gauge.u[e] as i32).product();
        self.coeff * T::from_i32(sign).expect("sign")
    }
}

fn sort_key(lattice: &Lattice, m: &Majorana) -> (u8, usize, u8) {
    match *m {
        Majorana::B { site, ty } => {
            let e = lattice.incident_edge(site, ty);
            (0, e, if lattice.edges[e].a == site { 0 } else { 1 })
        }
        Majorana::C(s) => (1, s, 0),
    }
}

/// Sorts a Majorana product into canonical form; bonds must pair up per edge.
pub fn canonicalize<T: Real>(lattice: &Lattice, coeff: C<T>, seq: &[Majorana]) -> Result<Lowered<T>> {
    let mut items: Vec<(u8, usize, u8)> = seq.iter().map(|m| sort_key(lattice, m)).collect();
    let mut negate = false;
    // Bubble sort with anticommutation signs and cancellation of equal neighbors.
    let mut changed = true;
    while changed {
        changed = false;
        let mut i = 0;
        while i + 1 < items.len() {
            if items[i] == items[i + 1] {
                items.drain(i..i + 2);
                changed = true;
                continue;
            }
            if items[i] > items[i + 1] {
                items.swap(i, i + 1);
                negate = !negate;
                changed = true;
            }
            i += 1;
        }
    }
    let mut coeff = if negate { -coeff } else { coeff };
    let mut links = Vec::new();
    let mut cs = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let (kind, idx, end) = items[i];
        if kind == 0 {
            if end != 0 || i + 1 >= items.len() || items[i + 1] != (0, idx, 1) {
                return Err(Error::NotGaugeDiagonal);
            }
            // b_a b_b = -i u_ab
            coeff = mul_i_pow(coeff, 3);
            links.push(idx);
            i += 2;
        } else {
            cs.push(idx);
            i += 1;
        }
    }
    Ok(Lowered { coeff, links, cs })
}

/// Product of single-site Paulis on one site: returns `(phase power of i, letter or None for identity)`.
fn combine(a: Option<EdgeType>, b: EdgeType) -> (u8, Option<EdgeType>) {
    match a {
        None => (0, Some(b)),
        Some(a) if a == b => (0, None),
        Some(a) => {
            let c = EdgeType::ALL[3 - a.index() - b.index()];
            let cyclic = (a.index() + 1) % 3 == b.index();
            (if cyclic { 1 } else { 3 }, Some(c))
        }
    }
}

/// Lowers `coeff * prod_k sigma^{ty_k}_{site_k}` (product in the listed order).
pub fn lower_spin<T: Real>(lattice: &Lattice, coeff: C<T>, factors: &[(usize, EdgeType)]) -> Result<Lowered<T>> {
    let n = lattice.n_sites();
    let mut letters: Vec<Option<EdgeType>> = vec![None; n];
    let mut coeff = coeff;
    for &(s, ty) in factors {
        let (ph, l) = combine(letters[s], ty);
        coeff = mul_i_pow(coeff, ph);
        letters[s] = l;
    }
    let has = |s: usize, t: EdgeType| letters[s] == Some(t);
    // d_s = 1 when D_s is attached; each edge needs matching bond parity on both ends.
    let mut d: Vec<Option<bool>> = vec![None; n];
    d[0] = Some(false);
    let mut stack = vec![0usize];
    while let Some(s) = stack.pop() {
        for t in EdgeType::ALL {
            let (o, _) = lattice.neighbor(s, t);
            let want = has(s, t) ^ d[s].unwrap() ^ has(o, t);
            match d[o] {
                Some(v) if v != want => return Err(Error::NotGaugeDiagonal),
                Some(_) => {}
                None => {
                    d[o] = Some(want);
                    stack.push(o);
                }
            }
        }
    }
    let mut d: Vec<bool> = d.into_iter().map(|v| v.expect("lattice is connected")).collect();
    if 2 * d.iter().filter(|&&v| v).count() > n {
        d.iter_mut().for_each(|v| *v = !*v);
    }
    let mut seq = Vec::new();
    for (s, l) in letters.iter().enumerate() {
        if let Some(ty) = l {
            coeff = mul_i_pow(coeff, 1);
            seq.push(Majorana::B { site: s, ty: *ty });
            seq.push(Majorana::C(s));
        }
    }
    for (s, &ds) in d.iter().enumerate() {
        if ds {
            seq.extend_from_slice(&site_operator(s));
        }
    }
    canonicalize(lattice, coeff, &seq)
}

/// `D_s = b^x_s b^y_s b^z_s c_s`.
pub fn site_operator(s: usize) -> [Majorana; 4] {
    [
        Majorana::B { site: s, ty: EdgeType::X },
        Majorana::B { site: s, ty: EdgeType::Y },
        Majorana::B { site: s, ty: EdgeType::Z },
        Majorana::C(s),
    ]
}

/// Canonical form of `prod_s D_s` over all sites.
pub fn total_site_parity<T: Real>(lattice: &Lattice) -> Result<Lowered<T>> {
    let seq: Vec<Majorana> = (0..lattice.n_sites()).flat_map(site_operator).collect();
    canonicalize(lattice, Complex::new(T::one(), T::zero()), &seq)
}
