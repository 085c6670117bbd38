//! Parameterized circuits built from exponentials of fermionic pair-creation
//! generators.
//!
//! Every generator `G` is Hermitian and expands under Jordan-Wigner into
//! mutually commuting Pauli strings `G = sum_t g_t P_t`, so the gate
//! `exp(i theta G)` factorizes exactly into rotations `exp(i theta g_t P_t)`.
//! Two phase variants are used per creation monomial `A`:
//! `G1 = A + A^dagger` and `G2 = -i (A - A^dagger)`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::pauli::{coeff_tol, creator, jw_c, PauliString, PauliSum};
use crate::scalar::Real;
use crate::statevector::{zero_state, State};

/// One rotation `exp(i theta[param] weight P)` with `P` a unit Hermitian string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T: Real> {
    pub param: usize,
    pub weight: T,
    pub string: PauliString<T>,
}

/// A circuit element.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Real> {
    /// Fixed Pauli string applied as an operator (the particle-hole prefix).
    Fixed(PauliString<T>),
    /// Parameterized exponential of a commuting Pauli sum.
    Exp { param: usize, rotations: Vec<Rotation<T>> },
}

/// Ordered list of gates acting on `n_qubits`, applied first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T: Real> {
    pub n_qubits: usize,
    pub gates: Vec<Gate<T>>,
    pub parameter_count: usize,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new(), parameter_count: 0 }
    }

    /// Appends `exp(i theta G)` for a Hermitian generator, allocating a new parameter.
    pub fn push_generator(&mut self, generator: &PauliSum<T>) -> Result<usize> {
        let g = generator.simplify();
        if g.n != self.n_qubits {
            return Err(Error::LengthMismatch { left: self.n_qubits, right: g.n });
        }
        if g.is_empty() {
            return Err(Error::InvalidAnsatz("generator vanishes".into()));
        }
        let tol = coeff_tol::<T>();
        for (a, t) in g.terms.iter().enumerate() {
            if t.coeff.im.abs() > tol {
                return Err(Error::NonHermitian { imag: t.coeff.im.as_f64() });
            }
            if g.terms[..a].iter().any(|s| !s.commutes_with(t)) {
                return Err(Error::InvalidAnsatz("generator strings do not commute".into()));
            }
        }
        let param = self.parameter_count;
        let rotations = g.terms.iter().map(|t| Rotation { param, weight: t.coeff.re, string: t.unit() }).collect();
        self.gates.push(Gate::Exp { param, rotations });
        self.parameter_count += 1;
        Ok(param)
    }

    pub fn push_fixed(&mut self, p: PauliString<T>) {
        self.gates.push(Gate::Fixed(p));
    }

    /// All rotations in application order.
    pub fn rotations(&self) -> impl Iterator<Item = &Rotation<T>> {
        self.gates.iter().flat_map(|g| match g {
            Gate::Fixed(_) => [].iter(),
            Gate::Exp { rotations, .. } => rotations.iter(),
        })
    }

    pub fn rotation_count(&self) -> usize {
        self.rotations().count()
    }

    fn check_params(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.parameter_count {
            return Err(Error::ParameterCount { expected: self.parameter_count, got: theta.len() });
        }
        Ok(())
    }

    /// Applies the circuit to `state` in place.
    pub fn apply(&self, theta: &[T], state: &mut State<T>) -> Result<()> {
        self.apply_shifted(theta, state, None)
    }

    /// Applies the circuit with rotation number `shift.0` (in [`Circuit::rotations`]
    /// order) given the extra angle `shift.1`.
    pub fn apply_shifted(&self, theta: &[T], state: &mut State<T>, shift: Option<(usize, T)>) -> Result<()> {
        self.check_params(theta)?;
        if state.n != self.n_qubits {
            return Err(Error::LengthMismatch { left: self.n_qubits, right: state.n });
        }
        let mut idx = 0;
        for g in &self.gates {
            match g {
                Gate::Fixed(p) => state.apply_pauli(p)?,
                Gate::Exp { rotations, .. } => {
                    for r in rotations {
                        let mut angle = theta[r.param] * r.weight;
                        if let Some((k, d)) = shift {
                            if k == idx {
                                angle += d;
                            }
                        }
                        state.apply_rotation(&r.string, angle)?;
                        idx += 1;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    /// One line per rotation: `theta[k] * <weight> <word>`; fixed gates print as `fixed <word>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            match g {
                Gate::Fixed(p) => writeln!(f, "fixed {}", p.word())?,
                Gate::Exp { rotations, .. } => {
                    for r in rotations {
                        writeln!(f, "theta[{}] * {:+} {}", r.param, r.weight, r.string.word())?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `|0...0>` with the circuit applied.
pub fn bind<T: Real>(circuit: &Circuit<T>, theta: &[T], state: &State<T>) -> Result<State<T>> {
    let mut s = state.clone();
    circuit.apply(theta, &mut s)?;
    Ok(s)
}

/// Prepares `circuit(theta) |0...0>`.
pub fn prepare<T: Real>(circuit: &Circuit<T>, theta: &[T]) -> Result<State<T>> {
    let mut s = zero_state(circuit.n_qubits)?;
    circuit.apply(theta, &mut s)?;
    Ok(s)
}

/// Product of creators `a^dagger_{m_1} ... a^dagger_{m_k}`.
fn creation_monomial<T: Real>(modes: &[usize], n: usize) -> Result<PauliSum<T>> {
    let mut a = PauliSum::identity(n);
    for &m in modes {
        a = a.multiply(&creator(m, n)?)?;
    }
    Ok(a)
}

fn adjoint<T: Real>(a: &PauliSum<T>) -> PauliSum<T> {
    PauliSum { n: a.n, terms: a.terms.iter().map(|t| t.with_coeff(t.coeff.conj())).collect() }
}

/// The two Hermitian variants `A + A^dagger` and `-i (A - A^dagger)` of a creation monomial.
pub fn pair_generators<T: Real>(modes: &[usize], n: usize) -> Result<[PauliSum<T>; 2]> {
    let a = creation_monomial(modes, n)?;
    let ad = adjoint(&a);
    let g1 = a.add(&ad)?.simplify();
    let g2 = a.add(&ad.scale_re(-T::one()))?.scale(Complex::new(T::zero(), -T::one())).simplify();
    Ok([g1, g2])
}

fn push_block<T: Real>(circuit: &mut Circuit<T>, tuples: &[Vec<usize>]) -> Result<()> {
    for modes in tuples {
        for g in pair_generators(modes, circuit.n_qubits)? {
            circuit.push_generator(&g)?;
        }
    }
    Ok(())
}

fn pairs(modes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for (a, &i) in modes.iter().enumerate() {
        for &j in &modes[a + 1..] {
            out.push(vec![i, j]);
        }
    }
    out
}

fn quadruples(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in k + 1..m {
                    out.push(vec![i, j, k, l]);
                }
            }
        }
    }
    out
}

/// `theta^a` count of the fixed-gauge ansatz: `(N/2)(N/2 - 1)`.
pub fn fixed_quadratic_count(n_spins: usize) -> usize {
    let m = n_spins / 2;
    m * m.saturating_sub(1)
}

/// `theta^b` count of the fixed-gauge ansatz: `N (N/2 - 1)(N/2 - 2)(N/2 - 3) / 4!`.
pub fn fixed_quartic_count(n_spins: usize) -> usize {
    let m = n_spins / 2;
    if m < 4 {
        return 0;
    }
    n_spins * (m - 1) * (m - 2) * (m - 3) / 24
}

/// Fixed-gauge circuit on `N/2` qubits: optional `c_0` prefix, then the pair block
/// `U^a` over `i < j`, then (optionally) the quadruple block `U^b` over `i < j < k < l`.
pub fn fixed_gauge_ansatz<T: Real>(n_spins: usize, include_quartic: bool, particle_hole: bool) -> Result<Circuit<T>> {
    if !n_spins.is_multiple_of(2) || n_spins < 4 {
        return Err(Error::InvalidAnsatz(format!("spin count {n_spins} must be even and at least 4")));
    }
    let m = n_spins / 2;
    let mut c = Circuit::new(m);
    if particle_hole {
        c.push_fixed(jw_c(0, m)?);
    }
    let modes: Vec<usize> = (0..m).collect();
    push_block(&mut c, &pairs(&modes))?;
    if include_quartic {
        push_block(&mut c, &quadruples(m))?;
    }
    Ok(c)
}

/// Parameter block sizes `(theta^a, theta^b, theta^c)` of the dynamical-gauge ansatz.
pub fn dynamical_counts(n_spins: usize) -> (usize, usize, usize) {
    let m = n_spins / 2;
    let g = 3 * n_spins / 2;
    (m * m.saturating_sub(1), g * g.saturating_sub(1), 2 * m * g)
}

/// Dynamical-gauge circuit on `2N` qubits: matter pairs `U^a`, then gauge pairs
/// `U^b`, then mixed matter-gauge pairs `U^c`.
pub fn dynamical_gauge_ansatz<T: Real>(lattice: &Lattice) -> Result<Circuit<T>> {
    let n = lattice.n_sites();
    let m = n / 2;
    let nq = 2 * n;
    let mut c = Circuit::new(nq);
    let matter: Vec<usize> = (0..m).collect();
    let gauge: Vec<usize> = (m..nq).collect();
    push_block(&mut c, &pairs(&matter))?;
    push_block(&mut c, &pairs(&gauge))?;
    let mixed: Vec<Vec<usize>> = matter.iter().flat_map(|&i| gauge.iter().map(move |&j| vec![i, j])).collect();
    push_block(&mut c, &mixed)?;
    Ok(c)
}

/// Amplitude-weighted `<prod_q Z_q>` (fermion parity of the register).
pub fn parity<T: Real>(state: &State<T>) -> T {
    state.amps.iter().enumerate().map(|(b, a)| if b.count_ones() % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_generator_strings() {
        let [g1, g2] = pair_generators::<f64>(&[0, 2], 3).unwrap();
        assert_eq!(g1.len(), 2);
        assert_eq!(g2.len(), 2);
        let words: Vec<String> = g1.terms.iter().map(|t| t.word()).collect();
        assert!(words.contains(&"XZX".to_string()) && words.contains(&"YZY".to_string()));
    }

    #[test]
    fn quartic_generator_has_eight_strings() {
        let [g1, g2] = pair_generators::<f64>(&[0, 1, 2, 3], 4).unwrap();
        assert_eq!(g1.len(), 8);
        assert_eq!(g2.len(), 8);
    }

    #[test]
    fn counts() {
        let c = fixed_gauge_ansatz::<f64>(18, true, false).unwrap();
        assert_eq!(c.parameter_count, 324);
        let c = fixed_gauge_ansatz::<f64>(8, false, true).unwrap();
        assert_eq!(c.parameter_count, 12);
        assert!(matches!(c.gates[0], Gate::Fixed(_)));
    }
}
