//! Dense statevector engine. Qubit 0 is the lowest bit of the amplitude index.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{i_pow, Real, C};

/// Largest register the engine allocates.
pub const MAX_STATE_QUBITS: usize = 22;

/// Dense `2^n` amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T: Real> {
    pub n: usize,
    pub amps: Vec<C<T>>,
}

/// `i^{#Y} (-1)^{popcount(z & b)}` with the coefficient folded in: the amplitude
/// of `P|b>` at index `b ^ x`.
#[inline]
fn phase<T: Real>(base: C<T>, z: u64, b: usize) -> C<T> {
    if (z & b as u64).count_ones() & 1 == 1 {
        -base
    } else {
        base
    }
}

impl<T: Real> State<T> {
    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::QubitLimit { n, max: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::IndexOutOfRange { what: "basis index", index, bound: dim });
        }
        let mut amps = vec![C::default(); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(State { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidAnsatz(format!("amplitude count {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_STATE_QUBITS {
            return Err(Error::QubitLimit { n, max: MAX_STATE_QUBITS });
        }
        Ok(State { n, amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm();
        if nrm > T::zero() {
            let inv = T::one() / nrm;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: n });
        }
        Ok(())
    }

    /// In-place `|psi> <- P |psi>` for an arbitrary Pauli string.
    pub fn apply_pauli(&mut self, p: &PauliString<T>) -> Result<()> {
        self.check(p.n)?;
        let base = p.coeff * i_pow::<T>((p.y_count() % 4) as u8);
        let (x, z) = (p.x as usize, p.z);
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a = phase(base, z, b) * *a;
            }
            return Ok(());
        }
        let hb = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & hb == 0 {
                let b2 = b ^ x;
                let a0 = self.amps[b];
                let a1 = self.amps[b2];
                self.amps[b2] = phase(base, z, b) * a0;
                self.amps[b] = phase(base, z, b2) * a1;
            }
        }
        Ok(())
    }

    /// In-place `|psi> <- exp(i theta P) |psi>` for a Hermitian unit string `P`.
    pub fn apply_rotation(&mut self, p: &PauliString<T>, theta: T) -> Result<()> {
        self.check(p.n)?;
        if !p.is_hermitian_unit() {
            return Err(Error::NonUnitGenerator);
        }
        let angle = theta * p.coeff.re.signum();
        let (s, c) = angle.sin_cos();
        let is = Complex::new(T::zero(), s);
        let base = i_pow::<T>((p.y_count() % 4) as u8);
        let (x, z) = (p.x as usize, p.z);
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a = (is * phase(base, z, b) + c) * *a;
            }
            return Ok(());
        }
        let hb = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & hb == 0 {
                let b2 = b ^ x;
                let a0 = self.amps[b];
                let a1 = self.amps[b2];
                self.amps[b] = a0 * c + is * phase(base, z, b2) * a1;
                self.amps[b2] = a1 * c + is * phase(base, z, b) * a0;
            }
        }
        Ok(())
    }

    /// `<psi| P |psi>` for one string (complex in general).
    pub fn pauli_expectation(&self, p: &PauliString<T>) -> Result<C<T>> {
        self.check(p.n)?;
        let base = p.coeff * i_pow::<T>((p.y_count() % 4) as u8);
        let (x, z) = (p.x as usize, p.z);
        let mut acc = C::default();
        for (b, a) in self.amps.iter().enumerate() {
            acc += self.amps[b ^ x].conj() * phase(base, z, b) * *a;
        }
        Ok(acc)
    }
}

/// `|0...0>` on `n` qubits.
pub fn zero_state<T: Real>(n: usize) -> Result<State<T>> {
    State::basis(n, 0)
}

/// Returns `P |psi>`.
pub fn apply_pauli<T: Real>(state: &State<T>, p: &PauliString<T>) -> Result<State<T>> {
    let mut s = state.clone();
    s.apply_pauli(p)?;
    Ok(s)
}

/// Returns `exp(i theta P) |psi>`.
pub fn apply_rotation<T: Real>(state: &State<T>, p: &PauliString<T>, theta: T) -> Result<State<T>> {
    let mut s = state.clone();
    s.apply_rotation(p, theta)?;
    Ok(s)
}

/// `H |psi>` for a Pauli sum.
pub fn apply_sum<T: Real>(h: &PauliSum<T>, state: &State<T>) -> Result<State<T>> {
    state.check(h.n)?;
    let mut out = vec![C::default(); state.dim()];
    apply_sum_into(h, &state.amps, &mut out);
    Ok(State { n: state.n, amps: out })
}

/// Accumulates `H v` into `out` (no size checks).
pub fn apply_sum_into<T: Real>(h: &PauliSum<T>, v: &[C<T>], out: &mut [C<T>]) {
    for t in &h.terms {
        let base = t.coeff * i_pow::<T>((t.y_count() % 4) as u8);
        let (x, z) = (t.x as usize, t.z);
        for (b, a) in v.iter().enumerate() {
            out[b ^ x] += phase(base, z, b) * *a;
        }
    }
}

/// `<psi| H |psi>` for a Hermitian sum; the imaginary part is checked and dropped.
pub fn expectation<T: Real>(h: &PauliSum<T>, state: &State<T>) -> Result<T> {
    state.check(h.n)?;
    let imag = h.max_imag();
    if imag > T::lit(1e-10) {
        return Err(Error::NonHermitian { imag: imag.as_f64() });
    }
    let parts: Vec<C<T>> = h.terms.par_iter().map(|t| state.pauli_expectation(t).expect("size checked")).collect();
    let total = parts.into_iter().fold(C::<T>::default(), |a, b| a + b);
    let scale = T::one().max(h.norm1());
    if total.im.abs() > T::lit(1e-10) * scale {
        return Err(Error::NonHermitian { imag: total.im.as_f64() });
    }
    Ok(total.re)
}

/// `<a|b>`.
pub fn overlap<T: Real>(a: &State<T>, b: &State<T>) -> Result<C<T>> {
    a.check(b.n)?;
    Ok(inner(&a.amps, &b.amps))
}

/// `sum_i conj(a_i) b_i`.
pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::default(), |acc, (x, y)| acc + x.conj() * *y)
}

/// Writes amplitudes as little-endian `(re, im)` f64 pairs.
pub fn dump<T: Real, W: std::io::Write>(state: &State<T>, mut w: W) -> std::io::Result<()> {
    for a in &state.amps {
        w.write_all(&a.re.as_f64().to_le_bytes())?;
        w.write_all(&a.im.as_f64().to_le_bytes())?;
    }
    Ok(())
}
