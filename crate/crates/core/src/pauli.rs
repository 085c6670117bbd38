//! Pauli strings and sums in the symplectic (x, z) bitmask encoding, plus the
//! Jordan-Wigner images of matter and bond Majorana operators.
//!
//! A word is the tensor product `prod_q sigma_q` with letter `X` for `(x,z) = (1,0)`,
//! `Y` for `(1,1)` and `Z` for `(0,1)`. Qubit 0 is rendered first.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{mul_i_pow, Real, C};

/// Largest supported qubit count for a Pauli word.
pub const MAX_QUBITS: usize = 64;

/// Coefficients below this magnitude are dropped by [`PauliSum::simplify`].
pub fn coeff_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

/// Single-qubit letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }
}

/// Complex-weighted Pauli word on `n` qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString<T: Real> {
    pub n: usize,
    pub x: u64,
    pub z: u64,
    pub coeff: C<T>,
}

impl<T: Real> PauliString<T> {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n, x: 0, z: 0, coeff: Complex::new(T::one(), T::zero()) }
    }

    pub fn from_masks(n: usize, x: u64, z: u64, coeff: C<T>) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n, x, z, coeff }
    }

    /// Single letter on qubit `q`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        assert!(q < n, "qubit {q} out of range for {n} qubits");
        let mut p = Self::identity(n);
        p.set(q, letter);
        p
    }

    /// Parses a word such as `"XIZY"` (qubit 0 first) with unit coefficient.
    pub fn parse(word: &str) -> Option<Self> {
        let n = word.chars().count();
        if n > MAX_QUBITS {
            return None;
        }
        let mut p = Self::identity(n);
        for (q, c) in word.chars().enumerate() {
            p.set(q, Letter::from_char(c)?);
        }
        Some(p)
    }

    pub fn with_coeff(mut self, coeff: C<T>) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn scale(mut self, s: C<T>) -> Self {
        self.coeff *= s;
        self
    }

    pub fn scale_re(self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn letter(&self, q: usize) -> Letter {
        match ((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn set(&mut self, q: usize, letter: Letter) {
        let (xb, zb) = letter.bits();
        self.x = (self.x & !(1 << q)) | ((xb as u64) << q);
        self.z = (self.z & !(1 << q)) | ((zb as u64) << q);
    }

    pub fn word(&self) -> String {
        (0..self.n).map(|q| self.letter(q).to_char()).collect()
    }

    pub fn is_identity_word(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Lexicographic key over letters `I < X < Y < Z`, qubit 0 most significant.
    pub fn sort_key(&self) -> u128 {
        let mut key = 0u128;
        for q in 0..self.n {
            key = (key << 2) | self.letter(q) as u128;
        }
        key
    }

    /// Exact product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // sigma_a sigma_b = i^{y_a + y_b - y_c + 2 z_a x_b} X^x Z^z with Y = i X Z.
        let k = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64 - (x & z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        let phase = k.rem_euclid(4) as u8;
        PauliString { n: self.n, x, z, coeff: mul_i_pow(self.coeff * other.coeff, phase) }
    }

    /// Whether the two words commute (coefficients ignored).
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Hermitian word with coefficient exactly `+-1`.
    pub fn is_hermitian_unit(&self) -> bool {
        let tol = coeff_tol::<T>();
        self.coeff.im.abs() <= tol && ((self.coeff.re.abs() - T::one()).abs() <= tol)
    }

    /// Same word with coefficient 1.
    pub fn unit(&self) -> Self {
        PauliString { coeff: Complex::new(T::one(), T::zero()), ..*self }
    }

    /// Moves the word onto a register of `n` qubits (must not drop letters).
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n && n <= MAX_QUBITS);
        PauliString { n, ..*self }
    }
}

impl<T: Real> Mul for PauliString<T> {
    type Output = PauliString<T>;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "qubit count mismatch");
        self.mul_unchecked(&rhs)
    }
}

impl<T: Real> fmt::Display for PauliString<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coeff.im < T::zero() { '-' } else { '+' };
        write!(f, "({}{}{}i) {}", self.coeff.re, sign, self.coeff.im.abs(), self.word())
    }
}

/// Sum of Pauli strings over a common register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum<T: Real> {
    pub n: usize,
    pub terms: Vec<PauliString<T>>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        PauliSum { n, terms: vec![PauliString::identity(n)] }
    }

    pub fn from_terms(n: usize, terms: Vec<PauliString<T>>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n != n) {
            return Err(Error::LengthMismatch { left: n, right: t.n });
        }
        Ok(PauliSum { n, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliString<T>) {
        assert_eq!(term.n, self.n, "qubit count mismatch");
        self.terms.push(term);
    }

    pub fn scale(&self, s: C<T>) -> Self {
        PauliSum { n: self.n, terms: self.terms.iter().map(|t| t.scale(s)).collect() }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Concatenation `self + other` (not simplified).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(PauliSum { n: self.n, terms })
    }

    /// Simplified product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        let mut acc: BTreeMap<(u64, u64), C<T>> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let p = a.mul_unchecked(b);
                *acc.entry((p.x, p.z)).or_default() += p.coeff;
            }
        }
        Ok(Self::from_map(self.n, acc))
    }

    fn from_map(n: usize, acc: BTreeMap<(u64, u64), C<T>>) -> Self {
        let tol = coeff_tol::<T>();
        let mut terms: Vec<PauliString<T>> =
            acc.into_iter().filter(|(_, c)| c.norm() > tol).map(|((x, z), c)| PauliString { n, x, z, coeff: c }).collect();
        terms.sort_by_key(|t| t.sort_key());
        PauliSum { n, terms }
    }

    /// Merges equal words, drops coefficients below [`coeff_tol`], sorts by word.
    pub fn simplify(&self) -> Self {
        let mut acc: BTreeMap<(u64, u64), C<T>> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry((t.x, t.z)).or_default() += t.coeff;
        }
        Self::from_map(self.n, acc)
    }

    /// Simplified commutator `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        let two = Complex::new(T::lit(2.0), T::zero());
        let mut acc: BTreeMap<(u64, u64), C<T>> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                if !a.commutes_with(b) {
                    let p = a.mul_unchecked(b);
                    *acc.entry((p.x, p.z)).or_default() += p.coeff * two;
                }
            }
        }
        Ok(Self::from_map(self.n, acc))
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.coeff.im.abs()))
    }

    /// Hermitian iff every coefficient is real (Pauli words are Hermitian).
    pub fn is_hermitian(&self) -> bool {
        self.simplify().max_imag() <= coeff_tol::<T>()
    }

    /// Sum of the coefficients of diagonal (I/Z-only) words.
    pub fn diagonal_sum(&self) -> C<T> {
        self.terms.iter().filter(|t| t.x == 0).fold(C::default(), |acc, t| acc + t.coeff)
    }

    /// Sum of `|coeff|` over terms; an upper bound on the spectral radius.
    pub fn norm1(&self) -> T {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }
}

impl<T: Real> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Whether `a` and `b` commute exactly.
pub fn commutes<T: Real>(a: &PauliSum<T>, b: &PauliSum<T>) -> Result<bool> {
    Ok(a.commutator(b)?.is_empty())
}

/// Jordan-Wigner Majorana on qubit `q`: `Z^{<q} X_q` (parity 0) or `Z^{<q} Y_q` (parity 1).
pub fn jw_majorana<T: Real>(q: usize, parity: u8, n_qubits: usize) -> Result<PauliString<T>> {
    if q >= n_qubits {
        return Err(Error::IndexOutOfRange { what: "qubit", index: q, bound: n_qubits });
    }
    if parity > 1 {
        return Err(Error::IndexOutOfRange { what: "majorana parity", index: parity as usize, bound: 2 });
    }
    let mut p = PauliString::identity(n_qubits);
    p.z = (1u64 << q) - 1;
    p.set(q, if parity == 0 { Letter::X } else { Letter::Y });
    Ok(p)
}

/// Matter Majorana `c_{2n+parity}` on pair `n`.
pub fn jw_matter<T: Real>(n: usize, parity: u8, n_qubits: usize) -> Result<PauliString<T>> {
    jw_majorana(n, parity, n_qubits)
}

/// Matter Majorana `c_s` addressed by its global index `s = 2n + parity`.
pub fn jw_c<T: Real>(s: usize, n_qubits: usize) -> Result<PauliString<T>> {
    jw_majorana(s / 2, (s % 2) as u8, n_qubits)
}

/// Bond Majorana `b^which_nu` (`which` = 1 or 2) in the dynamical-gauge layout,
/// where edge `nu` lives on qubit `nu + N/2`.
pub fn jw_bond<T: Real>(nu: usize, which: u8, n_spins: usize, n_qubits: usize) -> Result<PauliString<T>> {
    if !(1..=2).contains(&which) {
        return Err(Error::IndexOutOfRange { what: "bond majorana label", index: which as usize, bound: 3 });
    }
    let n_edges = 3 * n_spins / 2;
    if nu >= n_edges {
        return Err(Error::IndexOutOfRange { what: "edge", index: nu, bound: n_edges });
    }
    jw_majorana(nu + n_spins / 2, which - 1, n_qubits)
}

/// Complex-fermion annihilator `a_m = (c_{2m} + i c_{2m+1}) / 2` as a Pauli sum.
pub fn annihilator<T: Real>(m: usize, n_qubits: usize) -> Result<PauliSum<T>> {
    let half = T::lit(0.5);
    let c0 = jw_majorana::<T>(m, 0, n_qubits)?.scale(Complex::new(half, T::zero()));
    let c1 = jw_majorana::<T>(m, 1, n_qubits)?.scale(Complex::new(T::zero(), half));
    PauliSum::from_terms(n_qubits, vec![c0, c1])
}

/// Complex-fermion creator `a_m^dagger = (c_{2m} - i c_{2m+1}) / 2`.
pub fn creator<T: Real>(m: usize, n_qubits: usize) -> Result<PauliSum<T>> {
    let half = T::lit(0.5);
    let c0 = jw_majorana::<T>(m, 0, n_qubits)?.scale(Complex::new(half, T::zero()));
    let c1 = jw_majorana::<T>(m, 1, n_qubits)?.scale(Complex::new(T::zero(), -half));
    PauliSum::from_terms(n_qubits, vec![c0, c1])
}
