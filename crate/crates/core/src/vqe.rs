//! Cost functions, gradients, the quasi-Newton optimizer and the fixed-gauge and
//! dynamical-gauge drivers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{dynamical_gauge_ansatz, fixed_gauge_ansatz, prepare, Circuit, Gate};
use crate::error::{Error, Result};
use crate::freefermion;
use crate::hamiltonians::{
    dynamical_gauge_hamiltonian, fixed_gauge_hamiltonian, observables, reference_gauge, site_operators, Couplings,
    DynamicalLayout, PROJECTOR_MAX_SPINS,
};
use crate::lattice::{GaugeConfig, Lattice};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{Real, C};
use crate::statevector::{apply_sum, expectation, inner, State};

/// Smallest `<P>` accepted by the projected cost.
pub const MIN_PHYSICAL_NORM: f64 = 1e-8;

/// Optimization algorithm tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bfgs,
}

/// How gradients are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    /// Reverse-mode sweep through the circuit (one forward and one backward pass).
    Adjoint,
    /// Central finite differences with step `fd_step`.
    FiniteDifference,
    /// Shift rule `E(phi + pi/4) - E(phi - pi/4)` per rotation.
    ParameterShift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub gradient: GradientMethod,
    /// Budget on cost-and-gradient evaluations per run.
    pub max_evaluations: usize,
    pub fd_step: f64,
    /// Stop when the cost changes by less than `tolerance * max(1, |f|)` twice in a row.
    pub tolerance: f64,
    /// Stop when the largest gradient component drops below this.
    pub gradient_tolerance: f64,
    pub restarts: usize,
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::Bfgs,
            gradient: GradientMethod::Adjoint,
            max_evaluations: 20_000,
            fd_step: 1e-5,
            tolerance: 1e-10,
            gradient_tolerance: 1e-9,
            restarts: 3,
            perturbation: 0.1,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err("optimizer tolerance must be positive".into());
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err("finite-difference step must be positive".into());
        }
        if self.max_evaluations == 0 {
            return Err("evaluation budget must be positive".into());
        }
        Ok(())
    }
}

/// Fermion-parity branch of the fixed-gauge ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Even,
    Odd,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Even => "even",
            Branch::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VQEResult<T: Real> {
    pub best_energy: T,
    pub best_parameters: Vec<T>,
    pub parity_branch: Branch,
    /// `<psi|P|psi>` of the optimized state (dynamical runs).
    pub physical_norm: Option<T>,
    pub evaluations: usize,
    pub converged: bool,
    /// Physical magnetization `<sigma^z>` per site (dynamical runs).
    pub m_z: Option<T>,
    /// Physical plaquette average (dynamical runs).
    pub w: Option<T>,
    /// `(evaluation index, cost)` after each accepted step.
    pub trace: Vec<(usize, T)>,
}

/// Something the optimizer can minimize.
pub trait Objective<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> Result<T>;
    fn value_and_gradient(&self, x: &[T]) -> Result<(T, Vec<T>)>;
}

/// Central finite-difference gradient, parameters evaluated in parallel.
pub fn finite_difference<T: Real, F>(f: F, x: &[T], h: T) -> Result<Vec<T>>
where
    F: Fn(&[T]) -> Result<T> + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|k| {
            let mut xp = x.to_vec();
            xp[k] += h;
            let fp = f(&xp)?;
            xp[k] = x[k] - h;
            let fm = f(&xp)?;
            Ok((fp - fm) / (h + h))
        })
        .collect()
}

/// Objective from a plain closure, differentiated by finite differences.
pub struct FnObjective<F> {
    pub f: F,
    pub dim: usize,
    pub h: f64,
}

impl<T: Real, F: Fn(&[T]) -> Result<T> + Sync> Objective<T> for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[T]) -> Result<T> {
        (self.f)(x)
    }
    fn value_and_gradient(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        Ok(((self.f)(x)?, finite_difference(&self.f, x, T::lit(self.h))?))
    }
}

/// Cost evaluated on the prepared state.
#[derive(Debug, Clone)]
pub enum Cost<T: Real> {
    /// `<psi|H|psi>`.
    Energy(PauliSum<T>),
    /// `<psi|P H|psi> / <psi|P|psi>` with `P = prod_s (1 + D_s)/2` applied in factored form.
    Projected { h: PauliSum<T>, site_ops: Vec<PauliString<T>> },
}

/// `prod_s (1 + D_s)/2 |psi>`.
pub fn apply_projector<T: Real>(site_ops: &[PauliString<T>], state: &State<T>) -> Result<State<T>> {
    let half = T::lit(0.5);
    let mut phi = state.clone();
    for d in site_ops {
        let mut dphi = phi.clone();
        dphi.apply_pauli(d)?;
        phi.amps.iter_mut().zip(&dphi.amps).for_each(|(a, b)| *a = (*a + *b) * half);
    }
    Ok(phi)
}

fn real_inner<T: Real>(a: &State<T>, b: &State<T>) -> T {
    inner(&a.amps, &b.amps).re
}

impl<T: Real> Cost<T> {
    pub fn n_qubits(&self) -> usize {
        match self {
            Cost::Energy(h) | Cost::Projected { h, .. } => h.n,
        }
    }

    /// Cost of a prepared state.
    pub fn evaluate(&self, psi: &State<T>) -> Result<T> {
        match self {
            Cost::Energy(h) => expectation(h, psi),
            Cost::Projected { h, site_ops } => {
                let phi = apply_projector(site_ops, psi)?;
                let p = real_inner(&phi, &phi);
                if p < T::lit(MIN_PHYSICAL_NORM) {
                    return Err(Error::DegenerateCost { norm: p.as_f64() });
                }
                Ok(expectation(h, &phi)? / p)
            }
        }
    }

    /// Numerator and denominator of the cost: `<psi|H|psi>, 1` or `<psi|PHP|psi>, <psi|P|psi>`.
    /// Both are expectation values, so the shift rule applies to each.
    fn parts(&self, psi: &State<T>) -> Result<(T, T)> {
        match self {
            Cost::Energy(h) => Ok((expectation(h, psi)?, T::one())),
            Cost::Projected { h, site_ops } => {
                let phi = apply_projector(site_ops, psi)?;
                Ok((expectation(h, &phi)?, real_inner(&phi, &phi)))
            }
        }
    }

    /// Cost and the adjoint vector `lambda` with `dC = 2 Re <dpsi|lambda>`.
    fn evaluate_with_adjoint(&self, psi: &State<T>) -> Result<(T, State<T>)> {
        match self {
            Cost::Energy(h) => {
                let hpsi = apply_sum(h, psi)?;
                Ok((real_inner(psi, &hpsi), hpsi))
            }
            Cost::Projected { h, site_ops } => {
                let phi = apply_projector(site_ops, psi)?;
                let p = real_inner(&phi, &phi);
                if p < T::lit(MIN_PHYSICAL_NORM) {
                    return Err(Error::DegenerateCost { norm: p.as_f64() });
                }
                let hphi = apply_sum(h, &phi)?;
                let c = real_inner(&phi, &hphi) / p;
                // H commutes with P, so P (H - C) P psi = (H - C) phi.
                let mut lambda = hphi;
                lambda.amps.iter_mut().zip(&phi.amps).for_each(|(l, f)| *l = (*l - *f * c) / p);
                Ok((c, lambda))
            }
        }
    }
}

/// Circuit plus cost: the variational objective.
pub struct Variational<'a, T: Real> {
    pub circuit: &'a Circuit<T>,
    pub cost: &'a Cost<T>,
    pub gradient: GradientMethod,
    pub fd_step: f64,
}

impl<'a, T: Real> Variational<'a, T> {
    pub fn new(circuit: &'a Circuit<T>, cost: &'a Cost<T>, cfg: &OptimizerConfig) -> Result<Self> {
        if circuit.n_qubits != cost.n_qubits() {
            return Err(Error::LengthMismatch { left: circuit.n_qubits, right: cost.n_qubits() });
        }
        Ok(Variational { circuit, cost, gradient: cfg.gradient, fd_step: cfg.fd_step })
    }

    fn shifted_state(&self, theta: &[T], shift: Option<(usize, T)>) -> Result<State<T>> {
        let mut s = crate::statevector::zero_state(self.circuit.n_qubits)?;
        self.circuit.apply_shifted(theta, &mut s, shift)?;
        Ok(s)
    }

    fn shifted_value(&self, theta: &[T], shift: Option<(usize, T)>) -> Result<T> {
        self.cost.evaluate(&self.shifted_state(theta, shift)?)
    }

    /// Gradient by the adjoint sweep.
    pub fn adjoint_gradient(&self, theta: &[T]) -> Result<(T, Vec<T>)> {
        let mut psi = prepare(self.circuit, theta)?;
        let (value, mut lambda) = self.cost.evaluate_with_adjoint(&psi)?;
        let mut grad = vec![T::zero(); self.circuit.parameter_count];
        let two = T::lit(2.0);
        for g in self.circuit.gates.iter().rev() {
            match g {
                Gate::Fixed(p) => {
                    // Fixed strings are Hermitian and unitary up to their unit coefficient.
                    let inv = p.with_coeff(p.coeff.conj());
                    psi.apply_pauli(&inv)?;
                    lambda.apply_pauli(&inv)?;
                }
                Gate::Exp { rotations, .. } => {
                    for r in rotations.iter().rev() {
                        // d/dtheta exp(i theta w P) = i w P exp(...)
                        let ppsi = crate::statevector::apply_pauli(&psi, &r.string)?;
                        let ov: C<T> = inner(&lambda.amps, &ppsi.amps);
                        grad[r.param] += two * r.weight * (-ov.im);
                        let angle = -theta[r.param] * r.weight;
                        psi.apply_rotation(&r.string, angle)?;
                        lambda.apply_rotation(&r.string, angle)?;
                    }
                }
            }
        }
        Ok((value, grad))
    }

    /// Gradient by the shift rule applied to every rotation.
    pub fn shift_gradient(&self, theta: &[T]) -> Result<(T, Vec<T>)> {
        let (num, den) = self.cost.parts(&self.shifted_state(theta, None)?)?;
        if den < T::lit(MIN_PHYSICAL_NORM) {
            return Err(Error::DegenerateCost { norm: den.as_f64() });
        }
        let value = num / den;
        let quarter = T::lit(std::f64::consts::FRAC_PI_4);
        let rots: Vec<(usize, usize, T)> = self.circuit.rotations().enumerate().map(|(i, r)| (i, r.param, r.weight)).collect();
        let parts: Vec<Result<(usize, T)>> = rots
            .par_iter()
            .map(|&(i, param, w)| {
                let (nu, du) = self.cost.parts(&self.shifted_state(theta, Some((i, quarter)))?)?;
                let (nd, dd) = self.cost.parts(&self.shifted_state(theta, Some((i, -quarter)))?)?;
                // Quotient rule on the two shifted expectation values.
                Ok((param, w * ((nu - nd) - value * (du - dd)) / den))
            })
            .collect();
        let mut grad = vec![T::zero(); self.circuit.parameter_count];
        for p in parts {
            let (param, d) = p?;
            grad[param] += d;
        }
        Ok((value, grad))
    }
}

impl<T: Real> Objective<T> for Variational<'_, T> {
    fn dim(&self) -> usize {
        self.circuit.parameter_count
    }

    fn value(&self, x: &[T]) -> Result<T> {
        self.shifted_value(x, None)
    }

    fn value_and_gradient(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        match self.gradient {
            GradientMethod::Adjoint => self.adjoint_gradient(x),
            GradientMethod::ParameterShift => self.shift_gradient(x),
            GradientMethod::FiniteDifference => {
                let v = self.value(x)?;
                Ok((v, finite_difference(|y| self.value(y), x, T::lit(self.fd_step))?))
            }
        }
    }
}

/// `<psi(theta)|H|psi(theta)>`.
pub fn energy_cost<T: Real>(h: &PauliSum<T>, circuit: &Circuit<T>, theta: &[T]) -> Result<T> {
    if h.n != circuit.n_qubits {
        return Err(Error::LengthMismatch { left: h.n, right: circuit.n_qubits });
    }
    expectation(h, &prepare(circuit, theta)?)
}

/// `<PH>/<P>` with `PH` formed symbolically from the expanded projector.
pub fn projected_cost<T: Real>(h: &PauliSum<T>, p: &PauliSum<T>, circuit: &Circuit<T>, theta: &[T]) -> Result<T> {
    let psi = prepare(circuit, theta)?;
    let ph = p.multiply(h)?;
    projected_cost_on(&ph, p, &psi)
}

/// `<psi|PH|psi> / <psi|P|psi>` for a prepared state and pre-multiplied `PH`.
pub fn projected_cost_on<T: Real>(ph: &PauliSum<T>, p: &PauliSum<T>, psi: &State<T>) -> Result<T> {
    let norm = expectation(p, psi)?;
    if norm < T::lit(MIN_PHYSICAL_NORM) {
        return Err(Error::DegenerateCost { norm: norm.as_f64() });
    }
    Ok(expectation(ph, psi)? / norm)
}

/// Result of one call to [`minimize`].
#[derive(Debug, Clone)]
pub struct Minimum<T: Real> {
    pub x: Vec<T>,
    pub f: T,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<(usize, T)>,
}

struct Counter<'a, T: Real, O: Objective<T>> {
    obj: &'a O,
    evaluations: usize,
    budget: usize,
    _t: std::marker::PhantomData<T>,
}

impl<T: Real, O: Objective<T>> Counter<'_, T, O> {
    /// Cost and gradient; unphysical or non-finite points map to `+inf`.
    fn eval(&mut self, x: &[T]) -> Result<Option<(T, Vec<T>)>> {
        self.evaluations += 1;
        match self.obj.value_and_gradient(x) {
            Ok((f, g)) if f.is_finite() && g.iter().all(|v| v.is_finite()) => Ok(Some((f, g))),
            Ok(_) | Err(Error::DegenerateCost { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn axpy<T: Real>(x: &[T], a: T, p: &[T]) -> Vec<T> {
    x.iter().zip(p).map(|(xi, pi)| *xi + a * *pi).collect()
}

struct Point<T> {
    alpha: T,
    f: T,
    g: Vec<T>,
    d: T,
}

/// Minimizer of the cubic through two points with values and slopes, safeguarded into `[lo, hi]`.
fn interpolate<T: Real>(a: &Point<T>, b: &Point<T>) -> T {
    let (lo, hi) = if a.alpha < b.alpha { (a.alpha, b.alpha) } else { (b.alpha, a.alpha) };
    let width = hi - lo;
    let bisect = lo + width * T::lit(0.5);
    if !b.f.is_finite() {
        return a.alpha + (b.alpha - a.alpha) * T::lit(0.25);
    }
    let d1 = a.d + b.d - T::lit(3.0) * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.d * b.d;
    if disc < T::zero() {
        return bisect;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.d + d2 - d1) / (b.d - a.d + d2 + d2);
    let margin = width * T::lit(0.1);
    if !t.is_finite() || t < lo + margin || t > hi - margin {
        bisect
    } else {
        t
    }
}

/// Strong-Wolfe line search along `p` from `(x, f0, g0)`.
fn line_search<T: Real, O: Objective<T>>(
    ctr: &mut Counter<'_, T, O>,
    x: &[T],
    f0: T,
    g0: &[T],
    p: &[T],
    alpha0: T,
) -> Result<Option<Point<T>>> {
    let c1 = T::lit(1e-4);
    let c2 = T::lit(0.9);
    let d0 = dot(g0, p);
    let mut prev = Point { alpha: T::zero(), f: f0, g: g0.to_vec(), d: d0 };
    let mut alpha = alpha0;
    let probe = |ctr: &mut Counter<'_, T, O>, alpha: T| -> Result<Point<T>> {
        Ok(match ctr.eval(&axpy(x, alpha, p))? {
            Some((f, g)) => {
                let d = dot(&g, p);
                Point { alpha, f, g, d }
            }
            None => Point { alpha, f: T::infinity(), g: vec![], d: T::zero() },
        })
    };
    for i in 0..30 {
        if ctr.exhausted() {
            return Ok(None);
        }
        let cur = probe(ctr, alpha)?;
        if !cur.f.is_finite() || cur.f > f0 + c1 * alpha * d0 || (i > 0 && cur.f >= prev.f) {
            return zoom(ctr, &probe, prev, cur, f0, d0, c1, c2);
        }
        if cur.d.abs() <= -c2 * d0 {
            return Ok(Some(cur));
        }
        if cur.d >= T::zero() {
            return zoom(ctr, &probe, cur, prev, f0, d0, c1, c2);
        }
        alpha = alpha + alpha;
        prev = cur;
    }
    Ok(Some(prev).filter(|p| p.alpha > T::zero()))
}

#[allow(clippy::too_many_arguments)]
fn zoom<T: Real, O: Objective<T>, P>(
    ctr: &mut Counter<'_, T, O>,
    probe: &P,
    mut lo: Point<T>,
    mut hi: Point<T>,
    f0: T,
    d0: T,
    c1: T,
    c2: T,
) -> Result<Option<Point<T>>>
where
    P: Fn(&mut Counter<'_, T, O>, T) -> Result<Point<T>>,
{
    for _ in 0..40 {
        if ctr.exhausted() {
            break;
        }
        let alpha = interpolate(&lo, &hi);
        if (hi.alpha - lo.alpha).abs() <= T::epsilon() * lo.alpha.abs().max(T::one()) {
            break;
        }
        let cur = probe(ctr, alpha)?;
        if !cur.f.is_finite() || cur.f > f0 + c1 * alpha * d0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.d.abs() <= -c2 * d0 {
                return Ok(Some(cur));
            }
            if cur.d * (hi.alpha - lo.alpha) >= T::zero() {
                hi = lo;
            }
            lo = cur;
        }
    }
    // Accept the best decreasing point found.
    Ok(Some(lo).filter(|p| p.alpha > T::zero() && p.f < f0))
}

/// One BFGS run from `x0`.
fn bfgs<T: Real, O: Objective<T>>(obj: &O, x0: &[T], cfg: &OptimizerConfig) -> Result<Minimum<T>> {
    let n = obj.dim();
    let mut ctr = Counter { obj, evaluations: 0, budget: cfg.max_evaluations, _t: std::marker::PhantomData };
    let (mut f, mut g) = ctr.eval(x0)?.ok_or(Error::NonFiniteCost)?;
    let mut x = x0.to_vec();
    let mut trace = vec![(ctr.evaluations, f)];
    let identity = |scale: T| -> Vec<T> {
        let mut h = vec![T::zero(); n * n];
        for i in 0..n {
            h[i * n + i] = scale;
        }
        h
    };
    let mut hinv = identity(T::one());
    let mut fresh = true;
    let mut small = 0;
    let tol = T::lit(cfg.tolerance);
    let gtol = T::lit(cfg.gradient_tolerance);
    let mut converged = false;
    while !ctr.exhausted() {
        if g.iter().fold(T::zero(), |m, v| m.max(v.abs())) <= gtol {
            converged = true;
            break;
        }
        let mut p: Vec<T> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<T>()).collect();
        if dot(&p, &g) >= T::zero() {
            hinv = identity(T::one());
            fresh = true;
            p = g.iter().map(|v| -*v).collect();
        }
        let alpha0 = if fresh { T::one().min(T::one() / g.iter().fold(T::zero(), |m, v| m.max(v.abs()))) } else { T::one() };
        let step = line_search(&mut ctr, &x, f, &g, &p, alpha0)?;
        let Some(pt) = step else {
            if fresh {
                break;
            }
            hinv = identity(T::one());
            fresh = true;
            continue;
        };
        let s: Vec<T> = p.iter().map(|v| *v * pt.alpha).collect();
        let y: Vec<T> = pt.g.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                hinv = identity(sy / dot(&y, &y));
            }
            let rho = T::one() / sy;
            let hy: Vec<T> = (0..n).map(|i| (0..n).map(|j| hinv[i * n + j] * y[j]).sum()).collect();
            let yhy = dot(&y, &hy);
            let coef = (T::one() + rho * yhy) * rho;
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
            fresh = false;
        }
        let df = (f - pt.f).abs();
        x = axpy(&x, pt.alpha, &p);
        f = pt.f;
        g = pt.g;
        trace.push((ctr.evaluations, f));
        if df <= tol * T::one().max(f.abs()) {
            small += 1;
            if small >= 2 {
                converged = true;
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(Minimum { x, f, evaluations: ctr.evaluations, converged, trace })
}

/// Minimizes `obj` from `x0` with seeded restarts around the best point.
///
/// Restarts stop early once a restart fails to improve the best value, or once
/// `target` (a known lower bound) is reached to the cost tolerance.
pub fn minimize<T: Real, O: Objective<T>>(obj: &O, x0: &[T], cfg: &OptimizerConfig, target: Option<T>) -> Result<Minimum<T>> {
    if x0.len() != obj.dim() {
        return Err(Error::ParameterCount { expected: obj.dim(), got: x0.len() });
    }
    if !obj.value(x0).map(|v| v.is_finite()).unwrap_or(false) {
        return Err(Error::NonFiniteCost);
    }
    let mut best = bfgs(obj, x0, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reached = |m: &Minimum<T>| target.is_some_and(|t| m.f - t <= T::lit(cfg.tolerance) * T::one().max(t.abs()));
    for _ in 0..cfg.restarts {
        if reached(&best) {
            break;
        }
        let start: Vec<T> = best.x.iter().map(|v| *v + T::lit(rng.gen_range(-cfg.perturbation..=cfg.perturbation))).collect();
        let run = bfgs(obj, &start, cfg)?;
        let evaluations = best.evaluations + run.evaluations;
        let improved = run.f < best.f - T::lit(cfg.tolerance) * T::one().max(best.f.abs());
        let offset = best.evaluations;
        let mut trace = std::mem::take(&mut best.trace);
        trace.extend(run.trace.iter().map(|(e, f)| (e + offset, *f)));
        if run.f < best.f {
            best = Minimum { trace, evaluations, ..run };
        } else {
            best.trace = trace;
            best.evaluations = evaluations;
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// Fixed-gauge circuit used by [`run_fixed_gauge`]: the quartic block is
/// included when `kappa_int != 0`, the particle-hole prefix on the odd branch.
pub fn fixed_gauge_circuit<T: Real>(lattice: &Lattice, couplings: &Couplings<T>, branch: Branch) -> Result<Circuit<T>> {
    fixed_gauge_ansatz(lattice.n_sites(), couplings.kappa_int != T::zero(), branch == Branch::Odd)
}

/// Fixed-gauge VQE in the sector `gauge`. The quartic block is included when
/// `kappa_int != 0`. The even branch always runs; the odd (particle-hole)
/// branch runs when `kappa_int != 0` or the even branch stays above the
/// free-fermion bound by more than `1e-6`.
pub fn run_fixed_gauge<T: Real>(
    lattice: &Lattice,
    gauge: &GaugeConfig,
    couplings: &Couplings<T>,
    cfg: &OptimizerConfig,
) -> Result<VQEResult<T>> {
    let h = fixed_gauge_hamiltonian(lattice, gauge, couplings)?;
    let quartic = couplings.kappa_int != T::zero();
    let e_ff = freefermion::ground_energy(&freefermion::canonical_form(&freefermion::build_k(lattice, gauge, couplings)?)?);
    let target = (!quartic).then_some(e_ff);
    let cost = Cost::Energy(h);
    let run = |branch: Branch| -> Result<VQEResult<T>> {
        let circuit = fixed_gauge_circuit(lattice, couplings, branch)?;
        let obj = Variational::new(&circuit, &cost, cfg)?;
        let m = minimize(&obj, &vec![T::zero(); circuit.parameter_count], cfg, target)?;
        Ok(VQEResult {
            best_energy: m.f,
            best_parameters: m.x,
            parity_branch: branch,
            physical_norm: None,
            evaluations: m.evaluations,
            converged: m.converged,
            m_z: None,
            w: None,
            trace: m.trace,
        })
    };
    let even = run(Branch::Even)?;
    if !quartic && even.best_energy <= e_ff + T::lit(1e-6) {
        return Ok(even);
    }
    let odd = run(Branch::Odd)?;
    let evaluations = even.evaluations + odd.evaluations;
    let mut best = if odd.best_energy < even.best_energy { odd } else { even };
    best.evaluations = evaluations;
    Ok(best)
}

/// Everything the dynamical-gauge driver needs, built once per lattice and couplings.
pub struct DynamicalProblem<T: Real> {
    pub layout: DynamicalLayout,
    pub circuit: Circuit<T>,
    pub cost: Cost<T>,
    pub m_z: PauliSum<T>,
    pub w: PauliSum<T>,
}

impl<T: Real> DynamicalProblem<T> {
    pub fn new(lattice: &Lattice, couplings: &Couplings<T>) -> Result<Self> {
        let n = lattice.n_sites();
        if n > PROJECTOR_MAX_SPINS {
            return Err(Error::ProjectorCap { n, max: PROJECTOR_MAX_SPINS });
        }
        let reference = reference_gauge(lattice, couplings)?;
        let layout = DynamicalLayout::new(lattice, reference);
        let h = dynamical_gauge_hamiltonian(lattice, &layout, couplings)?;
        let site_ops = site_operators(lattice, &layout)?;
        let obs = observables(lattice, &layout)?;
        let w = obs.plaquette_average();
        let circuit = dynamical_gauge_ansatz(lattice)?;
        Ok(DynamicalProblem { layout, circuit, cost: Cost::Projected { h, site_ops }, m_z: obs.m_z, w })
    }

    /// Physical state `P psi` (unnormalized) for parameters `theta`.
    pub fn physical_state(&self, theta: &[T]) -> Result<State<T>> {
        let Cost::Projected { site_ops, .. } = &self.cost else { unreachable!("projected cost") };
        apply_projector(site_ops, &prepare(&self.circuit, theta)?)
    }
}

/// Dynamical-gauge VQE on `2N` qubits with the projected cost, starting from `theta = 0`.
pub fn run_dynamical<T: Real>(lattice: &Lattice, couplings: &Couplings<T>, cfg: &OptimizerConfig) -> Result<VQEResult<T>> {
    let problem = DynamicalProblem::new(lattice, couplings)?;
    run_dynamical_problem(&problem, cfg)
}

pub fn run_dynamical_problem<T: Real>(problem: &DynamicalProblem<T>, cfg: &OptimizerConfig) -> Result<VQEResult<T>> {
    let obj = Variational::new(&problem.circuit, &problem.cost, cfg)?;
    let m = minimize(&obj, &vec![T::zero(); problem.circuit.parameter_count], cfg, None)?;
    let phi = problem.physical_state(&m.x)?;
    let norm = real_inner(&phi, &phi);
    Ok(VQEResult {
        best_energy: m.f,
        best_parameters: m.x,
        parity_branch: Branch::Even,
        physical_norm: Some(norm),
        evaluations: m.evaluations,
        converged: m.converged,
        m_z: Some(expectation(&problem.m_z, &phi)? / norm),
        w: Some(expectation(&problem.w, &phi)? / norm),
        trace: m.trace,
    })
}
