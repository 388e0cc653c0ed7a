//! Parameters, truncated qubit⊗Fock space, operators and the Hamiltonian.
//!
//! Units: ħ = 1 throughout. The canonical choice is also ω0 = 1 and m = 1, so
//! every energy is expressed in units of ħω0, but the formulas keep ω0 and m
//! explicit so that common rescalings can be checked.
//!
//! Basis ordering is oscillator ⊗ qubit with the qubit index fastest:
//! `index(n, q) = 2 n + q`, where `q = 0` is |↑⟩ (σz = +1) and `q = 1` is |↓⟩.
//!
//! The oscillator zero-point energy ħω0/2 is dropped, so the uncoupled
//! spectrum is `n ħω0 ± E_q / 2`.

use std::f64::consts::FRAC_1_SQRT_2;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, ONE, ZERO};

/// Physical parameters of the qubit–oscillator system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Qubit gap Δ.
    pub delta: f64,
    /// Qubit bias ε.
    pub eps: f64,
    /// Oscillator angular frequency ω0.
    pub omega0: f64,
    /// Coupling λ, the prefactor of `(a + a†) σz`.
    pub lambda: f64,
    /// Oscillator mass m.
    pub mass: f64,
}

impl SystemParams {
    /// Parameters in canonical units (ħ = ω0 = m = 1).
    pub fn new(delta: f64, eps: f64, lambda: f64) -> Self {
        SystemParams { delta, eps, omega0: 1.0, lambda, mass: 1.0 }
    }

    /// From the ratio ħω0/E_q and the angle θ = arctan(ε/Δ), with λ in units of ħω0.
    pub fn from_omega_over_eq(omega_over_eq: f64, theta: f64, lambda: f64) -> Self {
        let e_q = 1.0 / omega_over_eq;
        Self::new(e_q * theta.cos(), e_q * theta.sin(), lambda)
    }

    /// From the ratio ħω0/Δ and ε/Δ, with λ in units of ħω0.
    pub fn from_omega_over_delta(omega_over_delta: f64, eps_over_delta: f64, lambda: f64) -> Self {
        let delta = 1.0 / omega_over_delta;
        Self::new(delta, eps_over_delta * delta, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta, self.eps, self.omega0, self.lambda, self.mass]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("parameters must be finite"));
        }
        if self.delta <= 0.0 {
            return Err(Error::invalid(format!("delta must be > 0, got {}", self.delta)));
        }
        if self.omega0 <= 0.0 {
            return Err(Error::invalid(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if self.lambda < 0.0 {
            return Err(Error::invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.mass <= 0.0 {
            return Err(Error::invalid(format!("mass must be > 0, got {}", self.mass)));
        }
        Ok(())
    }

    /// Qubit energy splitting E_q = sqrt(Δ² + ε²).
    pub fn e_q(&self) -> f64 {
        self.delta.hypot(self.eps)
    }

    /// θ = arctan(ε/Δ).
    pub fn theta(&self) -> f64 {
        (self.eps / self.delta).atan()
    }

    /// Coupling in position language, `g = λ sqrt(2 m ω0 / ħ)`.
    pub fn g(&self) -> f64 {
        self.lambda * (2.0 * self.mass * self.omega0).sqrt()
    }

    /// λ recovered from g, `λ = g sqrt(ħ / (2 m ω0))`.
    pub fn lambda_from_g(&self, g: f64) -> f64 {
        g * (1.0 / (2.0 * self.mass * self.omega0)).sqrt()
    }

    /// λ / ħω0.
    pub fn lambda_ratio(&self) -> f64 {
        self.lambda / self.omega0
    }

    /// The critical-point ratio 4λ² / (ħω0 E_q); above 1 the adiabatic-qubit
    /// potential is a double well.
    pub fn critical_ratio(&self) -> f64 {
        4.0 * self.lambda * self.lambda / (self.omega0 * self.e_q())
    }

    /// Oscillator length scale sqrt(ħ / (m ω0)) relating x to X: `X = x / (√2 ℓ)`.
    pub fn oscillator_length(&self) -> f64 {
        (1.0 / (self.mass * self.omega0)).sqrt()
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// All energy scales (Δ, ε, λ, ħω0) multiplied by `factor`.
    pub fn rescaled(mut self, factor: f64) -> Self {
        self.delta *= factor;
        self.eps *= factor;
        self.lambda *= factor;
        self.omega0 *= factor;
        self
    }
}

pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-10;
pub const DEFAULT_CEILING: usize = 4096;
pub const MIN_N_MAX: usize = 8;

/// Fock-space truncation: keep photon numbers `0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockTruncation {
    pub n_max: usize,
    pub convergence_tol: f64,
    pub auto: bool,
    /// Largest n_max adaptive doubling may reach.
    pub ceiling: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        let t = FockTruncation {
            n_max,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            auto: false,
            ceiling: DEFAULT_CEILING,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < MIN_N_MAX {
            return Err(Error::invalid(format!(
                "n_max must be >= {MIN_N_MAX}, got {}",
                self.n_max
            )));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol <= 1e-4) {
            return Err(Error::invalid(format!(
                "convergence_tol must lie in (0, 1e-4], got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Dimension of the full qubit⊗Fock space, 2 (N + 1).
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn with_auto(mut self, tol: f64) -> Self {
        self.auto = true;
        self.convergence_tol = tol;
        self
    }
}

/// How `choose_truncation` picks n_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationOptions {
    pub auto: bool,
    pub convergence_tol: f64,
    pub ceiling: usize,
    /// Use this n_max as is, skipping the formula and the doubling.
    pub fixed: Option<usize>,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        TruncationOptions {
            auto: false,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            ceiling: DEFAULT_CEILING,
            fixed: None,
        }
    }
}

/// Index of |n, q⟩ in the product basis.
#[inline]
pub fn index(n: usize, q: usize) -> usize {
    2 * n + q
}

/// A dense operator on a truncated space.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub entries: CMat,
    pub label: String,
}

impl TruncatedOperator {
    pub fn new(entries: CMat, label: impl Into<String>) -> Self {
        TruncatedOperator { entries, label: label.into() }
    }

    pub fn from_real(entries: &Mat<f64>, label: impl Into<String>) -> Self {
        Self::new(linalg::complexify(entries), label)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.entries)
    }

    pub fn is_real(&self) -> bool {
        linalg::max_abs_imag(&self.entries) == 0.0
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.entries, v)
    }

    pub fn expectation(&self, state: &PureState) -> C64 {
        linalg::sandwich(&state.amplitudes, &self.entries, &state.amplitudes)
    }

    pub fn element(&self, bra: &PureState, ket: &PureState) -> C64 {
        linalg::sandwich(&bra.amplitudes, &self.entries, &ket.amplitudes)
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub amplitudes: Vec<C64>,
}

pub const NORM_TOL: f64 = 1e-10;

impl PureState {
    /// Wraps amplitudes that must already be normalized to 1e-10.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm {n} differs from 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes the given amplitudes; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(PureState { amplitudes })
    }

    pub fn from_real(v: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::normalized(v.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    /// Fock state |n⟩ in a space of `fock_dim` levels.
    pub fn fock(n: usize, fock_dim: usize) -> Self {
        let mut amps = vec![ZERO; fock_dim];
        amps[n] = ONE;
        PureState { amplitudes: amps }
    }

    /// |osc⟩ ⊗ |qubit⟩.
    pub fn product(osc: &PureState, qubit: [C64; 2]) -> Result<Self> {
        let mut amps = Vec::with_capacity(2 * osc.dim());
        for &c in &osc.amplitudes {
            amps.push(c * qubit[0]);
            amps.push(c * qubit[1]);
        }
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// Number of Fock levels when viewed as a qubit⊗oscillator state.
    pub fn fock_dim(&self) -> Result<usize> {
        if self.dim() % 2 != 0 || self.dim() == 0 {
            return Err(Error::invalid(format!("dimension {} is not 2 (N + 1)", self.dim())));
        }
        Ok(self.dim() / 2)
    }
}

/// Qubit basis vectors in the σz basis (↑, ↓).
pub mod qubit {
    use super::*;

    pub const UP: [C64; 2] = [ONE, ZERO];
    pub const DOWN: [C64; 2] = [ZERO, ONE];
    /// σx = +1 eigenstate.
    pub const PLUS: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
    /// σx = -1 eigenstate.
    pub const MINUS: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)];
}

/// Annihilation operator on Fock levels `0..=n_max`, `a[n, n+1] = sqrt(n + 1)`.
pub fn ladder(n_max: usize) -> CMat {
    CMat::from_fn(n_max + 1, n_max + 1, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Operators on the oscillator, the qubit, and their lifts to the product space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub a: TruncatedOperator,
    pub a_dag: TruncatedOperator,
    /// X = (a + a†) / 2.
    pub x: TruncatedOperator,
    /// P = (a − a†) / (2i).
    pub p: TruncatedOperator,
    pub number: TruncatedOperator,
    pub fock_identity: TruncatedOperator,
    pub sigma_x: TruncatedOperator,
    pub sigma_y: TruncatedOperator,
    pub sigma_z: TruncatedOperator,
    /// σ+ = |↑⟩⟨↓|.
    pub sigma_plus: TruncatedOperator,
    /// σ− = |↓⟩⟨↑|.
    pub sigma_minus: TruncatedOperator,
    pub qubit_identity: TruncatedOperator,
}

impl OperatorSet {
    /// `op ⊗ 1_qubit`.
    pub fn lift_oscillator(&self, op: &TruncatedOperator) -> TruncatedOperator {
        TruncatedOperator::new(
            linalg::kron(&op.entries, &self.qubit_identity.entries),
            format!("{}⊗1", op.label),
        )
    }

    /// `1_osc ⊗ op`.
    pub fn lift_qubit(&self, op: &TruncatedOperator) -> TruncatedOperator {
        TruncatedOperator::new(
            linalg::kron(&self.fock_identity.entries, &op.entries),
            format!("1⊗{}", op.label),
        )
    }

    pub fn n_max(&self) -> usize {
        self.a.dim() - 1
    }
}

pub fn build_operators(trunc: &FockTruncation) -> Result<OperatorSet> {
    trunc.validate()?;
    let n_max = trunc.n_max;
    let a = ladder(n_max);
    let a_dag = a.adjoint().to_owned();
    let half = C64::new(0.5, 0.0);
    let x = (&a + &a_dag) * faer::Scale(half);
    let p = (&a - &a_dag) * faer::Scale(C64::new(0.0, -0.5));
    let number = CMat::from_fn(n_max + 1, n_max + 1, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    });
    let q = |m: [[C64; 2]; 2]| CMat::from_fn(2, 2, |i, j| m[i][j]);
    let i_ = C64::new(0.0, 1.0);
    Ok(OperatorSet {
        a: TruncatedOperator::new(a, "a"),
        a_dag: TruncatedOperator::new(a_dag, "a†"),
        x: TruncatedOperator::new(x, "X"),
        p: TruncatedOperator::new(p, "P"),
        number: TruncatedOperator::new(number, "n"),
        fock_identity: TruncatedOperator::new(linalg::identity(n_max + 1), "1"),
        sigma_x: TruncatedOperator::new(q([[ZERO, ONE], [ONE, ZERO]]), "sigma_x"),
        sigma_y: TruncatedOperator::new(q([[ZERO, -i_], [i_, ZERO]]), "sigma_y"),
        sigma_z: TruncatedOperator::new(q([[ONE, ZERO], [ZERO, -ONE]]), "sigma_z"),
        sigma_plus: TruncatedOperator::new(q([[ZERO, ONE], [ZERO, ZERO]]), "sigma_plus"),
        sigma_minus: TruncatedOperator::new(q([[ZERO, ZERO], [ONE, ZERO]]), "sigma_minus"),
        qubit_identity: TruncatedOperator::new(linalg::identity(2), "1"),
    })
}

/// Real symmetric matrix of
/// `H = −(Δ/2)σx − (ε/2)σz + ħω0 a†a + λ(a + a†)σz` on Fock levels `0..=n_max`.
pub fn hamiltonian_matrix(p: &SystemParams, n_max: usize) -> Mat<f64> {
    let dim = 2 * (n_max + 1);
    let mut h = Mat::<f64>::zeros(dim, dim);
    for n in 0..=n_max {
        let up = index(n, 0);
        let dn = index(n, 1);
        let osc = p.omega0 * n as f64;
        h[(up, up)] = osc - 0.5 * p.eps;
        h[(dn, dn)] = osc + 0.5 * p.eps;
        h[(up, dn)] = -0.5 * p.delta;
        h[(dn, up)] = -0.5 * p.delta;
        if n < n_max {
            let c = p.lambda * ((n + 1) as f64).sqrt();
            h[(up, index(n + 1, 0))] = c;
            h[(index(n + 1, 0), up)] = c;
            h[(dn, index(n + 1, 1))] = -c;
            h[(index(n + 1, 1), dn)] = -c;
        }
    }
    h
}

pub fn build_hamiltonian(p: &SystemParams, trunc: &FockTruncation) -> Result<TruncatedOperator> {
    p.validate()?;
    trunc.validate()?;
    Ok(TruncatedOperator::from_real(&hamiltonian_matrix(p, trunc.n_max), "H"))
}

/// `H v` using the banded structure of the Hamiltonian, O(dim).
pub fn apply_hamiltonian(p: &SystemParams, n_max: usize, v: &[C64]) -> Vec<C64> {
    assert_eq!(v.len(), 2 * (n_max + 1));
    let mut out = vec![ZERO; v.len()];
    for n in 0..=n_max {
        let (up, dn) = (index(n, 0), index(n, 1));
        let osc = p.omega0 * n as f64;
        out[up] += v[up] * (osc - 0.5 * p.eps) - v[dn] * (0.5 * p.delta);
        out[dn] += v[dn] * (osc + 0.5 * p.eps) - v[up] * (0.5 * p.delta);
        if n < n_max {
            let c = p.lambda * ((n + 1) as f64).sqrt();
            let (up1, dn1) = (index(n + 1, 0), index(n + 1, 1));
            out[up] += v[up1] * c;
            out[up1] += v[up] * c;
            out[dn] -= v[dn1] * c;
            out[dn1] -= v[dn] * c;
        }
    }
    out
}

/// Diagonal of σz ⊗ 1 in the product basis.
pub fn sigma_z_diagonal(n_max: usize) -> Vec<f64> {
    (0..2 * (n_max + 1)).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

/// Parity Π = σx ⊗ exp(iπ a†a); commutes with H at ε = 0.
pub fn parity_operator(n_max: usize) -> TruncatedOperator {
    let dim = 2 * (n_max + 1);
    let mut m = CMat::zeros(dim, dim);
    for n in 0..=n_max {
        let s = if n % 2 == 0 { ONE } else { -ONE };
        m[(index(n, 0), index(n, 1))] = s;
        m[(index(n, 1), index(n, 0))] = s;
    }
    TruncatedOperator::new(m, "Pi")
}

/// n_max from the headroom formula
/// `max(32, ceil(8 α² + 10 α + 2 levels + 20))`, α = λ/ħω0.
pub fn formula_n_max(p: &SystemParams, requested_levels: usize) -> usize {
    let alpha = p.lambda_ratio();
    let n = (8.0 * alpha * alpha + 10.0 * alpha + 2.0 * requested_levels as f64 + 20.0).ceil();
    (n as usize).max(32)
}

/// Picks a Fock truncation for the lowest `requested_levels` levels.
///
/// With `opts.auto`, n_max is doubled from the formula value until the lowest
/// levels change by less than `convergence_tol` relative (with an absolute
/// floor of ħω0 on the scale).
pub fn choose_truncation(
    p: &SystemParams,
    requested_levels: usize,
    opts: TruncationOptions,
) -> Result<FockTruncation> {
    p.validate()?;
    if requested_levels == 0 {
        return Err(Error::invalid("requested_levels must be >= 1"));
    }
    if let Some(n_max) = opts.fixed {
        let t = FockTruncation { n_max, convergence_tol: opts.convergence_tol, auto: false, ceiling: opts.ceiling };
        t.validate()?;
        if 2 * (n_max + 1) < requested_levels {
            return Err(Error::invalid(format!("n_max = {n_max} cannot hold {requested_levels} levels")));
        }
        return Ok(t);
    }
    let mut n_max = formula_n_max(p, requested_levels);
    let base = FockTruncation {
        n_max,
        convergence_tol: opts.convergence_tol,
        auto: opts.auto,
        ceiling: opts.ceiling,
    };
    base.validate()?;
    if n_max > opts.ceiling {
        return Err(Error::TruncationNotConverged {
            ceiling: opts.ceiling,
            detail: format!("formula asks for n_max = {n_max}"),
        });
    }
    if !opts.auto {
        return Ok(base);
    }
    let mut coarse = crate::spectrum::lowest_energies(p, n_max, requested_levels)?;
    loop {
        let fine_n = 2 * n_max;
        if fine_n > opts.ceiling {
            return Err(Error::TruncationNotConverged {
                ceiling: opts.ceiling,
                detail: format!("lowest {requested_levels} levels still moving at n_max = {n_max}"),
            });
        }
        let fine = crate::spectrum::lowest_energies(p, fine_n, requested_levels)?;
        let change = relative_change(&coarse, &fine, p.omega0);
        log::debug!("truncation n_max = {n_max}: relative change {change:.3e}");
        if change < opts.convergence_tol {
            return Ok(FockTruncation { n_max, ..base });
        }
        n_max = fine_n;
        coarse = fine;
    }
}

/// `max_i |a_i − b_i| / max(|b_i|, scale)`.
pub fn relative_change(a: &[f64], b: &[f64], scale: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(scale))
        .fold(0.0, f64::max)
}

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Unnormalized Fock amplitudes `e^{−|α|²/2} αⁿ / sqrt(n!)` for `n = 0..=n_max`,
/// exact for the untruncated coherent state.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    let mut out = Vec::with_capacity(n_max + 1);
    if r == 0.0 {
        out.push(ONE);
        out.resize(n_max + 1, ZERO);
        return out;
    }
    let ln_r = r.ln();
    let mut ln_fact = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let ln_mag = -0.5 * r * r + n as f64 * ln_r - 0.5 * ln_fact;
        out.push(C64::from_polar(ln_mag.exp(), n as f64 * phase));
    }
    out
}

/// Poisson tail `Σ_{n > n_max} |c_n|²` of a coherent state.
fn coherent_tail_mass(r2: f64, n_max: usize) -> f64 {
    if r2 == 0.0 {
        return 0.0;
    }
    let ln_r2 = r2.ln();
    let mut ln_fact: f64 = ln_factorials(n_max).last().copied().unwrap_or(0.0);
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        ln_fact += (n as f64).ln();
        let term = (-r2 + n as f64 * ln_r2 - ln_fact).exp();
        tail += term;
        if (n as f64 > r2 && term < 1e-30 * tail.max(1e-300)) || n > n_max + 100_000 {
            break;
        }
        n += 1;
    }
    tail
}

/// Coherent state |α⟩ = exp(α a† − α* a)|0⟩ on the truncated Fock space.
pub fn coherent_state(alpha: C64, trunc: &FockTruncation) -> Result<PureState> {
    let n_max = trunc.n_max;
    let r2 = alpha.norm_sqr();
    if r2 > n_max as f64 / 4.0 {
        return Err(Error::invalid(format!(
            "|alpha|^2 = {r2} exceeds n_max/4 = {}",
            n_max as f64 / 4.0
        )));
    }
    let tail = coherent_tail_mass(r2, n_max);
    if tail >= 1e-10 {
        return Err(Error::invalid(format!(
            "coherent state tail mass {tail:.3e} beyond n_max = {n_max} exceeds 1e-10"
        )));
    }
    PureState::normalized(coherent_amplitudes(alpha, n_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc(n: usize) -> FockTruncation {
        FockTruncation::new(n).unwrap()
    }

    #[test]
    fn ladder_single_entry_for_one_photon() {
        let a = ladder(1);
        assert_eq!(a[(0, 1)], ONE);
        assert_eq!(a[(0, 0)], ZERO);
        assert_eq!(a[(1, 0)], ZERO);
        assert_eq!(a[(1, 1)], ZERO);
    }

    #[test]
    fn ladder_elements_exact() {
        let a = ladder(20);
        for n in 0..20 {
            assert_eq!(a[(n, n + 1)].re, ((n + 1) as f64).sqrt());
        }
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(FockTruncation::new(7).is_err());
        assert!(FockTruncation::new(8).is_ok());
        let bad = FockTruncation { convergence_tol: 1e-3, ..trunc(8) };
        assert!(build_operators(&bad).is_err());
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let ops = build_operators(&trunc(8)).unwrap();
        let c = linalg::commutator(&ops.a.entries, &ops.a_dag.entries);
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { ONE } else { ZERO };
                assert!((c[(i, j)] - expect).norm() < 1e-14);
            }
        }
        // [X, P] = i/2 away from the last level
        let xp = linalg::commutator(&ops.x.entries, &ops.p.entries);
        for i in 0..8 {
            assert!((xp[(i, i)] - C64::new(0.0, 0.5)).norm() < 1e-14);
        }
    }

    #[test]
    fn lifted_sigma_z_eigen_count() {
        let ops = build_operators(&trunc(32)).unwrap();
        let sz = ops.lift_qubit(&ops.sigma_z);
        let vals = linalg::hermitian_eigenvalues(&sz.entries).unwrap();
        let plus = vals.iter().filter(|v| (*v - 1.0).abs() < 1e-12).count();
        let minus = vals.iter().filter(|v| (*v + 1.0).abs() < 1e-12).count();
        assert_eq!((plus, minus), (33, 33));
    }

    #[test]
    fn hamiltonian_matches_operator_construction() {
        let p = SystemParams::new(0.7, 0.3, 0.45);
        let t = trunc(12);
        let ops = build_operators(&t).unwrap();
        let h = build_hamiltonian(&p, &t).unwrap();
        let half = |s: f64| faer::Scale(C64::new(s, 0.0));
        let sx = ops.lift_qubit(&ops.sigma_x).entries;
        let sz = ops.lift_qubit(&ops.sigma_z).entries;
        let num = ops.lift_oscillator(&ops.number).entries;
        let xa = ops.lift_oscillator(&TruncatedOperator::new(&ops.a.entries + &ops.a_dag.entries, "a+a†")).entries;
        let expect = &sx * half(-0.5 * p.delta) + &sz * half(-0.5 * p.eps) + &num * half(p.omega0)
            + (&xa * &sz) * half(p.lambda);
        let diff = &h.entries - &expect;
        assert!(linalg::max_abs_entry(&diff) < 1e-14);
        assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn sigma_x_free_hamiltonian_commutes_with_sigma_z() {
        let p = SystemParams { delta: 1e-300, ..SystemParams::new(1.0, 0.4, 1.3) };
        let t = trunc(16);
        let mut h = build_hamiltonian(&p, &t).unwrap().entries;
        // Δ = 0 exactly (validate forbids it, so zero the σx entries directly).
        for n in 0..=16 {
            h[(index(n, 0), index(n, 1))] = ZERO;
            h[(index(n, 1), index(n, 0))] = ZERO;
        }
        let ops = build_operators(&t).unwrap();
        let sz = ops.lift_qubit(&ops.sigma_z).entries;
        assert!(linalg::max_abs_entry(&linalg::commutator(&h, &sz)) < 1e-12);
    }

    #[test]
    fn parity_commutes_at_zero_bias() {
        let t = trunc(24);
        let pi = parity_operator(24).entries;
        let h = build_hamiltonian(&SystemParams::new(1.0, 0.0, 1.7), &t).unwrap().entries;
        assert!(linalg::max_abs_entry(&linalg::commutator(&h, &pi)) < 1e-10);
        let hb = build_hamiltonian(&SystemParams::new(1.0, 0.2, 1.7), &t).unwrap().entries;
        assert!(linalg::max_abs_entry(&linalg::commutator(&hb, &pi)) > 1e-3);
    }

    #[test]
    fn g_lambda_round_trip() {
        let p = SystemParams { mass: 2.5, omega0: 0.7, ..SystemParams::new(1.0, 0.0, 0.9) };
        let back = p.lambda_from_g(p.g());
        assert!(((back - p.lambda) / p.lambda).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(SystemParams::new(0.0, 0.0, 1.0).validate().is_err());
        assert!(SystemParams::new(1.0, 0.0, -0.1).validate().is_err());
        assert!(SystemParams { omega0: 0.0, ..SystemParams::new(1.0, 0.0, 1.0) }.validate().is_err());
        assert!(SystemParams::new(f64::NAN, 0.0, 1.0).validate().is_err());
        let p = SystemParams::new(1.0, -0.5, 0.0);
        assert!(p.theta() < 0.0 && p.theta() > -std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn formula_floor_and_growth() {
        let p0 = SystemParams::new(1.0, 0.0, 0.0);
        for levels in 1..=5 {
            assert_eq!(formula_n_max(&p0, levels), 32);
        }
        let p3 = SystemParams::new(1.0, 0.0, 3.0);
        let n = formula_n_max(&p3, 1);
        assert_eq!(n, 124);
        assert!(formula_n_max(&p3, 10) >= 132);
    }

    #[test]
    fn fixed_truncation_overrides_formula() {
        let p = SystemParams::new(1.0, 0.0, 3.0);
        let opts = TruncationOptions { fixed: Some(40), ..Default::default() };
        assert_eq!(choose_truncation(&p, 4, opts).unwrap().n_max, 40);
        let tiny = TruncationOptions { fixed: Some(4), ..Default::default() };
        assert!(choose_truncation(&p, 1, tiny).is_err());
    }

    #[test]
    fn vacuum_is_exact() {
        let s = coherent_state(ZERO, &trunc(16)).unwrap();
        assert_eq!(s.amplitudes[0], ONE);
        assert!(s.amplitudes[1..].iter().all(|c| *c == ZERO));
    }

    #[test]
    fn coherent_rejects_large_amplitude() {
        assert!(coherent_state(C64::new(3.0, 0.0), &trunc(32)).is_err());
        // within n_max/4 but the Poisson tail is still too heavy at small n_max
        assert!(coherent_state(C64::new(2.0f64.sqrt(), 0.0), &trunc(8)).is_err());
    }
}
