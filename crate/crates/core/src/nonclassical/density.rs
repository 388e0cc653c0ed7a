use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{index, PureState};
use crate::linalg::{self, CMat, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    Oscillator,
    Qubit,
}

/// Reduced state of one subsystem.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub entries: CMat,
    pub subsystem: Subsystem,
}

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `|ψ⟩⟨ψ|` for a state of the given subsystem.
    pub fn from_pure(amps: &[C64], subsystem: Subsystem) -> Self {
        let d = amps.len();
        DensityMatrix { entries: CMat::from_fn(d, d, |i, j| amps[i] * amps[j].conj()), subsystem }
    }

    /// `Σ_i w_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(parts: &[(f64, &[C64])], subsystem: Subsystem) -> Result<Self> {
        let d = parts.first().map(|p| p.1.len()).ok_or_else(|| Error::invalid("empty mixture"))?;
        let mut m = CMat::zeros(d, d);
        for (w, v) in parts {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: v.len() });
            }
            for j in 0..d {
                for i in 0..d {
                    m[(i, j)] += v[i] * v[j].conj() * *w;
                }
            }
        }
        Ok(DensityMatrix { entries: m, subsystem })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            for i in 0..d {
                acc += self.entries[(i, j)].norm_sqr();
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &CMat) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self.entries[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    /// Checks unit trace, Hermiticity and positivity.
    pub fn check_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} differs from 1")));
        }
        let h = linalg::hermiticity_defect(&self.entries);
        if h > HERMITIAN_TOL {
            return Err(Error::invalid(format!("density matrix Hermiticity defect {h:.3e}")));
        }
        let min = self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOL {
            return Err(Error::invalid(format!("density matrix eigenvalue {min:.3e} < 0")));
        }
        Ok(())
    }

    /// Number of leading Fock levels carrying all but `tail` of the population.
    pub(crate) fn effective_dim(&self, tail: f64) -> usize {
        let d = self.dim();
        let mut acc = 0.0;
        for n in (0..d).rev() {
            acc += self.entries[(n, n)].re.abs();
            if acc > tail {
                return n + 1;
            }
        }
        1
    }
}

/// Partial trace of a qubit⊗oscillator state, keeping `keep`.
pub fn reduce(state: &PureState, keep: Subsystem) -> Result<DensityMatrix> {
    let fock = state.fock_dim()?;
    let psi = &state.amplitudes;
    let entries = match keep {
        Subsystem::Oscillator => CMat::from_fn(fock, fock, |n, m| {
            psi[index(n, 0)] * psi[index(m, 0)].conj() + psi[index(n, 1)] * psi[index(m, 1)].conj()
        }),
        Subsystem::Qubit => CMat::from_fn(2, 2, |q, r| {
            let mut acc = ZERO;
            for n in 0..fock {
                acc += psi[index(n, q)] * psi[index(n, r)].conj();
            }
            acc
        }),
    };
    Ok(DensityMatrix { entries, subsystem: keep })
}

/// Eigenvalues of a 2×2 qubit density matrix, ascending.
pub fn qubit_eigenvalues(rho: &DensityMatrix) -> [f64; 2] {
    let a = rho.entries[(0, 0)].re;
    let d = rho.entries[(1, 1)].re;
    let b = rho.entries[(0, 1)];
    let tr = a + d;
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [0.5 * tr - r, 0.5 * tr + r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::qubit;
    use crate::linalg::ONE;

    #[test]
    fn product_state_reduces_to_pure() {
        let osc = PureState::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO]).unwrap();
        let s = PureState::product(&osc, qubit::PLUS).unwrap();
        for keep in [Subsystem::Oscillator, Subsystem::Qubit] {
            let r = reduce(&s, keep).unwrap();
            assert!((r.purity() - 1.0).abs() < 1e-12);
            r.check_invariants().unwrap();
        }
    }

    #[test]
    fn bell_state_gives_maximally_mixed_qubit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 4];
        amps[index(0, 0)] = C64::new(h, 0.0);
        amps[index(1, 1)] = C64::new(h, 0.0);
        let r = reduce(&PureState::new(amps).unwrap(), Subsystem::Qubit).unwrap();
        assert!((r.entries[(0, 0)] - 0.5 * ONE).norm() < 1e-15);
        assert!((r.entries[(1, 1)] - 0.5 * ONE).norm() < 1e-15);
        assert!(r.entries[(0, 1)].norm() < 1e-15);
        let ev = qubit_eigenvalues(&r);
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn odd_dimension_rejected() {
        let s = PureState::normalized(vec![ONE; 3]).unwrap();
        assert!(reduce(&s, Subsystem::Qubit).is_err());
    }
}
