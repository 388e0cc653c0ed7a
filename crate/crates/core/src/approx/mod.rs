//! Closed-form and semi-analytic approximations used to cross-check the exact
//! spectra.

mod adiabatic;
mod laguerre;
mod semiclassical;

pub use adiabatic::{
    adiabatic_qubit_analysis, critical_lambda, effective_curvature, effective_force_gradient,
    effective_potential, is_supercritical, omega_tilde_sq, potential_minima, well_position,
    wkb_analysis, wkb_splitting, AdiabaticQubitAnalysis, AdiabaticQubitReport, Branch, WkbReport,
};
pub use laguerre::{displaced_number_overlap, laguerre, laguerre_log, renormalized_gap};
pub use semiclassical::{
    kappa, semiclassical_stationary_points, BranchSign, SemiclassicalSolution, Stability,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::SystemParams;

/// Two-level effective Hamiltonian `[[diag, offdiag], [offdiag, −diag]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveQubit2x2 {
    pub diag: f64,
    pub offdiag: f64,
    pub basis_label: String,
    /// Oscillation frequency of an excitation at resonance, `2 |offdiag|`.
    pub rabi_frequency: f64,
    /// True when the coupling is outside the weak-coupling regime.
    pub weak_coupling_violated: bool,
}

impl EffectiveQubit2x2 {
    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = self.diag.hypot(self.offdiag);
        [-r, r]
    }

    pub fn splitting(&self) -> f64 {
        2.0 * self.diag.hypot(self.offdiag)
    }
}

/// Rotating-wave effective Hamiltonian in the `{|n−1, e⟩, |n, g⟩}` doublet:
/// detuning `δ = E_q − ħω0` on the diagonal (±δ/2) and `λ sqrt(n) cos θ` off it.
pub fn rwa_effective_hamiltonian(p: &SystemParams, n: usize) -> Result<EffectiveQubit2x2> {
    p.validate()?;
    if n == 0 {
        return Err(Error::invalid("the RWA doublet index n must be >= 1"));
    }
    let off = p.lambda * (n as f64).sqrt() * p.theta().cos();
    let violated = p.lambda >= 0.1 * p.e_q().min(p.omega0);
    if violated {
        log::warn!("lambda = {} is outside the weak-coupling regime", p.lambda);
    }
    Ok(EffectiveQubit2x2 {
        diag: 0.5 * (p.e_q() - p.omega0),
        offdiag: off,
        basis_label: format!("|{}, e>, |{}, g>", n - 1, n),
        rabi_frequency: 2.0 * off.abs(),
        weak_coupling_violated: violated,
    })
}

/// Adiabatic-oscillator effective Hamiltonian for the n-th displaced doublet:
/// `−(ε/2) σz − (Δ̃_n / 2) σx`.
pub fn adiabatic_oscillator_hamiltonian(p: &SystemParams, n: usize) -> Result<EffectiveQubit2x2> {
    p.validate()?;
    let gap = renormalized_gap(p, n);
    Ok(EffectiveQubit2x2 {
        diag: -0.5 * p.eps,
        offdiag: -0.5 * gap,
        basis_label: format!("|{n}, up>, |{n}, down> (displaced)"),
        rabi_frequency: gap.abs(),
        weak_coupling_violated: false,
    })
}

/// Relative size of the kinetic-energy and potential-energy corrections in
/// the adiabatic-qubit picture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticCorrection {
    /// `ħ g² / (m ω0 E_q²)`.
    pub kinetic: f64,
    /// `g² / (m ω0² E_q)`.
    pub potential: f64,
    /// `kinetic / potential = ħω0 / E_q`.
    pub ratio: f64,
}

pub fn kinetic_correction_ratio(p: &SystemParams) -> KineticCorrection {
    let g = p.g();
    let eq = p.e_q();
    KineticCorrection {
        kinetic: g * g / (p.mass * p.omega0 * eq * eq),
        potential: g * g / (p.mass * p.omega0 * p.omega0 * eq),
        ratio: p.omega0 / eq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonant_rwa_splitting_is_two_lambda() {
        let p = SystemParams::new(1.0, 0.0, 0.02);
        let h = rwa_effective_hamiltonian(&p, 1).unwrap();
        assert!((h.splitting() - 0.04).abs() < 1e-15);
        assert!(!h.weak_coupling_violated);
        assert!(rwa_effective_hamiltonian(&p, 0).is_err());
        let h2 = rwa_effective_hamiltonian(&p, 4).unwrap();
        assert!((h2.rabi_frequency - 0.08).abs() < 1e-15);
    }

    #[test]
    fn rwa_offdiag_vanishes_for_pure_bias() {
        let p = SystemParams::from_omega_over_eq(1.0, std::f64::consts::FRAC_PI_2 - 1e-12, 0.05);
        let h = rwa_effective_hamiltonian(&p, 1).unwrap();
        assert!(h.offdiag.abs() < 1e-12);
    }

    #[test]
    fn kinetic_ratio_identity() {
        for (d, e, l) in [(100.0, 0.0, 3.0), (1.0, 0.0, 0.7), (2.0, 1.5, 0.2)] {
            let p = SystemParams::new(d, e, l);
            let k = kinetic_correction_ratio(&p);
            assert_eq!(k.ratio, 1.0 / p.e_q());
            assert!((k.kinetic / k.potential - k.ratio).abs() < 1e-14 * k.ratio);
        }
        let p = SystemParams::from_omega_over_delta(0.01, 0.0, 1.0);
        assert!((kinetic_correction_ratio(&p).ratio - 0.01).abs() < 1e-15);
    }
}
