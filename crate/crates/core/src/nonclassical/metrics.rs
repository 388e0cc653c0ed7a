use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{qubit_eigenvalues, reduce, DensityMatrix, Subsystem};
use crate::error::{Error, Result};
use crate::format::Table;
use crate::hilbert::{choose_truncation, FockTruncation, PureState, SystemParams, TruncationOptions};
use crate::linalg::ZERO;
use crate::spectrum;

/// Quadrature fluctuations of an oscillator state, in units where the
/// vacuum has `Var(X) = Var(P) = 1/4` and ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    /// `4 Var(X) − 1`.
    pub s_x: f64,
    /// `4 Var(P) − 1`.
    pub s_p: f64,
    /// `Var(X) Var(P)` scaled so that a minimum-uncertainty state gives 1/4.
    pub k_product: f64,
    /// `⟨X⟩`.
    pub mean_x: f64,
    /// `⟨P⟩`.
    pub mean_p: f64,
}

pub fn squeezing(rho: &DensityMatrix) -> Result<SqueezingReport> {
    if rho.subsystem != Subsystem::Oscillator {
        return Err(Error::invalid("squeezing needs an oscillator density matrix"));
    }
    let r = &rho.entries;
    let d = rho.dim();
    let mut a = ZERO;
    let mut a2 = ZERO;
    let mut num = 0.0;
    for m in 0..d {
        num += m as f64 * r[(m, m)].re;
        if m + 1 < d {
            a += r[(m + 1, m)] * ((m + 1) as f64).sqrt();
        }
        if m + 2 < d {
            a2 += r[(m + 2, m)] * (((m + 1) * (m + 2)) as f64).sqrt();
        }
    }
    let mean_x = a.re;
    let mean_p = a.im;
    let x2 = 0.25 * (2.0 * a2.re + 2.0 * num + 1.0);
    let p2 = 0.25 * (-2.0 * a2.re + 2.0 * num + 1.0);
    let s_x = 4.0 * (x2 - mean_x * mean_x) - 1.0;
    let s_p = 4.0 * (p2 - mean_p * mean_p) - 1.0;
    Ok(SqueezingReport { s_x, s_p, k_product: 0.25 * (1.0 + s_x) * (1.0 + s_p), mean_x, mean_p })
}

/// Von Neumann entropy (bits) of the qubit reduced state.
pub fn entanglement_entropy(state: &PureState) -> Result<f64> {
    let rho = reduce(state, Subsystem::Qubit)?;
    Ok(qubit_entropy(&rho))
}

pub fn qubit_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = qubit_eigenvalues(rho)
        .iter()
        .filter(|&&l| l >= 1e-14)
        .map(|&l| -l * l.log2())
        .sum();
    s.clamp(0.0, 1.0)
}

/// Lowest eigenvector of the Hamiltonian; even parity on exact ties at ε = 0.
pub fn ground_state(p: &SystemParams, trunc: &FockTruncation) -> Result<PureState> {
    Ok(spectrum::solve(p, trunc, 1)?.states.swap_remove(0))
}

/// Ground-state nonclassicality at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateMetrics {
    /// λ / ħω0.
    pub lambda: f64,
    pub squeezing: SqueezingReport,
    pub entropy: f64,
    pub n_max: usize,
}

pub fn ground_state_metrics(p: &SystemParams, opts: TruncationOptions) -> Result<GroundStateMetrics> {
    let trunc = choose_truncation(p, 1, opts)?;
    let gs = ground_state(p, &trunc)?;
    let rho = reduce(&gs, Subsystem::Oscillator)?;
    Ok(GroundStateMetrics {
        lambda: p.lambda_ratio(),
        squeezing: squeezing(&rho)?,
        entropy: entanglement_entropy(&gs)?,
        n_max: trunc.n_max,
    })
}

/// `ground_state_metrics` over a grid of λ/ħω0.
pub fn metrics_scan(
    p_base: &SystemParams,
    lambda_grid: &[f64],
    opts: TruncationOptions,
) -> Result<Vec<GroundStateMetrics>> {
    lambda_grid
        .par_iter()
        .map(|&l| ground_state_metrics(&p_base.with_lambda(l * p_base.omega0), opts).map_err(|e| e.at_lambda(l)))
        .collect()
}

/// Table `lambda, s_x, s_p, K, S`.
pub fn metrics_table(rows: &[GroundStateMetrics]) -> Table {
    let mut t = Table::new(["lambda", "s_x", "s_p", "K", "S"]);
    for r in rows {
        t.push(vec![r.lambda, r.squeezing.s_x, r.squeezing.s_p, r.squeezing.k_product, r.entropy]);
    }
    t
}

/// Upper end of the onset scan, in units of ħω0.
pub const ONSET_LAMBDA_MAX: f64 = 6.0;
const ONSET_SCAN_POINTS: usize = 121;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetResult {
    /// λ at which S first reaches the target, in energy units.
    pub lambda: f64,
    /// The same in units of ħω0.
    pub lambda_ratio: f64,
    /// Whether S was non-decreasing over the whole scan.
    pub monotone: bool,
}

fn entropy_at(p_base: &SystemParams, l: f64, opts: TruncationOptions) -> Result<f64> {
    let p = p_base.with_lambda(l * p_base.omega0);
    let trunc = choose_truncation(&p, 1, opts)?;
    entanglement_entropy(&ground_state(&p, &trunc)?).map_err(|e| e.at_lambda(l))
}

/// Smallest λ with `S(λ) = s_target`, by bisection inside the first bracketing
/// interval of a scan over λ/ħω0 ∈ [0, 6].
pub fn onset_coupling(p_base: &SystemParams, s_target: f64, opts: TruncationOptions) -> Result<OnsetResult> {
    p_base.validate()?;
    if !(s_target > 0.0 && s_target < 1.0) {
        return Err(Error::invalid(format!("target entropy must lie in (0, 1), got {s_target}")));
    }
    let grid = spectrum::linspace(0.0, ONSET_LAMBDA_MAX, ONSET_SCAN_POINTS);
    let s: Vec<f64> = grid.par_iter().map(|&l| entropy_at(p_base, l, opts)).collect::<Result<_>>()?;
    let monotone = s.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    if !monotone {
        log::warn!("entropy is not monotone in lambda over the onset scan");
    }
    let k = s
        .iter()
        .position(|&v| v >= s_target)
        .ok_or_else(|| Error::NotBracketed(format!("S < {s_target} for lambda/hbar*omega0 <= {ONSET_LAMBDA_MAX}")))?;
    if k == 0 {
        return Err(Error::NotBracketed("S already exceeds the target at lambda = 0".into()));
    }
    let (mut lo, mut hi) = (grid[k - 1], grid[k]);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if entropy_at(p_base, mid, opts)? < s_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    Ok(OnsetResult { lambda: l * p_base.omega0, lambda_ratio: l, monotone })
}

/// `⟨X⟩` and `⟨σz⟩` of a qubit⊗oscillator state.
pub fn mean_x_and_sigma_z(state: &PureState) -> (f64, f64) {
    let psi = &state.amplitudes;
    let mut a = ZERO;
    let mut sz = 0.0;
    let n = psi.len() / 2;
    for k in 0..n {
        sz += psi[2 * k].norm_sqr() - psi[2 * k + 1].norm_sqr();
        if k + 1 < n {
            let s = ((k + 1) as f64).sqrt();
            a += (psi[2 * k].conj() * psi[2 * k + 2] + psi[2 * k + 1].conj() * psi[2 * k + 3]) * s;
        }
    }
    (a.re, sz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, qubit};
    use crate::linalg::C64;

    #[test]
    fn vacuum_is_minimum_uncertainty() {
        let rho = DensityMatrix::from_pure(&PureState::fock(0, 10).amplitudes, Subsystem::Oscillator);
        let s = squeezing(&rho).unwrap();
        assert!(s.s_x.abs() < 1e-15 && s.s_p.abs() < 1e-15);
        assert!((s.k_product - 0.25).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_is_unsqueezed() {
        let t = FockTruncation::new(48).unwrap();
        let st = coherent_state(C64::new(1.5, 0.5), &t).unwrap();
        let s = squeezing(&DensityMatrix::from_pure(&st.amplitudes, Subsystem::Oscillator)).unwrap();
        assert!(s.s_x.abs() < 1e-9 && s.s_p.abs() < 1e-9);
        assert!((s.mean_x - 1.5).abs() < 1e-9 && (s.mean_p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let osc = PureState::fock(3, 9);
        let st = PureState::product(&osc, qubit::MINUS).unwrap();
        assert_eq!(entanglement_entropy(&st).unwrap(), 0.0);
    }

    #[test]
    fn uncoupled_ground_state() {
        let p = SystemParams::new(1.0, 0.0, 0.0);
        let gs = ground_state(&p, &FockTruncation::new(16).unwrap()).unwrap();
        let expect = PureState::product(&PureState::fock(0, 17), qubit::PLUS).unwrap();
        assert!((gs.inner(&expect).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn onset_rejects_bad_target() {
        let p = SystemParams::new(1.0, 0.0, 0.0);
        assert!(onset_coupling(&p, 1.0, TruncationOptions::default()).is_err());
        assert!(onset_coupling(&p, 0.0, TruncationOptions::default()).is_err());
    }
}
