//! Markovian golden-rule relaxation and pure-dephasing rates for a qubit
//! (`σz`) or oscillator (`a + a†`) environment coupling.

use serde::{Deserialize, Serialize};

use crate::approx::{is_supercritical, well_position};
use crate::error::{Error, Result};
use crate::hilbert::{PureState, SystemParams, TruncationOptions};
use crate::linalg::{self, C64, ZERO};
use crate::nonclassical::{entanglement_entropy, mean_x_and_sigma_z};
use crate::spectrum::{self, EigenSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelOperator {
    /// `σz ⊗ 1`.
    SigmaZ,
    /// `1 ⊗ (a + a†)`.
    OscillatorX,
}

impl ChannelOperator {
    /// `A|v⟩` on a qubit⊗oscillator vector.
    pub fn apply(self, v: &[C64]) -> Vec<C64> {
        let fock = v.len() / 2;
        match self {
            ChannelOperator::SigmaZ => v.iter().enumerate().map(|(i, z)| if i % 2 == 0 { *z } else { -z }).collect(),
            ChannelOperator::OscillatorX => {
                let mut out = vec![ZERO; v.len()];
                for n in 0..fock {
                    for q in 0..2 {
                        let mut acc = ZERO;
                        if n > 0 {
                            acc += v[2 * (n - 1) + q] * (n as f64).sqrt();
                        }
                        if n + 1 < fock {
                            acc += v[2 * (n + 1) + q] * ((n + 1) as f64).sqrt();
                        }
                        out[2 * n + q] = acc;
                    }
                }
                out
            }
        }
    }

    /// `⟨a|A|b⟩`.
    pub fn element(self, a: &PureState, b: &PureState) -> C64 {
        linalg::inner(&a.amplitudes, &self.apply(&b.amplitudes))
    }
}

/// Environment spectral density `S(ω) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralDensity {
    Constant(f64),
    /// Linear interpolation on ascending `omega`, flat beyond the ends.
    Tabulated { omega: Vec<f64>, values: Vec<f64> },
}

impl SpectralDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::Constant(s) => {
                if !(*s >= 0.0) || !s.is_finite() {
                    return Err(Error::invalid(format!("spectral density must be >= 0, got {s}")));
                }
            }
            SpectralDensity::Tabulated { omega, values } => {
                if omega.is_empty() || omega.len() != values.len() {
                    return Err(Error::invalid("spectral table needs matching, non-empty omega and values"));
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("spectral table omega must be strictly ascending"));
                }
                if values.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
                    return Err(Error::invalid("spectral table values must be >= 0"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, w: f64) -> f64 {
        match self {
            SpectralDensity::Constant(s) => *s,
            SpectralDensity::Tabulated { omega, values } => {
                let k = omega.partition_point(|&o| o <= w);
                if k == 0 {
                    values[0]
                } else if k == omega.len() {
                    values[k - 1]
                } else {
                    let t = (w - omega[k - 1]) / (omega[k] - omega[k - 1]);
                    values[k - 1] + t * (values[k] - values[k - 1])
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub operator: ChannelOperator,
    pub spectral_density: SpectralDensity,
    pub label: String,
}

impl NoiseChannel {
    pub fn white(operator: ChannelOperator, s0: f64) -> Self {
        let label = match operator {
            ChannelOperator::SigmaZ => "sigma_z",
            ChannelOperator::OscillatorX => "oscillator_x",
        };
        NoiseChannel { operator, spectral_density: SpectralDensity::Constant(s0), label: label.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    /// `Γ_{i→j} = (π/2) S(E_i − E_j) |⟨i|A|j⟩|²`.
    pub relaxation: f64,
    /// `Γ_φ = π S(0) |⟨i|A|i⟩ − ⟨j|A|j⟩|²`.
    pub dephasing: f64,
    pub matrix_element_sq: f64,
    pub diag_difference_sq: f64,
    pub s_at_gap: f64,
    pub s0: f64,
}

/// Rates between two arbitrary states with energies `e_i ≥ e_j`.
pub fn rates_between(a: &PureState, e_i: f64, b: &PureState, e_j: f64, ch: &NoiseChannel) -> Result<RatePair> {
    ch.spectral_density.validate()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    if e_i < e_j {
        return Err(Error::invalid(format!("relaxation needs E_i >= E_j, got {e_i} < {e_j}")));
    }
    let op = ch.operator;
    let m2 = op.element(a, b).norm_sqr();
    let d2 = (op.element(a, a).re - op.element(b, b).re).powi(2);
    let s_gap = ch.spectral_density.eval(e_i - e_j);
    let s0 = ch.spectral_density.eval(0.0);
    let pi = std::f64::consts::PI;
    Ok(RatePair {
        relaxation: 0.5 * pi * s_gap * m2,
        dephasing: pi * s0 * d2,
        matrix_element_sq: m2,
        diag_difference_sq: d2,
        s_at_gap: s_gap,
        s0,
    })
}

/// Rates between eigenstates `i` (upper) and `j` (lower).
pub fn rates(eigs: &EigenSolution, ch: &NoiseChannel, i: usize, j: usize) -> Result<RatePair> {
    if i == j {
        return Err(Error::invalid("rates need two distinct states"));
    }
    let k = eigs.len();
    if i >= k || j >= k {
        return Err(Error::invalid(format!("state index out of range: {i}, {j} with {k} states")));
    }
    rates_between(&eigs.states[i], eigs.energies[i], &eigs.states[j], eigs.energies[j], ch)
}

/// `4π S0`: σz dephasing between `|n,↑⟩` and `|n′,↓⟩` away from degeneracy.
pub fn away_from_degeneracy_dephasing(s0: f64) -> f64 {
    4.0 * std::f64::consts::PI * s0
}

fn supercritical_params(eigs: &EigenSolution) -> Result<SystemParams> {
    let p = eigs.params.ok_or_else(|| Error::invalid("eigen solution carries no parameters"))?;
    if p.eps != 0.0 {
        return Err(Error::invalid("the localized basis needs eps = 0"));
    }
    if !is_supercritical(&p) {
        return Err(Error::Subcritical { ratio: p.critical_ratio() });
    }
    Ok(p)
}

/// `(|2n⟩ ± |2n+1⟩)/√2`, ordered left well (⟨X⟩ < 0) then right well.
pub fn localized_basis(eigs: &EigenSolution, pair_index: usize) -> Result<[PureState; 2]> {
    supercritical_params(eigs)?;
    let (a, b) = (2 * pair_index, 2 * pair_index + 1);
    if b >= eigs.len() {
        return Err(Error::invalid(format!("pair {pair_index} needs {} states, have {}", b + 1, eigs.len())));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let combine = |s: f64| {
        let v = eigs.states[a].amplitudes.iter().zip(&eigs.states[b].amplitudes).map(|(x, y)| (x + y * s) * r);
        PureState::normalized(v.collect())
    };
    let plus = combine(1.0)?;
    let minus = combine(-1.0)?;
    if mean_x_and_sigma_z(&plus).0 < mean_x_and_sigma_z(&minus).0 {
        Ok([plus, minus])
    } else {
        Ok([minus, plus])
    }
}

/// Localized-basis dephasing element of the oscillator channel and the
/// shifted-ladder check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellDephasingReport {
    /// `|⟨L|(a+a†)|L⟩ − ⟨R|(a+a†)|R⟩|²` for the lowest pair.
    pub numeric: f64,
    /// `8 m ω0 x0² / ħ`.
    pub analytic: f64,
    pub x0: f64,
    /// `|⟨L_n|(a+a†)|L_{n−1}⟩|` for `n = 1, 2, ...` within the left well.
    pub ladder_elements: Vec<f64>,
    /// Largest relative deviation of `ladder_elements` from `sqrt(n)`.
    pub ladder_max_deviation: f64,
}

impl WellDephasingReport {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.analytic).abs() / self.analytic
    }
}

/// Needs at least two eigenpairs; every further pair adds a ladder element.
pub fn well_dephasing_element(p: &SystemParams, eigs: &EigenSolution) -> Result<WellDephasingReport> {
    let ep = supercritical_params(eigs)?;
    if ep != *p {
        return Err(Error::invalid("eigen solution was computed for different parameters"));
    }
    let x0 = well_position(p)?;
    let op = ChannelOperator::OscillatorX;
    let [l0, r0] = localized_basis(eigs, 0)?;
    let numeric = (op.element(&l0, &l0).re - op.element(&r0, &r0).re).powi(2);
    let mut ladder = Vec::new();
    let mut prev = l0;
    for n in 1..eigs.len() / 2 {
        let [l, _] = localized_basis(eigs, n)?;
        ladder.push(op.element(&l, &prev).norm());
        prev = l;
    }
    let dev = ladder
        .iter()
        .enumerate()
        .map(|(k, v)| (v / ((k + 1) as f64).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(WellDephasingReport {
        numeric,
        analytic: 8.0 * p.mass * p.omega0 * x0 * x0,
        x0,
        ladder_elements: ladder,
        ladder_max_deviation: dev,
    })
}

/// Mean photon number assumed for the well states in the worked example.
pub const WORKED_PHOTON_NUMBER: f64 = 5.0;
/// Oscillator decay rates bracketing the worked example, in MHz.
pub const WORKED_DECAY_MHZ: [f64; 2] = [0.1, 1.0];

/// Ground-state figures at `λ = ħω0 = Δ`, `ε = 0`, and the well-dephasing
/// estimate in MHz for `ħω0 = 1 GHz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkedExample {
    pub entropy: f64,
    /// `E2 − E1` in units of ħω0.
    pub gap: f64,
    /// `|2α − (−2α)|² = 16 ⟨n⟩` for well states displaced by `±α`.
    pub dephasing_element: f64,
    pub decay_mhz: [f64; 2],
    /// `π S(0) · element` with `S(0)` inferred from the one-photon decay rate.
    pub dephasing_mhz: [f64; 2],
}

pub fn worked_example() -> Result<WorkedExample> {
    let p = SystemParams::new(1.0, 0.0, 1.0);
    let eigs = spectrum::solve_auto(&p, 2, TruncationOptions::default())?;
    let entropy = entanglement_entropy(&eigs.states[0])?;
    let element = 16.0 * WORKED_PHOTON_NUMBER;
    let pi = std::f64::consts::PI;
    // one-photon decay (π/2) S |⟨0|a+a†|1⟩|² = Γ fixes S = 2Γ/π
    let deph = WORKED_DECAY_MHZ.map(|g| pi * (2.0 * g / pi) * element);
    Ok(WorkedExample {
        entropy,
        gap: (eigs.energies[1] - eigs.energies[0]) / p.omega0,
        dephasing_element: element,
        decay_mhz: WORKED_DECAY_MHZ,
        dephasing_mhz: deph,
    })
}
