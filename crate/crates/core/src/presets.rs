//! Parameter bundles reproducing each published figure panel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::hilbert::SystemParams;
use crate::nonclassical::FieldKind;
use crate::spectrum::{self, EnergyUnit};

/// The ratio that fixes the qubit energy scale with ħω0 = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ratio {
    /// ħω0/E_q; the bias enters through θ.
    OmegaOverEq(f64),
    /// ħω0/Δ; the bias enters through ε/Δ.
    OmegaOverDelta(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PresetKind {
    /// Lowest `levels` energies versus λ.
    Levels { theta: f64, levels: usize },
    /// `E_{2n+2} − E_{2n+1}` versus λ, one curve per (θ, n).
    PairSplitting { thetas: Vec<f64>, pairs: Vec<usize>, unit: EnergyUnit, log_scale: bool },
    /// Oscillator phase-space distribution of the ground state at one λ.
    PhaseSpace { lambda: f64, field: FieldKind },
    /// `s_x, s_p, K` versus λ, one curve per ε/Δ.
    Squeezing { eps_over_delta: Vec<f64> },
    /// Qubit entropy versus λ, one curve per ε/Δ.
    Entropy { eps_over_delta: Vec<f64> },
    /// λ/Δ at which the entropy reaches each target, versus ħω0/Δ at ε = 0.
    Onset { omega_over_delta: Vec<f64>, targets: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigurePreset {
    pub id: String,
    pub ratio: Option<Ratio>,
    /// λ/ħω0 range and number of points; unused by phase-space and onset presets.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_steps: usize,
    #[serde(flatten)]
    pub kind: PresetKind,
}

const EPS_LIST: [f64; 4] = [0.0, 0.1, 0.5, 1.0];
const THETAS: [f64; 3] = [0.0, PI / 6.0, PI / 3.0];
const PHASE_SPACE_LAMBDAS: [f64; 4] = [0.5, 2.0, 2.5, 3.5];
const METRIC_SCAN_POINTS: usize = 60;

fn panel(k: usize) -> char {
    (b'a' + k as u8) as char
}

fn theta_label(t: f64) -> &'static str {
    if t == 0.0 {
        "0"
    } else if (t - PI / 6.0).abs() < 1e-15 {
        "pi/6"
    } else {
        "pi/3"
    }
}

/// Log-spaced ħω0/Δ grid for the onset preset: 4 points per decade.
pub fn onset_ratio_grid() -> Vec<f64> {
    (0..=16).map(|k| 10f64.powf(-2.0 + k as f64 / 4.0)).collect()
}

/// Every preset, in a fixed order.
pub fn all_presets() -> Vec<FigurePreset> {
    let mut out = Vec::new();
    let levels = |id: String, r: f64, theta: f64, lmax: f64| FigurePreset {
        id,
        ratio: Some(Ratio::OmegaOverEq(r)),
        lambda_min: 0.0,
        lambda_max: lmax,
        lambda_steps: 101,
        kind: PresetKind::Levels { theta, levels: 10 },
    };
    for (k, &t) in THETAS.iter().enumerate() {
        out.push(levels(format!("fig3{}", panel(k)), 1.0, t, 2.5));
    }
    for (k, log_scale) in [false, true].into_iter().enumerate() {
        out.push(FigurePreset {
            id: format!("fig4{}", panel(k)),
            ratio: Some(Ratio::OmegaOverEq(1.0)),
            lambda_min: 0.0,
            lambda_max: 2.5,
            lambda_steps: 101,
            kind: PresetKind::PairSplitting {
                thetas: THETAS.to_vec(),
                pairs: vec![0],
                unit: EnergyUnit::Oscillator,
                log_scale,
            },
        });
    }
    out.push(levels("fig5".into(), 10.0, 0.0, 2.0));
    for (k, &t) in THETAS.iter().enumerate() {
        out.push(FigurePreset {
            id: format!("fig6{}", panel(k)),
            ratio: Some(Ratio::OmegaOverEq(10.0)),
            lambda_min: 0.0,
            lambda_max: 2.0,
            lambda_steps: 201,
            kind: PresetKind::PairSplitting {
                thetas: vec![t],
                pairs: vec![0, 1, 2, 3],
                unit: EnergyUnit::Qubit,
                log_scale: false,
            },
        });
    }
    for (k, &t) in THETAS.iter().enumerate() {
        out.push(levels(format!("fig7{}", panel(k)), 0.01, t, 8.0));
    }
    for (k, &l) in PHASE_SPACE_LAMBDAS.iter().enumerate() {
        for (j, field) in [FieldKind::Q, FieldKind::Wigner].into_iter().enumerate() {
            out.push(FigurePreset {
                id: format!("fig8{}", panel(2 * k + j)),
                ratio: Some(Ratio::OmegaOverDelta(0.1)),
                lambda_min: l,
                lambda_max: l,
                lambda_steps: 1,
                kind: PresetKind::PhaseSpace { lambda: l, field },
            });
        }
    }
    for (fig, make) in [
        (9, (|e: Vec<f64>| PresetKind::Squeezing { eps_over_delta: e }) as fn(Vec<f64>) -> PresetKind),
        (10, |e| PresetKind::Entropy { eps_over_delta: e }),
    ] {
        for (k, r) in [0.1, 1.0, 10.0].into_iter().enumerate() {
            out.push(FigurePreset {
                id: format!("fig{fig}{}", panel(k)),
                ratio: Some(Ratio::OmegaOverDelta(r)),
                lambda_min: 0.0,
                lambda_max: 3.0,
                lambda_steps: METRIC_SCAN_POINTS,
                kind: make(EPS_LIST.to_vec()),
            });
        }
    }
    out.push(FigurePreset {
        id: "fig11".into(),
        ratio: None,
        lambda_min: 0.0,
        lambda_max: crate::nonclassical::ONSET_LAMBDA_MAX,
        lambda_steps: 121,
        kind: PresetKind::Onset { omega_over_delta: onset_ratio_grid(), targets: vec![0.1, 0.5] },
    });
    out
}

pub fn preset(id: &str) -> Option<FigurePreset> {
    all_presets().into_iter().find(|p| p.id == id)
}

fn params_for(ratio: Ratio, bias: f64, lambda: f64) -> SystemParams {
    match ratio {
        Ratio::OmegaOverEq(r) => SystemParams::from_omega_over_eq(r, bias, lambda),
        Ratio::OmegaOverDelta(r) => SystemParams::from_omega_over_delta(r, bias, lambda),
    }
}

impl FigurePreset {
    /// CLI subcommand that produces this preset's output.
    pub fn subcommand(&self) -> &'static str {
        match &self.kind {
            PresetKind::Levels { .. } => "spectrum",
            PresetKind::PairSplitting { .. } => "splitting",
            PresetKind::PhaseSpace { field: FieldKind::Q, .. } => "qfunc",
            PresetKind::PhaseSpace { field: FieldKind::Wigner, .. } => "wigner",
            PresetKind::Squeezing { .. } => "squeezing",
            PresetKind::Entropy { .. } => "entropy",
            PresetKind::Onset { .. } => "onset",
        }
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        if self.lambda_steps == 1 {
            return vec![self.lambda_min];
        }
        spectrum::linspace(self.lambda_min, self.lambda_max, self.lambda_steps)
    }

    /// Bias values of the individual curves: θ for `OmegaOverEq`, ε/Δ otherwise.
    pub fn biases(&self) -> Vec<f64> {
        match &self.kind {
            PresetKind::Levels { theta, .. } => vec![*theta],
            PresetKind::PairSplitting { thetas, .. } => thetas.clone(),
            PresetKind::PhaseSpace { .. } | PresetKind::Onset { .. } => vec![0.0],
            PresetKind::Squeezing { eps_over_delta } | PresetKind::Entropy { eps_over_delta } => eps_over_delta.clone(),
        }
    }

    /// Parameters of each curve at λ = 0 (λ is set per grid point).
    pub fn base_params(&self) -> Vec<SystemParams> {
        match (&self.kind, self.ratio) {
            (PresetKind::Onset { omega_over_delta, .. }, _) => {
                omega_over_delta.iter().map(|&r| SystemParams::from_omega_over_delta(r, 0.0, 0.0)).collect()
            }
            (_, Some(ratio)) => self.biases().into_iter().map(|b| params_for(ratio, b, 0.0)).collect(),
            (_, None) => Vec::new(),
        }
    }

    /// Number of levels that must be converged for this preset.
    pub fn levels(&self) -> usize {
        match &self.kind {
            PresetKind::Levels { levels, .. } => *levels,
            PresetKind::PairSplitting { pairs, .. } => 2 * pairs.iter().max().copied().unwrap_or(0) + 2,
            _ => 1,
        }
    }

    /// The hardest point of every curve: largest λ.
    pub fn extreme_points(&self) -> Vec<SystemParams> {
        self.base_params()
            .into_iter()
            .map(|p| p.with_lambda(self.lambda_max * p.omega0))
            .collect()
    }

    /// One-line parameter summary for `list-figures`.
    pub fn summary(&self) -> String {
        let ratio = match self.ratio {
            Some(Ratio::OmegaOverEq(r)) => format!("hbar*w0/E_q={r}"),
            Some(Ratio::OmegaOverDelta(r)) => format!("hbar*w0/Delta={r}"),
            None => "hbar*w0/Delta in [0.01, 100] (log)".into(),
        };
        let lam = format!("lambda/hbar*w0 in [{}, {}]", self.lambda_min, self.lambda_max);
        let rest = match &self.kind {
            PresetKind::Levels { theta, levels } => format!("theta={}; {levels} levels; {lam}", theta_label(*theta)),
            PresetKind::PairSplitting { thetas, pairs, log_scale, .. } => {
                let t: Vec<&str> = thetas.iter().map(|t| theta_label(*t)).collect();
                let n: Vec<String> = pairs.iter().map(|n| n.to_string()).collect();
                let scale = if *log_scale { "; log scale" } else { "" };
                format!("theta={}; pairs n={}; {lam}{scale}", t.join(","), n.join(","))
            }
            PresetKind::PhaseSpace { lambda, field } => {
                let f = if *field == FieldKind::Q { "Q" } else { "Wigner" };
                format!("eps=0; lambda/hbar*w0={lambda}; {f}")
            }
            PresetKind::Squeezing { eps_over_delta } | PresetKind::Entropy { eps_over_delta } => {
                let e: Vec<String> = eps_over_delta.iter().map(|e| e.to_string()).collect();
                format!("eps/Delta={}; {lam}", e.join(","))
            }
            PresetKind::Onset { targets, .. } => {
                let t: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
                format!("eps=0; S targets {}", t.join(","))
            }
        };
        format!("{ratio}; {rest}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_stable() {
        let all = all_presets();
        assert_eq!(all.len(), 27);
        let mut ids: Vec<&str> = all.iter().map(|p| p.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
        assert!(preset("fig8h").is_some() && preset("fig12").is_none());
    }

    #[test]
    fn caption_parameters() {
        let f7 = preset("fig7a").unwrap();
        assert_eq!(f7.ratio, Some(Ratio::OmegaOverEq(0.01)));
        let p = f7.extreme_points()[0];
        assert!((p.e_q() - 100.0).abs() < 1e-12);
        let f8: Vec<f64> = all_presets()
            .iter()
            .filter_map(|p| match p.kind {
                PresetKind::PhaseSpace { lambda, .. } => Some(lambda),
                _ => None,
            })
            .collect();
        assert_eq!(f8, vec![0.5, 0.5, 2.0, 2.0, 2.5, 2.5, 3.5, 3.5]);
        let f9 = preset("fig9c").unwrap();
        let eps: Vec<f64> = f9.base_params().iter().map(|p| p.eps).collect();
        for (e, want) in eps.iter().zip([0.0, 0.01, 0.05, 0.1]) {
            assert!((e - want).abs() < 1e-15);
        }
        assert_eq!(preset("fig11").unwrap().base_params().len(), 17);
    }
}
