//! Command-line and JSON-config argument types.
//!
//! All energies on the command line are dimensionless ratios. The oscillator
//! quantum ħω0 is the unit unless a flag says otherwise.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use uscsim::decoherence::ChannelOperator;
use uscsim::dynamics::{SweepRegime, SweepShape};
use uscsim::spectrum::{linspace, EnergyUnit};
use uscsim::{Error, SystemParams, TruncationOptions};

#[derive(Debug, Parser)]
#[command(name = "uscsim", version, about = "Qubit coupled to a harmonic oscillator, from weak to ultrastrong coupling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format. Scans default to csv, single-point reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, env = "USCSIM_THREADS")]
    pub threads: Option<usize>,

    /// Fixed Fock cutoff, bypassing the automatic choice.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,

    /// Convergence tolerance; turns on truncation doubling.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Named figure preset (see `list-figures`).
    #[arg(long, global = true)]
    pub figure: Option<String>,

    /// Run configuration in JSON, as written to the `config` metadata of any output.
    #[arg(long, global = true, conflicts_with = "figure")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines the content of an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn truncation(&self) -> TruncationOptions {
        TruncationOptions {
            auto: self.tol.is_some(),
            convergence_tol: self.tol.unwrap_or(uscsim::hilbert::DEFAULT_CONVERGENCE_TOL),
            fixed: self.nmax,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Lowest energy levels versus coupling.
    Spectrum(SpectrumArgs),
    /// Splitting E(2n+2) − E(2n+1) of level pair n versus coupling.
    Splitting(SplittingArgs),
    /// Husimi Q function of the reduced oscillator ground state.
    Qfunc(PhaseArgs),
    /// Wigner function of the reduced oscillator ground state.
    Wigner(PhaseArgs),
    /// Squeezing parameters s_x, s_p and the product K.
    Squeezing(MetricArgs),
    /// Qubit–oscillator entanglement entropy of the ground state.
    Entropy(MetricArgs),
    /// Coupling at which the ground-state entropy reaches a target.
    Onset(OnsetArgs),
    /// Stationary points of the classical spin–oscillator energy.
    Semiclassical(PointArgs),
    /// Effective potential of the adiabatic-qubit picture.
    AdiabaticQubit(PointArgs),
    /// Gaussian-times-Laguerre gap against the exact pair splitting.
    RenormGap(RenormArgs),
    /// Double-well tunnelling estimate against the exact splitting.
    Wkb(ScanPointArgs),
    /// Golden-rule relaxation and dephasing rates.
    Rates(RatesArgs),
    /// Bias sweep of the ground state and classification of the result.
    Sweep(SweepArgs),
    /// Size of the kinetic correction in the adiabatic-qubit picture.
    AppendixA(PointArgs),
    /// Available figure presets.
    ListFigures,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Splitting(_) => "splitting",
            Command::Qfunc(_) => "qfunc",
            Command::Wigner(_) => "wigner",
            Command::Squeezing(_) => "squeezing",
            Command::Entropy(_) => "entropy",
            Command::Onset(_) => "onset",
            Command::Semiclassical(_) => "semiclassical",
            Command::AdiabaticQubit(_) => "adiabatic-qubit",
            Command::RenormGap(_) => "renorm-gap",
            Command::Wkb(_) => "wkb",
            Command::Rates(_) => "rates",
            Command::Sweep(_) => "sweep",
            Command::AppendixA(_) => "appendix-a",
            Command::ListFigures => "list-figures",
        }
    }
}

/// Physical parameters. Give at most one of the gap flags and at most one of
/// the bias flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct ParamArgs {
    /// Δ / ħω0 (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ratio: Option<f64>,
    /// ħω0 / Δ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_ratio: Option<f64>,
    /// ħω0 / E_q; the bias then comes from --theta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_eq: Option<f64>,
    /// ε / ħω0 (default 0).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// ε / Δ.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_over_delta: Option<f64>,
    /// θ = arctan(ε/Δ) in radians.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// λ / ħω0 (default 0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<SystemParams, Error> {
        let bad = |m: &str| Error::InvalidParameter(m.to_string());
        let gaps = [self.delta_ratio, self.omega0_ratio, self.omega0_eq].iter().flatten().count();
        let biases = [self.eps, self.eps_over_delta, self.theta].iter().flatten().count();
        if gaps > 1 {
            return Err(bad("give only one of --delta-ratio, --omega0-ratio, --omega0-eq"));
        }
        if biases > 1 {
            return Err(bad("give only one of --eps, --eps-over-delta, --theta"));
        }
        let lambda = self.lambda.unwrap_or(0.0);
        let p = if let Some(r) = self.omega0_eq {
            if self.eps.is_some() || self.eps_over_delta.is_some() {
                return Err(bad("--omega0-eq fixes E_q; set the bias with --theta"));
            }
            if !(r > 0.0) {
                return Err(bad("--omega0-eq must be > 0"));
            }
            SystemParams::from_omega_over_eq(r, self.theta.unwrap_or(0.0), lambda)
        } else {
            let delta = match (self.delta_ratio, self.omega0_ratio) {
                (Some(d), _) => d,
                (_, Some(r)) if r > 0.0 => 1.0 / r,
                (_, Some(_)) => return Err(bad("--omega0-ratio must be > 0")),
                _ => 1.0,
            };
            let eps = match (self.eps, self.eps_over_delta, self.theta) {
                (Some(e), _, _) => e,
                (_, Some(e), _) => e * delta,
                (_, _, Some(t)) => delta * t.tan(),
                _ => 0.0,
            };
            SystemParams::new(delta, eps, lambda)
        };
        p.validate()?;
        Ok(p)
    }
}

/// Coupling scan over λ/ħω0. Without any flag the command runs at the single
/// --lambda value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct ScanArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    /// Grid points, at least 2.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl ScanArgs {
    pub fn grid(&self) -> Result<Option<Vec<f64>>, Error> {
        if self.lambda_min.is_none() && self.lambda_max.is_none() && self.steps.is_none() {
            return Ok(None);
        }
        let lo = self.lambda_min.unwrap_or(0.0);
        let hi = self
            .lambda_max
            .ok_or_else(|| Error::InvalidParameter("a scan needs --lambda-max".into()))?;
        let n = self.steps.unwrap_or(101);
        if n < 2 {
            return Err(Error::InvalidParameter(format!("--steps must be >= 2, got {n}")));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || lo < 0.0 {
            return Err(Error::InvalidParameter(format!("need 0 <= lambda-min < lambda-max, got {lo}, {hi}")));
        }
        Ok(Some(linspace(lo, hi, n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    /// ħω0.
    #[default]
    Oscillator,
    /// E_q.
    Qubit,
}

impl From<Unit> for EnergyUnit {
    fn from(u: Unit) -> Self {
        match u {
            Unit::Oscillator => EnergyUnit::Oscillator,
            Unit::Qubit => EnergyUnit::Qubit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
    /// Number of levels.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = Unit::Oscillator)]
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SplittingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
    /// Zero-based pair index n.
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
    #[arg(long, value_enum, default_value_t = Unit::Oscillator)]
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Half width of the square (X, P) window; default 6 + 2λ/ħω0.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Points per axis.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct PointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct ScanPointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct RenormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: ScanArgs,
    /// Zero-based pair index n.
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct OnsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Target entropies in (0, 1); repeatable.
    #[arg(long = "target", default_values_t = [0.5])]
    pub targets: Vec<f64>,
    /// Scan ħω0/Δ logarithmically from this value (needs --ratio-max).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_min: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_max: Option<f64>,
    #[arg(long, default_value_t = 17)]
    pub ratio_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Bias noise coupling through σz.
    SigmaZ,
    /// Noise coupling through the oscillator coordinate a + a†.
    OscillatorX,
}

impl From<Channel> for ChannelOperator {
    fn from(c: Channel) -> Self {
        match c {
            Channel::SigmaZ => ChannelOperator::SigmaZ,
            Channel::OscillatorX => ChannelOperator::OscillatorX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Channel::SigmaZ)]
    pub channel: Channel,
    /// Upper eigenstate, zero-based.
    #[arg(short, long, default_value_t = 1)]
    pub i: usize,
    /// Lower eigenstate, zero-based.
    #[arg(short, long, default_value_t = 0)]
    pub j: usize,
    /// White-noise spectral density S(ω) = S0.
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    /// CSV with columns `omega,S`; replaces --s0.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_table: Option<PathBuf>,
    /// Also report the localized-well dephasing element (ε = 0, above the critical point).
    #[arg(long)]
    #[serde(default)]
    pub localized: bool,
    /// Print the dephasing estimate for the strongly entangled worked example instead.
    #[arg(long)]
    #[serde(default)]
    pub worked_example: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Sudden,
    Intermediate,
    Adiabatic,
}

impl From<Regime> for SweepRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Sudden => SweepRegime::Sudden,
            Regime::Intermediate => SweepRegime::Intermediate,
            Regime::Adiabatic => SweepRegime::Adiabatic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Linear,
    Smoothstep,
}

impl From<Shape> for SweepShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Linear => SweepShape::Linear,
            Shape::Smoothstep => SweepShape::Smoothstep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Initial bias ε/ħω0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps_start: f64,
    /// Final bias ε/ħω0.
    #[arg(long, allow_hyphen_values = true)]
    pub eps_end: f64,
    /// Sweep time in units of 1/ω0; defaults to the regime's time scale.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[arg(long, value_enum, default_value_t = Regime::Intermediate)]
    pub regime: Regime,
    #[arg(long, value_enum, default_value_t = Shape::Smoothstep)]
    pub shape: Shape,
    /// Trajectory samples, including both ends.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}
