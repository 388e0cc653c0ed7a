//! Bias sweeps: time evolution under `H(t) = H(ε = 0) − (ε(t)/2) σz`,
//! qubit-measurement projection and state classification.

mod classify;

pub use classify::{
    cat_fit, classify_oscillator, coherent_fit, fidelity, squeezed_amplitudes, squeezed_fit, CatFit,
    ClassScores, OscillatorClass, StateRef, MIN_CAT_SEPARATION,
};

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, choose_truncation, PureState, SystemParams, TruncationOptions};
use crate::linalg::{self, C64};
use crate::nonclassical::{mean_x_and_sigma_z, reduce, Subsystem};
use crate::spectrum;

/// Convergence target for step doubling: `1 − |⟨ψ_n|ψ_2n⟩|`.
pub const STEP_TOL: f64 = 1e-8;
const MAX_STEPS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepShape {
    Linear,
    /// `3s² − 2s³`, zero slope at both ends.
    Smoothstep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSchedule {
    pub eps_start: f64,
    pub eps_end: f64,
    /// In units of 1/ω0; zero is the sudden limit.
    pub duration: f64,
    pub shape: SweepShape,
    /// Initial number of time steps before refinement.
    pub steps: usize,
}

impl SweepSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration >= 0.0) || !self.duration.is_finite() {
            return Err(Error::invalid(format!("duration must be >= 0, got {}", self.duration)));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be >= 1"));
        }
        if !self.eps_start.is_finite() || !self.eps_end.is_finite() {
            return Err(Error::invalid("bias endpoints must be finite"));
        }
        Ok(())
    }

    /// ε at time `t`.
    pub fn eps_at(&self, t: f64) -> f64 {
        if self.duration == 0.0 {
            return self.eps_end;
        }
        let s = (t / self.duration).clamp(0.0, 1.0);
        let f = match self.shape {
            SweepShape::Linear => s,
            SweepShape::Smoothstep => s * s * (3.0 - 2.0 * s),
        };
        self.eps_start + (self.eps_end - self.eps_start) * f
    }
}

/// Sweep-rate regimes relative to the qubit and oscillator time scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepRegime {
    /// Fast compared with both the qubit and the oscillator.
    Sudden,
    /// Slow compared with the qubit, fast compared with the oscillator.
    Intermediate,
    /// Slow compared with every gap along the sweep.
    Adiabatic,
}

impl SweepRegime {
    /// Default duration for this regime: zero, the geometric mean
    /// `1 / sqrt(Δ ω0)` of the two time scales, or `40 · 2π / min gap`.
    pub fn duration(self, p: &SystemParams, eps_start: f64, eps_end: f64) -> Result<f64> {
        Ok(match self {
            SweepRegime::Sudden => 0.0,
            SweepRegime::Intermediate => 1.0 / (p.delta * p.omega0).sqrt(),
            SweepRegime::Adiabatic => {
                let mut min_gap = f64::INFINITY;
                for k in 0..=20 {
                    let eps = eps_start + (eps_end - eps_start) * k as f64 / 20.0;
                    let q = p.with_eps(eps);
                    let t = choose_truncation(&q, 2, TruncationOptions::default())?;
                    let e = spectrum::lowest_energies(&q, t.n_max, 2)?;
                    min_gap = min_gap.min(e[1] - e[0]);
                }
                40.0 * std::f64::consts::TAU / min_gap.max(1e-12)
            }
        })
    }
}

/// Eigendecomposition of the bias-free Hamiltonian, reused for every step.
struct Propagator {
    energies: Vec<f64>,
    u: Mat<f64>,
    sz: Vec<f64>,
}

impl Propagator {
    fn new(p: &SystemParams, n_max: usize) -> Result<Self> {
        let (energies, u) = linalg::symmetric_eigen(&hilbert::hamiltonian_matrix(&p.with_eps(0.0), n_max))?;
        Ok(Propagator { energies, u, sz: hilbert::sigma_z_diagonal(n_max) })
    }

    fn to_real(v: &[C64]) -> Mat<f64> {
        Mat::from_fn(v.len(), 2, |i, j| if j == 0 { v[i].re } else { v[i].im })
    }

    fn to_complex(m: &Mat<f64>) -> Vec<C64> {
        (0..m.nrows()).map(|i| C64::new(m[(i, 0)], m[(i, 1)])).collect()
    }

    fn rotate(m: &mut Mat<f64>, i: usize, phase: f64) {
        let (s, c) = phase.sin_cos();
        let (re, im) = (m[(i, 0)], m[(i, 1)]);
        m[(i, 0)] = c * re - s * im;
        m[(i, 1)] = s * re + c * im;
    }

    /// Strang steps `e^{−iH0 dt/2} e^{iε σz dt/2} e^{−iH0 dt/2}` with ε taken
    /// at each step midpoint; calls `observe(step, ψ)` at the requested steps.
    fn run(
        &self,
        psi: &[C64],
        schedule: &SweepSchedule,
        n: usize,
        mut observe: impl FnMut(usize, &[C64]),
        observe_at: &[usize],
    ) -> Vec<C64> {
        let dt = schedule.duration / n as f64;
        let half: Vec<f64> = self.energies.iter().map(|e| -e * 0.5 * dt).collect();
        let mut c = self.u.transpose() * Self::to_real(psi);
        let mut next_obs = 0;
        if observe_at.first() == Some(&0) {
            observe(0, psi);
            next_obs = 1;
        }
        for k in 0..n {
            for (i, ph) in half.iter().enumerate() {
                Self::rotate(&mut c, i, *ph);
            }
            let mut x = &self.u * &c;
            let eps = schedule.eps_at((k as f64 + 0.5) * dt);
            for i in 0..x.nrows() {
                Self::rotate(&mut x, i, 0.5 * eps * self.sz[i] * dt);
            }
            c = self.u.transpose() * &x;
            for (i, ph) in half.iter().enumerate() {
                Self::rotate(&mut c, i, *ph);
            }
            if next_obs < observe_at.len() && observe_at[next_obs] == k + 1 {
                observe(k + 1, &Self::to_complex(&(&self.u * &c)));
                next_obs += 1;
            }
        }
        Self::to_complex(&(&self.u * &c))
    }
}

/// Exact propagation for a constant bias.
fn evolve_constant(state: &PureState, p: &SystemParams, n_max: usize, t: f64) -> Result<PureState> {
    let (e, u) = linalg::symmetric_eigen(&hilbert::hamiltonian_matrix(p, n_max))?;
    let mut c = u.transpose() * Propagator::to_real(&state.amplitudes);
    for (i, ei) in e.iter().enumerate() {
        Propagator::rotate(&mut c, i, -ei * t);
    }
    PureState::normalized(Propagator::to_complex(&(&u * &c)))
}

/// Converged Strang propagation; returns the final state and the step count.
fn evolve_converged(
    state: &PureState,
    p_base: &SystemParams,
    schedule: &SweepSchedule,
) -> Result<(PureState, usize, Option<Propagator>)> {
    p_base.validate()?;
    schedule.validate()?;
    let n_max = state.fock_dim()? - 1;
    if schedule.duration == 0.0 {
        return Ok((state.clone(), 0, None));
    }
    if schedule.eps_start == schedule.eps_end {
        let s = evolve_constant(state, &p_base.with_eps(schedule.eps_start), n_max, schedule.duration)?;
        return Ok((s, 1, None));
    }
    let prop = Propagator::new(p_base, n_max)?;
    let mut n = schedule.steps;
    let mut coarse = prop.run(&state.amplitudes, schedule, n, |_, _| {}, &[]);
    loop {
        let fine_n = 2 * n;
        if fine_n > MAX_STEPS {
            return Err(Error::StepRefinement(format!("no convergence with {n} steps")));
        }
        let fine = prop.run(&state.amplitudes, schedule, fine_n, |_, _| {}, &[]);
        let change = 1.0 - linalg::inner(&coarse, &fine).norm();
        log::debug!("sweep with {fine_n} steps: 1 - overlap = {change:.3e}");
        if change < STEP_TOL {
            let out = PureState::normalized(fine)?;
            return Ok((out, fine_n, Some(prop)));
        }
        n = fine_n;
        coarse = fine;
    }
}

/// Propagates `state` through the bias sweep.
pub fn evolve(state: &PureState, p_base: &SystemParams, schedule: &SweepSchedule) -> Result<PureState> {
    Ok(evolve_converged(state, p_base, schedule)?.0)
}

/// One sample of a sweep trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub eps: f64,
    pub ground_fidelity: f64,
    pub qubit_purity: f64,
    pub mean_x: f64,
}

fn sample_point(p: &SystemParams, n_max: usize, t: f64, eps: f64, psi: &[C64]) -> Result<TrajectoryPoint> {
    let q = p.with_eps(eps);
    let trunc = hilbert::FockTruncation::new(n_max)?;
    let gs = spectrum::solve(&q, &trunc, 1)?;
    let state = PureState::normalized(psi.to_vec())?;
    let fid = gs.states[0].inner(&state).norm_sqr();
    let purity = reduce(&state, Subsystem::Qubit)?.purity();
    Ok(TrajectoryPoint { t, eps, ground_fidelity: fid, qubit_purity: purity, mean_x: mean_x_and_sigma_z(&state).0 })
}

/// Evolution with `samples` evenly spaced observations (including both ends).
pub fn evolve_trajectory(
    state: &PureState,
    p_base: &SystemParams,
    schedule: &SweepSchedule,
    samples: usize,
) -> Result<(PureState, Vec<TrajectoryPoint>)> {
    let n_max = state.fock_dim()? - 1;
    let samples = samples.max(2);
    let (final_state, n, prop) = evolve_converged(state, p_base, schedule)?;
    let mut points = Vec::with_capacity(samples);
    match prop {
        Some(prop) => {
            let dt = schedule.duration / n as f64;
            let mut at: Vec<usize> = (0..samples).map(|j| (j * n + (samples - 1) / 2) / (samples - 1)).collect();
            at.dedup();
            let mut err = None;
            prop.run(
                &state.amplitudes,
                schedule,
                n,
                |k, psi| {
                    let t = k as f64 * dt;
                    match sample_point(p_base, n_max, t, schedule.eps_at(t), psi) {
                        Ok(pt) => points.push(pt),
                        Err(e) => err = Some(e),
                    }
                },
                &at,
            );
            if let Some(e) = err {
                return Err(e);
            }
        }
        None => {
            points.push(sample_point(p_base, n_max, 0.0, schedule.eps_start, &state.amplitudes)?);
            points.push(sample_point(
                p_base,
                n_max,
                schedule.duration,
                schedule.eps_end,
                &final_state.amplitudes,
            )?);
        }
    }
    Ok((final_state, points))
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub final_state: PureState,
    pub fidelity_to_instantaneous_ground: f64,
    pub qubit_purity: f64,
    pub oscillator_state_class: OscillatorClass,
    pub classification_scores: ClassScores,
    pub cat_fit: Option<CatFit>,
    pub steps: usize,
    pub regime: SweepRegime,
    pub note: String,
}

/// Starts from the ground state at `eps_start`, sweeps, and classifies the
/// oscillator state that results.
pub fn run_protocol(
    p: &SystemParams,
    schedule: &SweepSchedule,
    regime: SweepRegime,
    opts: TruncationOptions,
) -> Result<ProtocolResult> {
    p.validate()?;
    schedule.validate()?;
    let start = p.with_eps(schedule.eps_start);
    let end = p.with_eps(schedule.eps_end);
    let trunc = choose_truncation(&start, 2, opts)?;
    let trunc = trunc.n_max.max(choose_truncation(&end, 2, opts)?.n_max);
    let trunc = hilbert::FockTruncation::new(trunc)?;
    let psi0 = spectrum::solve(&start, &trunc, 1)?.states.swap_remove(0);
    let (final_state, steps, _) = evolve_converged(&psi0, p, schedule)?;
    let gs_end = spectrum::solve(&end, &trunc, 1)?.states.swap_remove(0);
    let fid = gs_end.inner(&final_state).norm_sqr();
    let purity = reduce(&final_state, Subsystem::Qubit)?.purity();
    let (class, scores, cat) = classify_oscillator(&final_state)?;
    let note = if fid < 0.99 {
        "final state is not stationary: the oscillator evolves in the shifted effective potential after the sweep".to_string()
    } else {
        "final state follows the instantaneous ground state".to_string()
    };
    Ok(ProtocolResult {
        final_state,
        fidelity_to_instantaneous_ground: fid.clamp(0.0, 1.0),
        qubit_purity: purity,
        oscillator_state_class: class,
        classification_scores: scores,
        cat_fit: cat,
        steps,
        regime,
        note,
    })
}

/// A measurement outcome: conditional oscillator state and its probability.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub state: PureState,
    pub probability: f64,
}

/// Projects the qubit onto `(|↑⟩ ± e^{iφ}|↓⟩)/√2`. Each entry is `None` when
/// that outcome has vanishing probability.
pub fn cat_projection(state: &PureState, qubit_basis_angle: f64) -> Result<[Option<Outcome>; 2]> {
    let norm = state.norm();
    if (norm - 1.0).abs() > hilbert::NORM_TOL {
        return Err(Error::invalid(format!("state norm {norm} differs from 1")));
    }
    let fock = state.fock_dim()?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phase = C64::from_polar(1.0, -qubit_basis_angle);
    let psi = &state.amplitudes;
    let branch = |sign: f64| -> Result<Option<Outcome>> {
        let v: Vec<C64> = (0..fock).map(|n| (psi[2 * n] + phase * psi[2 * n + 1] * sign) * r).collect();
        let prob: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if prob < 1e-14 {
            return Ok(None);
        }
        Ok(Some(Outcome { state: PureState::normalized(v)?, probability: prob }))
    };
    Ok([branch(1.0)?, branch(-1.0)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, qubit, FockTruncation};

    fn sched(eps_start: f64, eps_end: f64, duration: f64) -> SweepSchedule {
        SweepSchedule { eps_start, eps_end, duration, shape: SweepShape::Linear, steps: 16 }
    }

    #[test]
    fn sudden_limit_is_identity() {
        let p = SystemParams::new(1.0, 0.0, 0.4);
        let t = FockTruncation::new(16).unwrap();
        let s = spectrum::solve(&p, &t, 3).unwrap().states[2].clone();
        let out = evolve(&s, &p, &sched(0.0, 2.0, 0.0)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn eigenstate_is_stationary() {
        let p = SystemParams::new(1.0, 0.3, 0.6);
        let t = FockTruncation::new(32).unwrap();
        let s = spectrum::solve(&p, &t, 2).unwrap().states[1].clone();
        let out = evolve(&s, &p.with_eps(0.0), &sched(0.3, 0.3, 7.5)).unwrap();
        assert!((s.inner(&out).norm() - 1.0).abs() < 1e-9);
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn splitting_matches_exact_propagation_for_a_short_sweep() {
        let p = SystemParams::new(1.0, 0.0, 0.5);
        let t = FockTruncation::new(24).unwrap();
        let s = spectrum::solve(&p, &t, 1).unwrap().states[0].clone();
        let sc = sched(0.0, 0.5, 1.0);
        let out = evolve(&s, &p, &sc).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
        // reference: piecewise-constant exact exponentials on a fine grid
        let n = 4000;
        let mut r = s.clone();
        for k in 0..n {
            let eps = sc.eps_at((k as f64 + 0.5) / n as f64);
            r = evolve_constant(&r, &p.with_eps(eps), 24, 1.0 / n as f64).unwrap();
        }
        assert!(1.0 - r.inner(&out).norm() < 1e-7);
    }

    #[test]
    fn projection_of_product_state() {
        let t = FockTruncation::new(20).unwrap();
        let osc = coherent_state(C64::new(0.8, 0.2), &t).unwrap();
        let s = PureState::product(&osc, qubit::UP).unwrap();
        let [a, b] = cat_projection(&s, 0.7).unwrap();
        let (a, b) = (a.unwrap(), b.unwrap());
        assert!((a.probability + b.probability - 1.0).abs() < 1e-12);
        assert!((a.state.inner(&osc).norm() - 1.0).abs() < 1e-12);
        assert!((b.state.inner(&osc).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_outcome_is_none() {
        let s = PureState::product(&PureState::fock(0, 9), qubit::PLUS).unwrap();
        let [a, b] = cat_projection(&s, 0.0).unwrap();
        assert!(a.is_some() && b.is_none());
    }

    #[test]
    fn schedule_shapes() {
        let mut s = sched(1.0, 3.0, 2.0);
        assert_eq!(s.eps_at(0.0), 1.0);
        assert_eq!(s.eps_at(2.0), 3.0);
        assert_eq!(s.eps_at(1.0), 2.0);
        s.shape = SweepShape::Smoothstep;
        assert_eq!(s.eps_at(1.0), 2.0);
        assert!(s.eps_at(0.2) < 1.0 + 2.0 * 0.1);
        assert!(SweepSchedule { steps: 0, ..s }.validate().is_err());
        assert!(SweepSchedule { duration: -1.0, ..s }.validate().is_err());
    }
}
