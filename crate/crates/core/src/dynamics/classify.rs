use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{coherent_amplitudes, PureState};
use crate::linalg::{self, CMat, C64, ZERO};
use crate::nonclassical::{reduce, DensityMatrix, Subsystem};
use crate::optim::golden_min;

/// Smallest separation `|β1 − β2|` accepted for a cat fit.
pub const MIN_CAT_SEPARATION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillatorClass {
    Coherent,
    Squeezed,
    EvenCat,
    OddCat,
    Entangled,
    Other,
}

impl OscillatorClass {
    pub fn label(self) -> &'static str {
        match self {
            OscillatorClass::Coherent => "coherent",
            OscillatorClass::Squeezed => "squeezed",
            OscillatorClass::EvenCat => "even_cat",
            OscillatorClass::OddCat => "odd_cat",
            OscillatorClass::Entangled => "entangled",
            OscillatorClass::Other => "other",
        }
    }
}

/// Overlap-based scores, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    /// Fidelity with the best displaced squeezed vacuum.
    pub squeezed: f64,
    /// Fidelity with the best two-component coherent superposition.
    pub cat: f64,
    /// `2 (1 − Tr ρ²)` of the reduced oscillator state.
    pub entangled: f64,
    /// `max_β ⟨β|ρ|β⟩`.
    pub coherent: f64,
}

/// `(|β1⟩ + e^{iφ}|β2⟩) / norm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatFit {
    pub beta1: C64,
    pub beta2: C64,
    pub phase: f64,
    pub fidelity: f64,
    pub even: bool,
}

/// Either kind of state, for fidelities.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl StateRef<'_> {
    fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

fn psd_sqrt(m: &CMat) -> Result<CMat> {
    let (ev, u) = linalg::hermitian_eigen(m)?;
    let d = ev.len();
    let scaled = CMat::from_fn(d, d, |i, j| u[(i, j)] * ev[j].max(0.0).sqrt());
    Ok(&scaled * u.adjoint())
}

/// Fidelity `(Tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`, which is `|⟨a|b⟩|²` for pure states.
pub fn fidelity(a: StateRef<'_>, b: StateRef<'_>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.inner(y).norm_sqr(),
        (StateRef::Pure(x), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(x)) => {
            linalg::sandwich(&x.amplitudes, &r.entries, &x.amplitudes).re
        }
        (StateRef::Mixed(r), StateRef::Mixed(s)) => {
            let sr = psd_sqrt(&r.entries)?;
            let m = &sr * (&s.entries * &sr);
            let ev = linalg::hermitian_eigenvalues(&m)?;
            let t: f64 = ev.iter().map(|l| l.max(0.0).sqrt()).sum();
            t * t
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// First and second moments `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩`.
fn moments(rho: &CMat) -> (C64, C64, f64) {
    let d = rho.nrows();
    let (mut a, mut a2, mut n) = (ZERO, ZERO, 0.0);
    for m in 0..d {
        n += m as f64 * rho[(m, m)].re;
        if m + 1 < d {
            a += rho[(m + 1, m)] * ((m + 1) as f64).sqrt();
        }
        if m + 2 < d {
            a2 += rho[(m + 2, m)] * (((m + 1) * (m + 2)) as f64).sqrt();
        }
    }
    (a, a2, n)
}

/// Quadrature covariance `[Vxx, Vpp, Vxp]`.
fn covariance(rho: &CMat) -> (C64, [f64; 3]) {
    let (a, a2, n) = moments(rho);
    let vxx = 0.25 * (2.0 * a2.re + 2.0 * n + 1.0) - a.re * a.re;
    let vpp = 0.25 * (-2.0 * a2.re + 2.0 * n + 1.0) - a.im * a.im;
    let vxp = 0.5 * a2.im - a.re * a.im;
    (a, [vxx, vpp, vxp])
}

/// Principal axes: `(v_major, v_minor, angle of the major axis)`.
fn principal_axes(v: [f64; 3]) -> (f64, f64, f64) {
    let [xx, pp, xp] = v;
    let mid = 0.5 * (xx + pp);
    let r = (0.25 * (xx - pp) * (xx - pp) + xp * xp).sqrt();
    (mid + r, mid - r, 0.5 * (2.0 * xp).atan2(xx - pp))
}

fn expect(rho: &CMat, v: &[C64]) -> f64 {
    linalg::sandwich(v, rho, v).re
}

fn coherent_vec(beta: C64, d: usize) -> Vec<C64> {
    coherent_amplitudes(beta, d - 1)
}

/// Refines `x` coordinate by coordinate with golden sections of half-width `w`.
fn refine(x: &mut [f64], w: &[f64], lower: &[f64], rounds: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut best = f(x);
    for _ in 0..rounds {
        for k in 0..x.len() {
            let lo = (x[k] - w[k]).max(lower[k]);
            let hi = x[k] + w[k];
            let base = x.to_vec();
            let (xk, fk) = golden_min(lo, hi, 1e-7 * (1.0 + w[k]), |t| {
                let mut trial = base.clone();
                trial[k] = t;
                -f(&trial)
            });
            if -fk > best {
                best = -fk;
                x[k] = xk;
            }
        }
    }
    best
}

/// `max_β ⟨β|ρ|β⟩` and the maximizing β.
pub fn coherent_fit(rho: &DensityMatrix) -> (f64, C64) {
    let r = &rho.entries;
    let d = rho.dim();
    let (mean, v) = covariance(r);
    let (vmaj, _, ang) = principal_axes(v);
    let spread = (vmaj - 0.25).max(0.0).sqrt();
    let axis = C64::from_polar(spread, ang);
    let score = |x: &[f64]| expect(r, &coherent_vec(C64::new(x[0], x[1]), d));
    let mut best = (f64::NEG_INFINITY, mean);
    for start in [mean, mean + axis, mean - axis] {
        let mut x = [start.re, start.im];
        let s = refine(&mut x, &[0.75, 0.75], &[f64::NEG_INFINITY; 2], 3, score);
        if s > best.0 {
            best = (s, C64::new(x[0], x[1]));
        }
    }
    (best.0.clamp(0.0, 1.0), best.1)
}

/// Fock amplitudes of `D(β) S(ζ)|0⟩`, `ζ = r e^{iθ}`, on `d` levels, from the
/// recurrence `μ sqrt(n+1) c_{n+1} + ν sqrt(n) c_{n−1} = γ c_n` with
/// `μ = cosh r`, `ν = e^{iθ} sinh r` and `γ = μβ + νβ*`.
pub fn squeezed_amplitudes(beta: C64, r: f64, theta: f64, d: usize) -> Vec<C64> {
    let pad = d + 64 + (4.0 * beta.norm_sqr()) as usize;
    let mu = r.cosh();
    let nu = C64::from_polar(r.sinh(), theta);
    let gamma = beta * mu + nu * beta.conj();
    let mut c = Vec::with_capacity(pad);
    c.push(C64::new(1.0, 0.0));
    for n in 0..pad - 1 {
        let prev = if n > 0 { nu * c[n - 1] * (n as f64).sqrt() } else { ZERO };
        let next = (gamma * c[n] - prev) / (mu * ((n + 1) as f64).sqrt());
        c.push(next);
        if next.norm() > 1e100 {
            for z in c.iter_mut() {
                *z *= 1e-100;
            }
        }
    }
    let norm = linalg::norm(&c);
    c.truncate(d);
    c.iter().map(|z| z / norm).collect()
}

/// Best displaced squeezed vacuum: `(fidelity, β, r, θ)`.
pub fn squeezed_fit(rho: &DensityMatrix) -> (f64, C64, f64, f64) {
    let m = &rho.entries;
    let d = rho.dim();
    let (mean, v) = covariance(m);
    let (vmaj, vmin, ang) = principal_axes(v);
    let r0 = 0.25 * (vmaj / vmin.max(1e-300)).ln();
    let theta0 = 2.0 * (ang + std::f64::consts::FRAC_PI_2);
    let mut x = [mean.re, mean.im, r0.min(4.0), theta0];
    let score = |x: &[f64]| expect(m, &squeezed_amplitudes(C64::new(x[0], x[1]), x[2], x[3], d));
    let s = refine(&mut x, &[0.3, 0.3, 0.3, 0.5], &[f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY], 2, score);
    (s.clamp(0.0, 1.0), C64::new(x[0], x[1]), x[2], x[3])
}

/// Best phase for fixed `β1, β2`, returning `(fidelity, φ)`.
fn cat_phase(rho: &CMat, b1: C64, b2: C64) -> (f64, f64) {
    let d = rho.nrows();
    let v1 = coherent_vec(b1, d);
    let v2 = coherent_vec(b2, d);
    let a = expect(rho, &v1);
    let b = expect(rho, &v2);
    let c = linalg::sandwich(&v1, rho, &v2);
    let s = (-0.5 * b1.norm_sqr() - 0.5 * b2.norm_sqr() + b1.conj() * b2).exp();
    let f = |phi: f64| {
        let e = C64::from_polar(1.0, phi);
        (a + b + 2.0 * (e * c).re) / (2.0 + 2.0 * (e * s).re)
    };
    let tau = std::f64::consts::TAU;
    let (mut best_phi, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..72 {
        let phi = tau * k as f64 / 72.0;
        let v = f(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    let step = tau / 72.0;
    let (phi, v) = golden_min(best_phi - step, best_phi + step, 1e-9, |t| -f(t));
    let phi = phi.rem_euclid(tau);
    if -v > best {
        (-v, phi)
    } else {
        (best, best_phi)
    }
}

/// Best `(|β1⟩ + e^{iφ}|β2⟩)/norm` with `|β1 − β2| ≥ 2`.
pub fn cat_fit(rho: &DensityMatrix) -> CatFit {
    let m = &rho.entries;
    let (mean, v) = covariance(m);
    let (vmaj, _, ang) = principal_axes(v);
    let half_min = 0.5 * MIN_CAT_SEPARATION;
    let r_guess = (vmaj - 0.25).max(0.0).sqrt().max(half_min);
    // x = [Re c, Im c, r, χ] with β1,2 = c ± r e^{iχ}
    let betas = |x: &[f64]| {
        let c = C64::new(x[0], x[1]);
        let h = C64::from_polar(x[2], x[3]);
        (c + h, c - h)
    };
    let score = |x: &[f64]| {
        let (b1, b2) = betas(x);
        cat_phase(m, b1, b2).0
    };
    let mut x = [mean.re, mean.im, r_guess, ang];
    let mut best = score(&x);
    let r_hi = r_guess + 2.0;
    let mut r = half_min;
    while r <= r_hi {
        let s = score(&[mean.re, mean.im, r, ang]);
        if s > best {
            best = s;
            x[2] = r;
        }
        r += 0.25;
    }
    refine(
        &mut x,
        &[0.5, 0.5, 0.5, 0.4],
        &[f64::NEG_INFINITY, f64::NEG_INFINITY, half_min, f64::NEG_INFINITY],
        3,
        score,
    );
    let (b1, b2) = betas(&x);
    let (fid, phi) = cat_phase(m, b1, b2);
    CatFit { beta1: b1, beta2: b2, phase: phi, fidelity: fid.clamp(0.0, 1.0), even: phi.cos() >= 0.0 }
}

/// Classifies the reduced oscillator state of a qubit⊗oscillator state.
pub fn classify_oscillator(state: &PureState) -> Result<(OscillatorClass, ClassScores, Option<CatFit>)> {
    let full = reduce(state, Subsystem::Oscillator)?;
    let d = full.effective_dim(1e-14).max(2);
    let rho = DensityMatrix {
        entries: CMat::from_fn(d, d, |i, j| full.entries[(i, j)]),
        subsystem: Subsystem::Oscillator,
    };
    let entangled = (2.0 * (1.0 - full.purity())).clamp(0.0, 1.0);
    let (coherent, _) = coherent_fit(&rho);
    let (squeezed, ..) = squeezed_fit(&rho);
    let cat = cat_fit(&rho);
    let scores = ClassScores { squeezed, cat: cat.fidelity, entangled, coherent };
    // a weakly squeezed vacuum is also close to a small even cat
    let class = if cat.fidelity >= 0.8 && cat.fidelity > squeezed {
        if cat.even {
            OscillatorClass::EvenCat
        } else {
            OscillatorClass::OddCat
        }
    } else if entangled >= 0.5 {
        OscillatorClass::Entangled
    } else if coherent >= 0.99 {
        OscillatorClass::Coherent
    } else if squeezed >= 0.8 {
        OscillatorClass::Squeezed
    } else if coherent >= 0.8 {
        OscillatorClass::Coherent
    } else {
        OscillatorClass::Other
    };
    Ok((class, scores, Some(cat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{qubit, FockTruncation};
    use crate::nonclassical::squeezing;

    fn osc_rho(v: &[C64]) -> DensityMatrix {
        DensityMatrix::from_pure(v, Subsystem::Oscillator)
    }

    fn cat(beta: C64, sign: f64, d: usize) -> Vec<C64> {
        let a = coherent_vec(beta, d);
        let b = coherent_vec(-beta, d);
        let v: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x + y * sign).collect();
        let n = linalg::norm(&v);
        v.iter().map(|z| z / n).collect()
    }

    #[test]
    fn squeezed_amplitudes_have_expected_variance() {
        let d = 80;
        let v = squeezed_amplitudes(C64::new(0.5, -0.3), 0.6, 0.0, d);
        assert!((linalg::norm(&v) - 1.0).abs() < 1e-12);
        let s = squeezing(&osc_rho(&v)).unwrap();
        assert!((s.s_x - ((-1.2f64).exp() - 1.0)).abs() < 1e-9);
        assert!((s.s_p - ((1.2f64).exp() - 1.0)).abs() < 1e-9);
        assert!((s.mean_x - 0.5).abs() < 1e-9 && (s.mean_p + 0.3).abs() < 1e-9);
    }

    #[test]
    fn fits_recover_their_own_states() {
        let d = 60;
        let sq = squeezed_amplitudes(C64::new(0.4, 0.2), 0.5, 1.1, d);
        let (f, beta, r, _) = squeezed_fit(&osc_rho(&sq));
        assert!(f > 1.0 - 1e-8, "{f}");
        assert!((beta - C64::new(0.4, 0.2)).norm() < 1e-4 && (r - 0.5).abs() < 1e-4);
        let coh = coherent_vec(C64::new(-1.0, 0.5), d);
        assert!(coherent_fit(&osc_rho(&coh)).0 > 1.0 - 1e-10);
        for sign in [1.0, -1.0] {
            let c = cat(C64::new(2.0, 0.0), sign, d);
            let fit = cat_fit(&osc_rho(&c));
            assert!(fit.fidelity > 1.0 - 1e-8, "{}", fit.fidelity);
            assert_eq!(fit.even, sign > 0.0);
        }
    }

    #[test]
    fn classification_of_reference_states() {
        let d = 40;
        let t = FockTruncation::new(d - 1).unwrap();
        let classify = |v: &[C64]| {
            let osc = PureState::normalized(v.to_vec()).unwrap();
            classify_oscillator(&PureState::product(&osc, qubit::UP).unwrap()).unwrap()
        };
        assert_eq!(classify(&PureState::fock(0, d).amplitudes).0, OscillatorClass::Coherent);
        assert_eq!(classify(&cat(C64::new(2.5, 0.0), 1.0, d)).0, OscillatorClass::EvenCat);
        assert_eq!(classify(&cat(C64::new(0.0, 2.5), -1.0, d)).0, OscillatorClass::OddCat);
        assert_eq!(classify(&squeezed_amplitudes(ZERO, 0.8, 0.0, d)).0, OscillatorClass::Squeezed);
        assert_eq!(classify(&PureState::fock(3, d).amplitudes).0, OscillatorClass::Other);
        // (|α⟩|↑⟩ + |−α⟩|↓⟩)/√2 is entangled but not a cat in the oscillator alone
        let a = crate::hilbert::coherent_state(C64::new(2.5, 0.0), &t).unwrap();
        let b = crate::hilbert::coherent_state(C64::new(-2.5, 0.0), &t).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 2 * d];
        for n in 0..d {
            amps[2 * n] = a.amplitudes[n] * h;
            amps[2 * n + 1] = b.amplitudes[n] * h;
        }
        let (class, scores, _) = classify_oscillator(&PureState::normalized(amps).unwrap()).unwrap();
        assert_eq!(class, OscillatorClass::Entangled);
        assert!(scores.entangled > 0.99);
    }

    #[test]
    fn fidelity_conventions() {
        let a = PureState::fock(0, 6);
        let b = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), ZERO, ZERO, ZERO, ZERO]).unwrap();
        let fp = fidelity(StateRef::Pure(&a), StateRef::Pure(&b)).unwrap();
        assert!((fp - 0.5).abs() < 1e-15);
        let ra = osc_rho(&a.amplitudes);
        let rb = osc_rho(&b.amplitudes);
        assert!((fidelity(StateRef::Mixed(&ra), StateRef::Mixed(&rb)).unwrap() - 0.5).abs() < 1e-7);
        assert!((fidelity(StateRef::Pure(&a), StateRef::Mixed(&rb)).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(StateRef::Pure(&a), StateRef::Pure(&PureState::fock(0, 4))).is_err());
    }
}
