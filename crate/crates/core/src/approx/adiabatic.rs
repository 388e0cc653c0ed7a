//! Adiabatic-qubit picture: the oscillator moves in the potential
//! `V(x) = ½ m ω0² x² ± ½ sqrt(Δ² + (ε − 2 g x)²)` set by the instantaneous
//! qubit eigenstate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::SystemParams;
use crate::optim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Qubit in its instantaneous ground state (lower sign).
    Ground,
    Excited,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Ground => -1.0,
            Branch::Excited => 1.0,
        }
    }
}

fn hyperbola(p: &SystemParams, x: f64) -> f64 {
    p.delta.hypot(p.eps - 2.0 * p.g() * x)
}

pub fn effective_potential(p: &SystemParams, x: f64, branch: Branch) -> f64 {
    0.5 * p.mass * p.omega0 * p.omega0 * x * x + branch.sign() * 0.5 * hyperbola(p, x)
}

/// `dV/dx`.
pub fn effective_force_gradient(p: &SystemParams, x: f64, branch: Branch) -> f64 {
    let g = p.g();
    p.mass * p.omega0 * p.omega0 * x - branch.sign() * g * (p.eps - 2.0 * g * x) / hyperbola(p, x)
}

/// `d²V/dx²`.
pub fn effective_curvature(p: &SystemParams, x: f64, branch: Branch) -> f64 {
    let g = p.g();
    let f = hyperbola(p, x);
    p.mass * p.omega0 * p.omega0 + branch.sign() * 2.0 * g * g * p.delta * p.delta / (f * f * f)
}

/// Renormalized frequency squared from the small-x expansion,
/// `ω̃0² = ω0² ± 2 g² / (m E_q)`; negative on the ground branch above the critical point.
pub fn omega_tilde_sq(p: &SystemParams, branch: Branch) -> f64 {
    let g = p.g();
    p.omega0 * p.omega0 + branch.sign() * 2.0 * g * g / (p.mass * p.e_q())
}

/// Critical coupling `λ_c = sqrt(ħω0 E_q) / 2`.
pub fn critical_lambda(p: &SystemParams) -> f64 {
    0.5 * (p.omega0 * p.e_q()).sqrt()
}

pub fn is_supercritical(p: &SystemParams) -> bool {
    p.critical_ratio() > 1.0
}

/// Search interval for minima: beyond it the harmonic term dominates.
fn search_extent(p: &SystemParams) -> f64 {
    let k = p.mass * p.omega0 * p.omega0;
    2.0 * p.g() / k + (p.e_q() / k).sqrt() + 4.0 * p.oscillator_length()
}

/// All local minima `(x, V)` of the effective potential, located by sign
/// changes of the analytic gradient and refined by bisection.
pub fn potential_minima(p: &SystemParams, branch: Branch) -> Vec<(f64, f64)> {
    const GRID: usize = 20_001;
    let l = search_extent(p);
    let grad = |x: f64| effective_force_gradient(p, x, branch);
    let mut out = Vec::new();
    let mut x_prev = -l;
    let mut g_prev = grad(x_prev);
    for i in 1..GRID {
        let x = -l + 2.0 * l * i as f64 / (GRID - 1) as f64;
        let gx = grad(x);
        if g_prev < 0.0 && gx >= 0.0 {
            let r = if gx == 0.0 { x } else { optim::bisect(x_prev, x, 1e-15 * l, grad) };
            out.push((r, effective_potential(p, r, branch)));
        }
        x_prev = x;
        g_prev = gx;
    }
    out
}

/// Symmetric-well minimum position at ε = 0,
/// `x0 = sqrt(g² / (m² ω0⁴) − Δ² / (4 g²))`.
pub fn well_position(p: &SystemParams) -> Result<f64> {
    if !is_supercritical(&p.with_eps(0.0)) || p.lambda == 0.0 {
        return Err(Error::Subcritical { ratio: p.with_eps(0.0).critical_ratio() });
    }
    let g = p.g();
    let k = p.mass * p.omega0 * p.omega0;
    Ok((g * g / (k * k) - p.delta * p.delta / (4.0 * g * g)).max(0.0).sqrt())
}

/// Result of the double-well tunnelling estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbReport {
    pub splitting: f64,
    /// `∫ sqrt(2 m (V − E0)) dx / ħ` over the forbidden region.
    pub exponent: f64,
    pub omega_well: f64,
    pub e0: f64,
    /// Inner turning point (positive side); zero when there is no barrier at E0.
    pub turning_point: f64,
    pub x0: f64,
}

/// `ΔE = (ħ ω_well / π) exp(−∫ sqrt(2 m (V − E0)) dx / ħ)` at `E0 = V(x0) + ħ ω_well / 2`.
pub fn wkb_analysis(p: &SystemParams) -> Result<WkbReport> {
    p.validate()?;
    if p.eps != 0.0 {
        return Err(Error::invalid("the tunnelling estimate assumes eps = 0"));
    }
    if !is_supercritical(p) {
        return Err(Error::Subcritical { ratio: p.critical_ratio() });
    }
    let x0 = well_position(p)?;
    let v = |x: f64| effective_potential(p, x, Branch::Ground);
    let curv = effective_curvature(p, x0, Branch::Ground).max(0.0);
    let omega_well = (curv / p.mass).sqrt();
    let e0 = v(x0) + 0.5 * omega_well;
    let (exponent, xt) = if v(0.0) <= e0 {
        (0.0, 0.0)
    } else {
        let xt = optim::bisect(0.0, x0, 1e-15 * x0.max(1e-300), |x| v(x) - e0);
        let integrand = |x: f64| (2.0 * p.mass * (v(x) - e0)).max(0.0).sqrt();
        let rough = quadrature::integrate(integrand, 0.0, xt, 1e-6 * xt).integral;
        let fine = quadrature::integrate(integrand, 0.0, xt, 1e-8 * rough.abs().max(1e-300));
        (2.0 * fine.integral, xt)
    };
    Ok(WkbReport {
        splitting: omega_well / std::f64::consts::PI * (-exponent).exp(),
        exponent,
        omega_well,
        e0,
        turning_point: xt,
        x0,
    })
}

pub fn wkb_splitting(p: &SystemParams) -> Result<f64> {
    Ok(wkb_analysis(p)?.splitting)
}

/// Adiabatic-qubit quantities for one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticQubitReport {
    pub branch: Branch,
    pub omega_tilde_sq: f64,
    pub is_supercritical: bool,
    pub lambda_c: f64,
    /// Positive well position; present above the critical point.
    pub x0: Option<f64>,
    /// `V(±x0) − V(0)`; present above the critical point.
    pub v_min: Option<f64>,
    /// `d²V/dx²` at the (deepest) minimum.
    pub curvature_at_min: f64,
    /// Location of the deepest minimum.
    pub minimum_location: f64,
    /// Small-coupling minimum `∓ ε g / (m ω̃0² E_q)`; present below the critical point.
    pub shifted_minimum: Option<f64>,
    pub wkb_splitting: Option<f64>,
    /// Bias above which the ground state localizes in one well (equal to the
    /// zero-bias tunnel splitting).
    pub epsilon_localization_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticQubitAnalysis {
    pub critical_ratio: f64,
    pub lambda_c: f64,
    /// `ħω0 < 0.1 E_q`, where the adiabatic-qubit picture is meant to hold.
    pub in_regime: bool,
    pub ground: AdiabaticQubitReport,
    pub excited: AdiabaticQubitReport,
}

fn branch_report(p: &SystemParams, branch: Branch) -> Result<AdiabaticQubitReport> {
    let supercritical = branch == Branch::Ground && is_supercritical(p);
    let minima = potential_minima(p, branch);
    let (xmin, _) = minima
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Eigensolver("effective potential has no minimum".into()))?;
    let v0 = effective_potential(p, 0.0, branch);
    let (x0, v_min, wkb) = if supercritical {
        if p.eps == 0.0 {
            let x0 = well_position(p)?;
            let w = wkb_splitting(p)?;
            (Some(x0), Some(effective_potential(p, x0, branch) - v0), Some(w))
        } else {
            let w = wkb_splitting(&p.with_eps(0.0))?;
            (Some(xmin.abs()), Some(effective_potential(p, xmin, branch) - v0), Some(w))
        }
    } else {
        (None, None, None)
    };
    let ot2 = omega_tilde_sq(p, branch);
    let shifted = (!supercritical).then(|| branch.sign() * p.eps * p.g() / (p.mass * ot2 * p.e_q()));
    let curv_x = if supercritical && p.eps == 0.0 { x0.unwrap_or(xmin) } else { xmin };
    Ok(AdiabaticQubitReport {
        branch,
        omega_tilde_sq: ot2,
        is_supercritical: supercritical,
        lambda_c: critical_lambda(p),
        x0,
        v_min,
        curvature_at_min: effective_curvature(p, curv_x, branch),
        minimum_location: xmin,
        shifted_minimum: shifted,
        wkb_splitting: wkb,
        epsilon_localization_threshold: wkb,
    })
}

pub fn adiabatic_qubit_analysis(p: &SystemParams) -> Result<AdiabaticQubitAnalysis> {
    p.validate()?;
    let in_regime = p.omega0 < 0.1 * p.e_q();
    if !in_regime {
        log::warn!("hbar*omega0/E_q = {:.3}: outside the adiabatic-qubit regime", p.omega0 / p.e_q());
    }
    Ok(AdiabaticQubitAnalysis {
        critical_ratio: p.critical_ratio(),
        lambda_c: critical_lambda(p),
        in_regime,
        ground: branch_report(p, Branch::Ground)?,
        excited: branch_report(p, Branch::Excited)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Δ = 1, ω0 = m = 1 with 2 g² / (m ω0² Δ) = `kappa`.
    fn at_kappa(kappa: f64) -> SystemParams {
        let g = (kappa / 2.0).sqrt();
        SystemParams::new(1.0, 0.0, 0.0).with_lambda(g / 2f64.sqrt())
    }

    #[test]
    fn offsets_at_origin() {
        let p = SystemParams::new(0.8, 0.0, 0.7);
        assert_eq!(effective_potential(&p, 0.0, Branch::Ground), -0.4);
        assert_eq!(effective_potential(&p, 0.0, Branch::Excited), 0.4);
    }

    #[test]
    fn asymptotic_form() {
        let p = SystemParams::new(0.5, 0.3, 2.0);
        let g = p.g();
        for x in [-200.0, 150.0] {
            for b in [Branch::Ground, Branch::Excited] {
                let exact = effective_potential(&p, x, b);
                let asym = 0.5 * x * x + b.sign() * (g * x - p.eps / 2.0).abs();
                assert!((exact - asym).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn minima_match_closed_form() {
        let p = at_kappa(2.0);
        let x0 = well_position(&p).unwrap();
        let m = potential_minima(&p, Branch::Ground);
        assert_eq!(m.len(), 2);
        assert!((m[1].0 - x0).abs() < 1e-10 && (m[0].0 + x0).abs() < 1e-10);
        let h = 1e-4;
        assert!(effective_force_gradient(&p, x0 - h, Branch::Ground) < 0.0);
        assert!(effective_force_gradient(&p, x0 + h, Branch::Ground) > 0.0);
    }

    #[test]
    fn critical_point_at_resonance() {
        let p = SystemParams::new(1.0, 0.0, 0.5);
        assert!((critical_lambda(&p) - 0.5).abs() < 1e-15);
        assert!((p.critical_ratio() - 1.0).abs() < 1e-15);
        assert!(!is_supercritical(&p));
        assert!(is_supercritical(&p.with_lambda(0.5 + 1e-12)));
        assert!(well_position(&p).is_err());
    }

    #[test]
    fn deep_well_asymptotics() {
        for kappa in [10.0, 40.0] {
            let p = at_kappa(kappa);
            let g = p.g();
            let x0 = well_position(&p).unwrap();
            assert!((x0 / g - 1.0).abs() < 0.01 || kappa < 20.0 && (x0 / g - 1.0).abs() < 0.02);
            let curv = effective_curvature(&p, x0, Branch::Ground);
            assert!((curv - 1.0).abs() < 0.02);
            let r = adiabatic_qubit_analysis(&p).unwrap();
            assert!(r.ground.v_min.unwrap() < 0.0);
        }
        let p = at_kappa(400.0);
        let r = adiabatic_qubit_analysis(&p).unwrap();
        let g = p.g();
        assert!((r.ground.v_min.unwrap() / (-g * g / 2.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn wkb_degenerate_at_threshold() {
        let p = SystemParams::new(1.0, 0.0, 0.5 + 1e-9);
        let w = wkb_analysis(&p).unwrap();
        assert_eq!(w.exponent, 0.0);
        assert!(wkb_analysis(&p.with_lambda(0.4)).is_err());
    }

    #[test]
    fn wkb_log_affine_in_lambda_squared() {
        let p = SystemParams::new(100.0, 0.0, 0.0);
        let lams: Vec<f64> = (0..6).map(|i| 6.0 + 0.4 * i as f64).collect();
        let logs: Vec<f64> = lams.iter().map(|&l| wkb_splitting(&p.with_lambda(l)).unwrap().ln()).collect();
        let slopes: Vec<f64> = (1..6).map(|i| (logs[i] - logs[i - 1]) / (lams[i].powi(2) - lams[i - 1].powi(2))).collect();
        assert!(slopes.iter().all(|s| *s < 0.0));
        let spread = slopes.iter().cloned().fold(f64::MIN, f64::max) - slopes.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.1 * slopes[0].abs());
    }

    #[test]
    fn tilt_removes_shallow_well() {
        let p = at_kappa(3.0);
        let depth = |eps: f64| {
            let m = potential_minima(&p.with_eps(eps), Branch::Ground);
            if m.len() == 2 { Some((m[0].1 - m[1].1).abs()) } else { None }
        };
        let d1 = depth(0.01).unwrap();
        let d2 = depth(0.02).unwrap();
        assert!(d1 > 0.0 && (d2 / d1 - 2.0).abs() < 0.05);
        assert!(depth(5.0).is_none());
    }

    #[test]
    fn subcritical_shift_sign() {
        let p = SystemParams::new(10.0, 2.0, 0.5);
        let r = adiabatic_qubit_analysis(&p).unwrap();
        assert!(!r.ground.is_supercritical);
        let s = r.ground.shifted_minimum.unwrap();
        assert!(s < 0.0 && (s - r.ground.minimum_location).abs() < 0.1 * s.abs());
        assert!(r.ground.x0.is_none() && r.ground.wkb_splitting.is_none());
    }
}
