//! Classical stationary points of the Hamiltonian with the qubit treated as a
//! unit Bloch vector (σy = 0, p = 0).
//!
//! With `κ = 2 g² / (m ω0² Δ)` the stationary condition reduces to
//! `−ε/Δ − (κ ∓ 1/sqrt(1 − σz²)) σz = 0`; the minus sign corresponds to
//! `σx = +sqrt(1 − σz²)`, the plus sign to `σx = −sqrt(1 − σz²)`.

use serde::{Deserialize, Serialize};

use crate::hilbert::SystemParams;
use crate::optim;

const GRID: usize = 10_000;
const ROOT_TOL: f64 = 1e-12;
const SIGN_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSign {
    /// `σx > 0`.
    Minus,
    /// `σx < 0`; never the ground state.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalSolution {
    pub sigma_z: f64,
    pub sigma_x: f64,
    pub x: f64,
    pub p: f64,
    pub energy: f64,
    pub stability: Stability,
    pub branch_sign: BranchSign,
    pub ground_candidate: bool,
}

/// `κ = 2 g² / (m ω0² Δ)`.
pub fn kappa(p: &SystemParams) -> f64 {
    let g = p.g();
    2.0 * g * g / (p.mass * p.omega0 * p.omega0 * p.delta)
}

fn complete(p: &SystemParams, phi: f64, branch: BranchSign) -> SemiclassicalSolution {
    let sz = phi.sin();
    let sx = match branch {
        BranchSign::Minus => phi.cos(),
        BranchSign::Plus => -phi.cos(),
    };
    let g = p.g();
    let k = p.mass * p.omega0 * p.omega0;
    let x = -g * sz / k;
    let energy = 0.5 * k * x * x + g * x * sz - 0.5 * p.delta * sx - 0.5 * p.eps * sz;
    // Second variation on the sphere: the spin curvature equals the projection
    // of the local field on the Bloch vector and is the same for both tangent
    // directions; the x–spin block couples through g σx.
    let spin = 0.5 * p.delta * sx + (0.5 * p.eps - g * x) * sz;
    let cross = g * sx;
    let tr = k + spin;
    let det = k * spin - cross * cross;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let eig = [0.5 * tr - disc, 0.5 * tr + disc, spin, 1.0 / p.mass];
    let stable = eig.iter().all(|e| *e > SIGN_THRESHOLD);
    SemiclassicalSolution {
        sigma_z: sz,
        sigma_x: sx,
        x,
        p: 0.0,
        energy,
        stability: if stable { Stability::Stable } else { Stability::Unstable },
        branch_sign: branch,
        ground_candidate: branch == BranchSign::Minus,
    }
}

/// All stationary points, ordered by branch (minus first) and then by σz.
pub fn semiclassical_stationary_points(p: &SystemParams) -> Vec<SemiclassicalSolution> {
    let kap = kappa(p);
    let bias = p.eps / p.delta;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();
    for branch in [BranchSign::Minus, BranchSign::Plus] {
        let s = if branch == BranchSign::Minus { -1.0 } else { 1.0 };
        // Multiplied through by cos φ > 0 so the function is smooth at the poles.
        let f = |phi: f64| {
            let (sz, c) = phi.sin_cos();
            -bias * c - (kap * c + s) * sz
        };
        let nodes: Vec<f64> = (1..GRID).map(|i| -half_pi + std::f64::consts::PI * i as f64 / GRID as f64).collect();
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        for i in 0..nodes.len() {
            if vals[i] == 0.0 {
                out.push(complete(p, nodes[i], branch));
                continue;
            }
            if i + 1 < nodes.len() && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
                let phi = optim::bisect(nodes[i], nodes[i + 1], ROOT_TOL, f);
                out.push(complete(p, phi, branch));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_kappa(kappa: f64, eps: f64) -> SystemParams {
        let g = (kappa / 2.0).sqrt();
        SystemParams::new(1.0, eps, g / 2f64.sqrt())
    }

    #[test]
    fn single_solution_below_critical() {
        let sols = semiclassical_stationary_points(&at_kappa(0.5, 0.0));
        let minus: Vec<_> = sols.iter().filter(|s| s.branch_sign == BranchSign::Minus).collect();
        assert_eq!(minus.len(), 1);
        assert!(minus[0].sigma_z.abs() < 1e-12);
        assert_eq!(minus[0].stability, Stability::Stable);
    }

    #[test]
    fn degenerate_pair_at_kappa_two() {
        let sols = semiclassical_stationary_points(&at_kappa(2.0, 0.0));
        let stable: Vec<_> = sols
            .iter()
            .filter(|s| s.branch_sign == BranchSign::Minus && s.stability == Stability::Stable)
            .collect();
        assert_eq!(stable.len(), 2);
        let r = 3f64.sqrt() / 2.0;
        assert!((stable[0].sigma_z + r).abs() < 1e-10);
        assert!((stable[1].sigma_z - r).abs() < 1e-10);
        assert!((stable[0].energy - stable[1].energy).abs() < 1e-12);
        let centre = sols.iter().find(|s| s.branch_sign == BranchSign::Minus && s.sigma_z.abs() < 1e-9).unwrap();
        assert_eq!(centre.stability, Stability::Unstable);
        for s in &sols {
            assert!((s.sigma_x.powi(2) + s.sigma_z.powi(2) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plus_branch_never_ground() {
        for s in semiclassical_stationary_points(&at_kappa(3.0, 0.4)) {
            if s.branch_sign == BranchSign::Plus {
                assert!(!s.ground_candidate);
                assert!(s.sigma_x < 0.0);
            }
        }
    }

    #[test]
    fn count_is_bounded() {
        for kap in [0.1, 0.9, 1.1, 2.0, 5.0] {
            for eps in [0.0, 0.05, 0.7, 3.0] {
                let n = semiclassical_stationary_points(&at_kappa(kap, eps)).len();
                assert!((1..=4).contains(&n), "kappa {kap} eps {eps}: {n}");
            }
        }
    }
}
