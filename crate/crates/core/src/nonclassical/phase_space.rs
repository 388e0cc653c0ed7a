//! Husimi Q and Wigner functions on a rectangular grid of the dimensionless
//! quadratures (X, P), with `α = X + iP`.
//!
//! Normalization: `∫ Q dX dP = ∫ W dX dP = 1`; the vacuum has `Q(0,0) = 1/π`
//! and `W(0,0) = 2/π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{DensityMatrix, Subsystem};
use crate::error::{Error, Result};
use crate::format::Table;
use crate::hilbert::coherent_amplitudes;
use crate::linalg::{pairwise_sum, C64, ZERO};

/// Fock populations beyond this tail are dropped before phase-space sums.
const FOCK_TAIL: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Q,
    Wigner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseGrid {
    pub fn square(half_width: f64, points: usize) -> Self {
        let axis = crate::spectrum::linspace(-half_width, half_width, points);
        PhaseGrid { x: axis.clone(), p: axis }
    }

    /// `[−6 − 2λ/ħω0, 6 + 2λ/ħω0]²` with 201 points per axis.
    pub fn default_for(lambda_ratio: f64) -> Self {
        Self::square(6.0 + 2.0 * lambda_ratio, 201)
    }

    fn cell_area(&self) -> f64 {
        step(&self.x) * step(&self.p)
    }
}

fn step(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        1.0
    } else {
        (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
    }
}

/// Field values with `values[i][j]` at `(x[i], p[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceField {
    pub kind: FieldKind,
    pub x_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PhaseSpaceField {
    /// Riemann sum `Σ f ΔX ΔP`, accumulated pairwise.
    pub fn integral(&self) -> f64 {
        let flat: Vec<f64> = self.values.iter().flatten().copied().collect();
        pairwise_sum(&flat) * step(&self.x_grid) * step(&self.p_grid)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ_P f ΔP` for each X.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = step(&self.p_grid);
        self.values.iter().map(|col| pairwise_sum(col) * dp).collect()
    }

    /// Grid points that are strict local maxima over their 8 neighbours.
    pub fn local_maxima(&self) -> Vec<(f64, f64, f64)> {
        let (nx, np) = (self.x_grid.len(), self.p_grid.len());
        let mut out = Vec::new();
        for i in 1..nx.saturating_sub(1) {
            for j in 1..np.saturating_sub(1) {
                let v = self.values[i][j];
                let is_max = (-1i32..=1).all(|di| {
                    (-1i32..=1).all(|dj| {
                        (di == 0 && dj == 0)
                            || v > self.values[(i as i32 + di) as usize][(j as i32 + dj) as usize]
                    })
                });
                if is_max {
                    out.push((self.x_grid[i], self.p_grid[j], v));
                }
            }
        }
        out
    }

    /// Long-form table `X, P, value`.
    pub fn to_table(&self) -> Table {
        let label = match self.kind {
            FieldKind::Q => "Q",
            FieldKind::Wigner => "W",
        };
        let mut t = Table::new(["X", "P", label])
            .meta("kind", label)
            .meta("nx", self.x_grid.len())
            .meta("np", self.p_grid.len());
        for (i, &x) in self.x_grid.iter().enumerate() {
            for (j, &p) in self.p_grid.iter().enumerate() {
                t.push(vec![x, p, self.values[i][j]]);
            }
        }
        t
    }
}

fn require_oscillator(rho: &DensityMatrix) -> Result<()> {
    if rho.subsystem != Subsystem::Oscillator {
        return Err(Error::invalid("phase-space functions need an oscillator density matrix"));
    }
    Ok(())
}

fn check_grid(grid: &PhaseGrid) -> Result<()> {
    if grid.x.is_empty() || grid.p.is_empty() {
        return Err(Error::invalid("phase-space grid is empty"));
    }
    if grid.x.iter().chain(&grid.p).any(|v| !v.is_finite()) {
        return Err(Error::invalid("phase-space grid has non-finite points"));
    }
    Ok(())
}

fn sample(grid: &PhaseGrid, f: impl Fn(C64) -> f64 + Sync) -> Vec<Vec<f64>> {
    grid.x
        .par_iter()
        .map(|&x| grid.p.iter().map(|&p| f(C64::new(x, p))).collect())
        .collect()
}

/// `Q(α) = ⟨α|ρ|α⟩ / π`, with the exact (untruncated) coherent-state
/// amplitudes projected on the kept Fock levels.
pub fn q_function(rho: &DensityMatrix, grid: &PhaseGrid) -> Result<PhaseSpaceField> {
    require_oscillator(rho)?;
    check_grid(grid)?;
    let m = rho.effective_dim(FOCK_TAIL);
    let r = &rho.entries;
    let values = sample(grid, |alpha| {
        let c = coherent_amplitudes(alpha, m - 1);
        let mut acc = ZERO;
        for j in 0..m {
            let mut col = ZERO;
            for i in 0..m {
                col += c[i].conj() * r[(i, j)];
            }
            acc += col * c[j];
        }
        (acc.re / std::f64::consts::PI).max(0.0)
    });
    Ok(PhaseSpaceField { kind: FieldKind::Q, x_grid: grid.x.clone(), p_grid: grid.p.clone(), values })
}

/// Wigner function at one point by the stable Laguerre-type recursion.
fn wigner_at(r: &faer::Mat<C64>, m: usize, alpha: C64, w: &mut [C64]) -> f64 {
    let a2 = 2.0 * alpha;
    let a2c = 2.0 * alpha.conj();
    w[0] = C64::new((2.0 / std::f64::consts::PI) * (-2.0 * alpha.norm_sqr()).exp(), 0.0);
    let mut acc = r[(0, 0)].re * w[0].re;
    for n in 1..m {
        w[n] = a2 * w[n - 1] / (n as f64).sqrt();
        acc += 2.0 * (r[(0, n)] * w[n]).re;
    }
    for i in 1..m {
        let si = (i as f64).sqrt();
        let mut temp = w[i];
        w[i] = (a2c * temp - si * w[i - 1]) / si;
        acc += (r[(i, i)] * w[i]).re;
        for n in (i + 1)..m {
            let next = (a2 * w[n - 1] - si * temp) / (n as f64).sqrt();
            temp = w[n];
            w[n] = next;
            acc += 2.0 * (r[(i, n)] * w[n]).re;
        }
    }
    acc
}

/// Wigner function `W(α) = (2/π) Tr[ρ D(α) Π D†(α)]`.
pub fn wigner_function(rho: &DensityMatrix, grid: &PhaseGrid) -> Result<PhaseSpaceField> {
    require_oscillator(rho)?;
    check_grid(grid)?;
    let m = rho.effective_dim(FOCK_TAIL);
    let r = &rho.entries;
    let values = grid
        .x
        .par_iter()
        .map_init(
            || vec![ZERO; m],
            |w, &x| grid.p.iter().map(|&p| wigner_at(r, m, C64::new(x, p), w)).collect(),
        )
        .collect();
    Ok(PhaseSpaceField { kind: FieldKind::Wigner, x_grid: grid.x.clone(), p_grid: grid.p.clone(), values })
}

/// Hermite functions `φ_n(x)`, `n = 0..m`, for `[x, p] = i`.
fn hermite_functions(x: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(cur);
    for n in 1..m {
        let next = (2.0 / n as f64).sqrt() * x * cur - ((n - 1) as f64 / n as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Position-quadrature distribution `p(X) = ⟨X|ρ|X⟩`, normalized over dX.
pub fn x_marginal(rho: &DensityMatrix, xs: &[f64]) -> Result<Vec<f64>> {
    require_oscillator(rho)?;
    let m = rho.effective_dim(FOCK_TAIL);
    let r = &rho.entries;
    let s2 = std::f64::consts::SQRT_2;
    Ok(xs
        .par_iter()
        .map(|&x| {
            let phi = hermite_functions(s2 * x, m);
            let mut acc = ZERO;
            for j in 0..m {
                for i in 0..m {
                    acc += r[(i, j)] * (phi[i] * phi[j]);
                }
            }
            s2 * acc.re
        })
        .collect())
}

/// Area of one grid cell.
pub fn cell_area(grid: &PhaseGrid) -> f64 {
    grid.cell_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, FockTruncation, PureState};
    use std::f64::consts::PI;

    fn vacuum(n: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::fock(0, n).amplitudes, Subsystem::Oscillator)
    }

    #[test]
    fn vacuum_peaks() {
        let g = PhaseGrid { x: vec![0.0, 1.0], p: vec![0.0] };
        let q = q_function(&vacuum(16), &g).unwrap();
        let w = wigner_function(&vacuum(16), &g).unwrap();
        assert!((q.values[0][0] - 1.0 / PI).abs() < 1e-15);
        assert!((q.values[1][0] - (-1.0f64).exp() / PI).abs() < 1e-12);
        assert!((w.values[0][0] - 2.0 / PI).abs() < 1e-15);
        assert!((w.values[1][0] - 2.0 / PI * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fock_one_wigner_is_negative_at_origin() {
        let rho = DensityMatrix::from_pure(&PureState::fock(1, 12).amplitudes, Subsystem::Oscillator);
        let g = PhaseGrid { x: vec![0.0], p: vec![0.0] };
        let w = wigner_function(&rho, &g).unwrap();
        assert!((w.values[0][0] + 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn coherent_state_moments_from_wigner() {
        let t = FockTruncation::new(40).unwrap();
        let alpha = C64::new(0.7, -0.4);
        let s = coherent_state(alpha, &t).unwrap();
        let rho = DensityMatrix::from_pure(&s.amplitudes, Subsystem::Oscillator);
        let grid = PhaseGrid::square(5.0, 121);
        let w = wigner_function(&rho, &grid).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-6);
        let da = cell_area(&grid);
        let mut mx = 0.0;
        let mut mp = 0.0;
        for (i, x) in grid.x.iter().enumerate() {
            for (j, p) in grid.p.iter().enumerate() {
                mx += x * w.values[i][j] * da;
                mp += p * w.values[i][j] * da;
            }
        }
        assert!((mx - 0.7).abs() < 1e-6 && (mp + 0.4).abs() < 1e-6);
    }

    #[test]
    fn marginal_of_vacuum_is_gaussian() {
        let xs = [0.0, 0.5, -1.2];
        let m = x_marginal(&vacuum(8), &xs).unwrap();
        for (x, v) in xs.iter().zip(m) {
            let expect = (2.0 / PI).sqrt() * (-2.0 * x * x).exp();
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_qubit_matrix() {
        let rho = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), ZERO], Subsystem::Qubit);
        assert!(q_function(&rho, &PhaseGrid::square(1.0, 3)).is_err());
    }
}
