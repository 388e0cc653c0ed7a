//! Exact diagonalization, level curves and pair splittings.
//!
//! At ε = 0 the Hamiltonian commutes with the parity Π = σx ⊗ (−1)^n and
//! splits into two tridiagonal blocks of size N + 1. In the block with parity
//! `p` the basis is |n, s_n⟩ with σx eigenvalue `s_n = p (−1)^n`, the diagonal
//! is `ħω0 n − (Δ/2) s_n` and the off-diagonal is `λ sqrt(n + 1)`.

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::Table;
use crate::hilbert::{
    self, apply_hamiltonian, choose_truncation, index, FockTruncation, PureState, SystemParams,
    TruncatedOperator, TruncationOptions,
};
use crate::linalg::{self, C64, ZERO};

/// Relative eigenpair residual bound, `‖Hv − Ev‖ < RESIDUAL_BOUND ‖H‖`.
pub const RESIDUAL_BOUND: f64 = 1e-9;
/// Splittings below this (in units of ħω0) are reported as zero.
pub const SPLITTING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// The lowest `k` eigenpairs at one parameter point.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Ascending.
    pub energies: Vec<f64>,
    pub states: Vec<PureState>,
    /// Parity of each state, when solved in parity sectors (ε = 0).
    pub parities: Option<Vec<Parity>>,
    pub params: Option<SystemParams>,
    pub n_max: usize,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn ground(&self) -> &PureState {
        &self.states[0]
    }

    /// `E_{i+1} − E_i` for zero-based `i`.
    pub fn gap(&self, i: usize) -> f64 {
        self.energies[i + 1] - self.energies[i]
    }
}

/// Flips the sign of `v` so its largest-magnitude component is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-14 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Tridiagonal parity block of size N + 1 (valid at ε = 0).
pub fn parity_block(p: &SystemParams, n_max: usize, parity: Parity) -> Mat<f64> {
    let dim = n_max + 1;
    let mut m = Mat::<f64>::zeros(dim, dim);
    for n in 0..dim {
        let s = parity.sign() * if n % 2 == 0 { 1.0 } else { -1.0 };
        m[(n, n)] = p.omega0 * n as f64 - 0.5 * p.delta * s;
        if n + 1 < dim {
            let c = p.lambda * ((n + 1) as f64).sqrt();
            m[(n, n + 1)] = c;
            m[(n + 1, n)] = c;
        }
    }
    m
}

/// Embeds a parity-block eigenvector into the full product basis.
fn embed_parity_vector(c: &[f64], parity: Parity) -> Vec<C64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![ZERO; 2 * c.len()];
    for (n, &cn) in c.iter().enumerate() {
        let s = parity.sign() * if n % 2 == 0 { 1.0 } else { -1.0 };
        out[index(n, 0)] = C64::new(cn * r, 0.0);
        out[index(n, 1)] = C64::new(s * cn * r, 0.0);
    }
    out
}

fn sector_spectrum(p: &SystemParams, n_max: usize) -> Result<[(Vec<f64>, Mat<f64>); 2]> {
    let even = linalg::symmetric_eigen(&parity_block(p, n_max, Parity::Even))?;
    let odd = linalg::symmetric_eigen(&parity_block(p, n_max, Parity::Odd))?;
    Ok([even, odd])
}

/// Lowest `k` energies at truncation `n_max`, without eigenvectors where possible.
pub fn lowest_energies(p: &SystemParams, n_max: usize, k: usize) -> Result<Vec<f64>> {
    p.validate()?;
    let dim = 2 * (n_max + 1);
    if k > dim {
        return Err(Error::invalid(format!("asked for {k} levels of a {dim}-dimensional space")));
    }
    let mut all = if p.eps == 0.0 {
        let even = linalg::symmetric_eigenvalues(&parity_block(p, n_max, Parity::Even))?;
        let odd = linalg::symmetric_eigenvalues(&parity_block(p, n_max, Parity::Odd))?;
        let mut v = even;
        v.extend(odd);
        v
    } else {
        linalg::symmetric_eigenvalues(&hilbert::hamiltonian_matrix(p, n_max))?
    };
    all.sort_by(f64::total_cmp);
    all.truncate(k);
    Ok(all)
}

fn check_residual(index: usize, residual: f64, scale: f64) -> Result<()> {
    let bound = RESIDUAL_BOUND * scale.max(f64::MIN_POSITIVE);
    if !(residual < bound) {
        return Err(Error::Residual { index, residual, bound });
    }
    Ok(())
}

/// Lowest `k` eigenpairs of the system Hamiltonian at a fixed truncation.
///
/// Uses the parity blocks at ε = 0 and a dense real solver otherwise. On exact
/// ties between the blocks the even state comes first.
pub fn solve(p: &SystemParams, trunc: &FockTruncation, k: usize) -> Result<EigenSolution> {
    p.validate()?;
    trunc.validate()?;
    let n_max = trunc.n_max;
    let dim = trunc.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("k must lie in 1..={dim}, got {k}")));
    }
    let (energies, vectors, parities, scale) = if p.eps == 0.0 {
        let [even, odd] = sector_spectrum(p, n_max)?;
        let mut order: Vec<(f64, Parity, usize)> = Vec::with_capacity(dim);
        order.extend(even.0.iter().enumerate().map(|(i, &e)| (e, Parity::Even, i)));
        order.extend(odd.0.iter().enumerate().map(|(i, &e)| (e, Parity::Odd, i)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let scale = order.first().map_or(0.0, |o| o.0.abs()).max(order.last().map_or(0.0, |o| o.0.abs()));
        let mut energies = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        let mut parities = Vec::with_capacity(k);
        for &(e, par, col) in order.iter().take(k) {
            let u = if par == Parity::Even { &even.1 } else { &odd.1 };
            let mut c: Vec<f64> = (0..=n_max).map(|i| u[(i, col)]).collect();
            fix_sign(&mut c);
            energies.push(e);
            vectors.push(embed_parity_vector(&c, par));
            parities.push(par);
        }
        (energies, vectors, Some(parities), scale)
    } else {
        let (vals, u) = linalg::symmetric_eigen(&hilbert::hamiltonian_matrix(p, n_max))?;
        let scale = vals[0].abs().max(vals[dim - 1].abs());
        let mut vectors = Vec::with_capacity(k);
        for col in 0..k {
            let mut c: Vec<f64> = (0..dim).map(|i| u[(i, col)]).collect();
            fix_sign(&mut c);
            vectors.push(c.into_iter().map(|x| C64::new(x, 0.0)).collect::<Vec<_>>());
        }
        (vals[..k].to_vec(), vectors, None, scale)
    };
    let mut states = Vec::with_capacity(k);
    for (i, (v, &e)) in vectors.into_iter().zip(&energies).enumerate() {
        let hv = apply_hamiltonian(p, n_max, &v);
        let r = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        check_residual(i, r, scale)?;
        states.push(PureState::normalized(v)?);
    }
    Ok(EigenSolution { energies, states, parities, params: Some(*p), n_max })
}

/// `choose_truncation` followed by `solve`.
pub fn solve_auto(p: &SystemParams, k: usize, opts: TruncationOptions) -> Result<EigenSolution> {
    let trunc = choose_truncation(p, k, opts)?;
    solve(p, &trunc, k)
}

/// Lowest `k` eigenpairs of an arbitrary Hermitian operator.
pub fn diagonalize(h: &TruncatedOperator, k: usize) -> Result<EigenSolution> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("k must lie in 1..={dim}, got {k}")));
    }
    if h.hermiticity_defect() > 1e-12 * linalg::max_abs_entry(&h.entries).max(1.0) {
        return Err(Error::invalid(format!("{} is not Hermitian", h.label)));
    }
    let (vals, u) = linalg::hermitian_eigen(&h.entries)?;
    let scale = vals[0].abs().max(vals[dim - 1].abs());
    let mut states = Vec::with_capacity(k);
    for col in 0..k {
        let v: Vec<C64> = (0..dim).map(|i| u[(i, col)]).collect();
        let hv = linalg::matvec(&h.entries, &v);
        let r = hv.iter().zip(&v).map(|(a, b)| (a - b * vals[col]).norm_sqr()).sum::<f64>().sqrt();
        check_residual(col, r, scale)?;
        states.push(PureState::normalized(v)?);
    }
    Ok(EigenSolution {
        energies: vals[..k].to_vec(),
        states,
        parities: None,
        params: None,
        n_max: dim / 2 - 1,
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    if grid.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::invalid("lambda grid values must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("lambda grid must be strictly increasing"));
    }
    Ok(())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyUnit {
    /// ħω0.
    Oscillator,
    /// E_q.
    Qubit,
}

impl EnergyUnit {
    pub fn scale(self, p: &SystemParams) -> f64 {
        match self {
            EnergyUnit::Oscillator => p.omega0,
            EnergyUnit::Qubit => p.e_q(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnergyUnit::Oscillator => "hbar*omega0",
            EnergyUnit::Qubit => "E_q",
        }
    }
}

/// Lowest levels over a grid of couplings.
#[derive(Debug, Clone)]
pub struct LevelCurveTable {
    /// λ / ħω0.
    pub lambda_grid: Vec<f64>,
    /// One-based level labels E1, E2, ...
    pub level_index: Vec<usize>,
    /// `energy_matrix[i][k]` is level k at `lambda_grid[i]`, in `unit`.
    pub energy_matrix: Vec<Vec<f64>>,
    pub theta: f64,
    pub omega_over_eq: f64,
    pub unit: EnergyUnit,
    pub n_max: Vec<usize>,
}

impl LevelCurveTable {
    pub fn to_table(&self) -> Table {
        let mut cols = vec!["lambda".to_string()];
        cols.extend(self.level_index.iter().map(|k| format!("E{k}")));
        let mut t = Table::new(cols)
            .meta("theta", crate::format::fmt_num(self.theta))
            .meta("omega0_over_Eq", crate::format::fmt_num(self.omega_over_eq))
            .meta("units", self.unit.label())
            .meta("n_max", self.n_max.iter().max().copied().unwrap_or(0));
        for (l, row) in self.lambda_grid.iter().zip(&self.energy_matrix) {
            let mut r = vec![*l];
            r.extend(row);
            t.push(r);
        }
        t
    }
}

/// Lowest `levels` energies at every λ of `lambda_grid` (in units of ħω0).
pub fn level_curves(
    p_base: &SystemParams,
    lambda_grid: &[f64],
    levels: usize,
    unit: EnergyUnit,
    opts: TruncationOptions,
) -> Result<LevelCurveTable> {
    p_base.validate()?;
    check_grid(lambda_grid)?;
    if levels == 0 {
        return Err(Error::invalid("levels must be >= 1"));
    }
    let rows: Vec<(Vec<f64>, usize)> = lambda_grid
        .par_iter()
        .map(|&l| {
            let p = p_base.with_lambda(l * p_base.omega0);
            let trunc = choose_truncation(&p, levels, opts).map_err(|e| e.at_lambda(l))?;
            let e = lowest_energies(&p, trunc.n_max, levels).map_err(|e| e.at_lambda(l))?;
            let s = unit.scale(&p);
            Ok((e.into_iter().map(|x| x / s).collect(), trunc.n_max))
        })
        .collect::<Result<_>>()?;
    let (energy_matrix, n_max) = rows.into_iter().unzip();
    Ok(LevelCurveTable {
        lambda_grid: lambda_grid.to_vec(),
        level_index: (1..=levels).collect(),
        energy_matrix,
        theta: p_base.theta(),
        omega_over_eq: p_base.omega0 / p_base.e_q(),
        unit,
        n_max,
    })
}

/// `E_{2n+2} − E_{2n+1}` over a λ grid.
#[derive(Debug, Clone)]
pub struct PairSplitting {
    pub pair_index: usize,
    /// λ / ħω0.
    pub lambda_grid: Vec<f64>,
    /// In units of ħω0.
    pub splitting: Vec<f64>,
    /// True where the splitting fell under the double-precision floor and was set to zero.
    pub below_floor: Vec<bool>,
    pub theta: f64,
    pub omega_over_eq: f64,
}

impl PairSplitting {
    pub fn to_table(&self, unit: EnergyUnit, p: &SystemParams) -> Table {
        let s = unit.scale(p);
        let mut t = Table::new(["lambda", "splitting", "below_floor"])
            .meta("pair_index", self.pair_index)
            .meta("theta", crate::format::fmt_num(self.theta))
            .meta("omega0_over_Eq", crate::format::fmt_num(self.omega_over_eq))
            .meta("units", unit.label());
        for i in 0..self.lambda_grid.len() {
            t.push(vec![
                self.lambda_grid[i],
                self.splitting[i] * p.omega0 / s,
                if self.below_floor[i] { 1.0 } else { 0.0 },
            ]);
        }
        t
    }
}

pub fn pair_splitting(
    p_base: &SystemParams,
    lambda_grid: &[f64],
    pair_index: usize,
    opts: TruncationOptions,
) -> Result<PairSplitting> {
    p_base.validate()?;
    check_grid(lambda_grid)?;
    let levels = 2 * pair_index + 2;
    let vals: Vec<f64> = lambda_grid
        .par_iter()
        .map(|&l| {
            let p = p_base.with_lambda(l * p_base.omega0);
            let trunc = choose_truncation(&p, levels, opts).map_err(|e| e.at_lambda(l))?;
            let e = lowest_energies(&p, trunc.n_max, levels).map_err(|e| e.at_lambda(l))?;
            Ok((e[levels - 1] - e[levels - 2]) / p.omega0)
        })
        .collect::<Result<_>>()?;
    let below_floor: Vec<bool> = vals.iter().map(|v| *v < SPLITTING_FLOOR).collect();
    let splitting = vals.iter().zip(&below_floor).map(|(v, f)| if *f { 0.0 } else { *v }).collect();
    Ok(PairSplitting {
        pair_index,
        lambda_grid: lambda_grid.to_vec(),
        splitting,
        below_floor,
        theta: p_base.theta(),
        omega_over_eq: p_base.omega0 / p_base.e_q(),
    })
}
