use std::path::Path;

use serde_json::{json, Value};
use uscsim::approx::{
    adiabatic_qubit_analysis, kappa, kinetic_correction_ratio, renormalized_gap, semiclassical_stationary_points,
    wkb_analysis, Stability,
};
use uscsim::decoherence::{rates, well_dephasing_element, worked_example, SpectralDensity};
use uscsim::dynamics::{evolve_trajectory, run_protocol, SweepRegime, SweepShape};
use uscsim::format::Table;
use uscsim::hilbert::choose_truncation;
use uscsim::nonclassical::{
    ground_state, ground_state_metrics, metrics_scan, metrics_table, onset_coupling, q_function, reduce,
    wigner_function, FieldKind, GroundStateMetrics, PhaseGrid, Subsystem,
};
use uscsim::presets::{all_presets, FigurePreset, PresetKind};
use uscsim::spectrum::{self, level_curves, lowest_energies, pair_splitting, EnergyUnit};
use uscsim::{Error, FockTruncation, NoiseChannel, SweepSchedule, SystemParams, TruncationOptions};

use crate::args::{
    Command, MetricArgs, OnsetArgs, PhaseArgs, RatesArgs, RenormArgs, ScanPointArgs, SplittingArgs, SpectrumArgs,
    SweepArgs,
};
use crate::output::{CliError, Output};

pub fn run(cmd: &Command, opts: TruncationOptions) -> Result<Output, CliError> {
    let out = match cmd {
        Command::Spectrum(a) => spectrum(a, opts)?,
        Command::Splitting(a) => splitting(a, opts)?,
        Command::Qfunc(a) => phase_space(a, FieldKind::Q, opts)?,
        Command::Wigner(a) => phase_space(a, FieldKind::Wigner, opts)?,
        Command::Squeezing(a) | Command::Entropy(a) => metrics(a, opts)?,
        Command::Onset(a) => onset(a, opts)?,
        Command::Semiclassical(a) => semiclassical(&a.params.resolve()?),
        Command::AdiabaticQubit(a) => {
            let p = a.params.resolve()?;
            Output::report(serde_json::to_value(adiabatic_qubit_analysis(&p)?)?)
        }
        Command::RenormGap(a) => renorm_gap(a, opts)?,
        Command::Wkb(a) => wkb(a, opts)?,
        Command::Rates(a) => rates_report(a, opts)?,
        Command::Sweep(a) => sweep(a, opts)?,
        Command::AppendixA(a) => {
            let p = a.params.resolve()?;
            let mut v = serde_json::to_value(kinetic_correction_ratio(&p))?;
            v["omega0_over_Eq"] = json!(p.omega0 / p.e_q());
            Output::report(v)
        }
        Command::ListFigures => list_figures(),
    };
    Ok(out)
}

fn with_params(t: Table, p: &SystemParams) -> Table {
    t.meta("Delta", uscsim::format::fmt_num(p.delta))
        .meta("eps", uscsim::format::fmt_num(p.eps))
        .meta("hbar_omega0", uscsim::format::fmt_num(p.omega0))
}

fn grid_or_point(scan: &crate::args::ScanArgs, p: &SystemParams) -> Result<Vec<f64>, Error> {
    Ok(scan.grid()?.unwrap_or_else(|| vec![p.lambda_ratio()]))
}

fn spectrum(a: &SpectrumArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let grid = grid_or_point(&a.scan, &p)?;
    let t = level_curves(&p, &grid, a.levels, a.unit.into(), opts)?.to_table();
    Ok(Output::table(with_params(t, &p)))
}

fn splitting(a: &SplittingArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let grid = grid_or_point(&a.scan, &p)?;
    let t = pair_splitting(&p, &grid, a.pair, opts)?.to_table(a.unit.into(), &p);
    Ok(Output::table(with_params(t, &p)))
}

fn phase_space(a: &PhaseArgs, kind: FieldKind, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let half = a.half_width.unwrap_or(6.0 + 2.0 * p.lambda_ratio());
    if !(half > 0.0) || a.points < 2 {
        return Err(Error::InvalidParameter("need --half-width > 0 and --points >= 2".into()).into());
    }
    let t = field_table(&p, kind, &PhaseGrid::square(half, a.points), opts)?;
    Ok(Output::table(with_params(t, &p)))
}

fn field_table(p: &SystemParams, kind: FieldKind, grid: &PhaseGrid, opts: TruncationOptions) -> Result<Table, Error> {
    let trunc = choose_truncation(p, 1, opts)?;
    let rho = reduce(&ground_state(p, &trunc)?, Subsystem::Oscillator)?;
    let field = match kind {
        FieldKind::Q => q_function(&rho, grid)?,
        FieldKind::Wigner => wigner_function(&rho, grid)?,
    };
    Ok(field
        .to_table()
        .meta("lambda", uscsim::format::fmt_num(p.lambda_ratio()))
        .meta("integral", uscsim::format::fmt_num(field.integral()))
        .meta("min", uscsim::format::fmt_num(field.min()))
        .meta("n_max", trunc.n_max))
}

fn metrics_report(m: &GroundStateMetrics, gap: f64) -> Value {
    json!({
        "lambda": m.lambda,
        "S": m.entropy,
        "s_x": m.squeezing.s_x,
        "s_p": m.squeezing.s_p,
        "K": m.squeezing.k_product,
        "mean_x": m.squeezing.mean_x,
        "mean_p": m.squeezing.mean_p,
        "gap_E2_minus_E1": gap,
        "n_max": m.n_max,
    })
}

fn metrics(a: &MetricArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    match a.scan.grid()? {
        Some(grid) => {
            let rows = metrics_scan(&p, &grid, opts)?;
            Ok(Output::table(with_params(metrics_table(&rows), &p)))
        }
        None => {
            let m = ground_state_metrics(&p, opts)?;
            let e = lowest_energies(&p, m.n_max, 2)?;
            let gap = (e[1] - e[0]) / p.omega0;
            let table = with_params(metrics_table(std::slice::from_ref(&m)), &p);
            Ok(Output::report_with_table(metrics_report(&m, gap), table))
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn onset_table(bases: &[SystemParams], targets: &[f64], opts: TruncationOptions) -> Result<Table, Error> {
    let mut cols = vec!["omega0_over_delta".to_string()];
    cols.extend(targets.iter().map(|t| format!("lambda_over_delta_S{t}")));
    cols.push("half_sqrt_omega0_Eq_over_delta".into());
    let mut t = Table::new(cols).meta("eps_over_delta", uscsim::format::fmt_num(bases[0].eps / bases[0].delta));
    for p in bases {
        let mut row = vec![p.omega0 / p.delta];
        for &s in targets {
            row.push(onset_coupling(p, s, opts)?.lambda / p.delta);
        }
        row.push(0.5 * (p.omega0 * p.e_q()).sqrt() / p.delta);
        t.push(row);
    }
    Ok(t)
}

fn onset(a: &OnsetArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let bias = p.eps / p.delta;
    match (a.ratio_min, a.ratio_max) {
        (None, None) => {
            let mut items = Vec::new();
            for &s in &a.targets {
                let r = onset_coupling(&p, s, opts)?;
                items.push(json!({
                    "target": s,
                    "lambda_over_omega0": r.lambda_ratio,
                    "lambda_over_delta": r.lambda / p.delta,
                    "monotone": r.monotone,
                }));
            }
            Ok(Output::report(json!({
                "omega0_over_delta": p.omega0 / p.delta,
                "eps_over_delta": bias,
                "onsets": items,
                "half_sqrt_omega0_Eq_over_delta": 0.5 * (p.omega0 * p.e_q()).sqrt() / p.delta,
            })))
        }
        (Some(lo), Some(hi)) if lo > 0.0 && lo < hi && a.ratio_steps >= 2 => {
            let bases: Vec<_> = log_grid(lo, hi, a.ratio_steps)
                .into_iter()
                .map(|r| SystemParams::from_omega_over_delta(r, bias, 0.0))
                .collect();
            Ok(Output::table(onset_table(&bases, &a.targets, opts)?))
        }
        _ => Err(Error::InvalidParameter(
            "a ratio scan needs 0 < --ratio-min < --ratio-max and --ratio-steps >= 2".into(),
        )
        .into()),
    }
}

fn semiclassical(p: &SystemParams) -> Output {
    let pts = semiclassical_stationary_points(p);
    let mut t = with_params(Table::new(["sigma_z", "sigma_x", "x", "energy", "stable", "ground_branch"]), p)
        .meta("kappa", uscsim::format::fmt_num(kappa(p)));
    for s in &pts {
        t.push(vec![
            s.sigma_z,
            s.sigma_x,
            s.x,
            s.energy,
            (s.stability == Stability::Stable) as u8 as f64,
            s.ground_candidate as u8 as f64,
        ]);
    }
    Output::report_with_table(json!({ "kappa": kappa(p), "points": pts }), t)
}

fn renorm_gap(a: &RenormArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let grid = grid_or_point(&a.scan, &p)?;
    let exact = pair_splitting(&p, &grid, a.pair, opts)?;
    let mut t = with_params(Table::new(["lambda", "renormalized_gap", "abs_renormalized_gap", "exact_splitting"]), &p)
        .meta("pair_index", a.pair)
        .meta("units", EnergyUnit::Oscillator.label());
    for (i, &l) in grid.iter().enumerate() {
        let g = renormalized_gap(&p.with_lambda(l * p.omega0), a.pair) / p.omega0;
        t.push(vec![l, g, g.abs(), exact.splitting[i]]);
    }
    Ok(Output::table(t))
}

fn exact_gap(p: &SystemParams, opts: TruncationOptions) -> Result<f64, Error> {
    let trunc = choose_truncation(p, 2, opts)?;
    let e = lowest_energies(p, trunc.n_max, 2)?;
    Ok(e[1] - e[0])
}

fn wkb(a: &ScanPointArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    match a.scan.grid()? {
        None => {
            let r = wkb_analysis(&p)?;
            let mut v = serde_json::to_value(r)?;
            v["exact_splitting"] = json!(exact_gap(&p, opts)?);
            Ok(Output::report(v))
        }
        Some(grid) => {
            let mut t = with_params(Table::new(["lambda", "wkb_splitting", "exponent", "exact_splitting"]), &p);
            for l in grid {
                let q = p.with_lambda(l * p.omega0);
                let r = wkb_analysis(&q)?;
                t.push(vec![l, r.splitting, r.exponent, exact_gap(&q, opts)?]);
            }
            Ok(Output::table(t))
        }
    }
}

fn read_spectral_table(path: &Path) -> Result<SpectralDensity, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let t = Table::parse_csv(&text)?;
    match (t.column("omega"), t.column("S")) {
        (Some(omega), Some(values)) => Ok(SpectralDensity::Tabulated { omega, values }),
        _ => Err(Error::InvalidParameter(format!("{} needs columns omega,S", path.display())).into()),
    }
}

fn rates_report(a: &RatesArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    if a.worked_example {
        return Ok(Output::report(serde_json::to_value(worked_example()?)?));
    }
    let p = a.params.resolve()?;
    let density = match &a.spectral_table {
        Some(path) => read_spectral_table(path)?,
        None => SpectralDensity::Constant(a.s0),
    };
    let label = serde_json::to_value(a.channel)?.as_str().unwrap_or_default().to_string();
    let ch = NoiseChannel { operator: a.channel.into(), spectral_density: density, label: label.clone() };
    let k = a.i.max(a.j).max(1) + 1;
    let eigs = spectrum::solve_auto(&p, k, opts)?;
    let r = rates(&eigs, &ch, a.i, a.j)?;
    let mut v = json!({
        "channel": label,
        "i": a.i,
        "j": a.j,
        "E_i": eigs.energies[a.i],
        "E_j": eigs.energies[a.j],
        "relaxation": r.relaxation,
        "dephasing": r.dephasing,
        "element_sq": r.matrix_element_sq,
        "diag_difference_sq": r.diag_difference_sq,
        "S_at_gap": r.s_at_gap,
        "S0": r.s0,
    });
    if a.localized {
        v["well"] = serde_json::to_value(well_dephasing_element(&p, &eigs)?)?;
    }
    Ok(Output::report(v))
}

fn sweep(a: &SweepArgs, opts: TruncationOptions) -> Result<Output, CliError> {
    let p = a.params.resolve()?;
    let regime: SweepRegime = a.regime.into();
    let duration = match a.duration {
        Some(d) => d,
        None => regime.duration(&p, a.eps_start, a.eps_end)?,
    };
    let shape: SweepShape = a.shape.into();
    let schedule = SweepSchedule { eps_start: a.eps_start, eps_end: a.eps_end, duration, shape, steps: 16 };
    let res = run_protocol(&p, &schedule, regime, opts)?;

    // same starting state as the protocol
    let start = p.with_eps(a.eps_start);
    let n_max = choose_truncation(&start, 2, opts)?.n_max.max(choose_truncation(&p.with_eps(a.eps_end), 2, opts)?.n_max);
    let psi0 = spectrum::solve(&start, &FockTruncation::new(n_max)?, 1)?.states.swap_remove(0);
    let (_, traj) = evolve_trajectory(&psi0, &p, &schedule, a.samples)?;

    let report = json!({
        "regime": regime,
        "duration": duration,
        "steps": res.steps,
        "n_max": n_max,
        "fidelity_to_instantaneous_ground": res.fidelity_to_instantaneous_ground,
        "qubit_purity": res.qubit_purity,
        "oscillator_state_class": res.oscillator_state_class.label(),
        "classification_scores": res.classification_scores,
        "cat_fit": res.cat_fit,
        "note": res.note,
    });
    let mut t = with_params(Table::new(["t", "eps", "ground_fidelity", "qubit_purity", "mean_X"]), &p)
        .meta("report", serde_json::to_string(&crate::output::rounded(report.clone()))?);
    for q in &traj {
        t.push(vec![q.t, q.eps, q.ground_fidelity, q.qubit_purity, q.mean_x]);
    }
    let full = json!({ "report": report, "trajectory": traj });
    Ok(Output { table: Some(t), report: Some(full), text: None, prefer_table: true })
}

fn list_figures() -> Output {
    let all = all_presets();
    let mut text = format!("{:<6} {:<10} {}\n", "id", "command", "parameters");
    for f in &all {
        text.push_str(&format!("{:<6} {:<10} {}\n", f.id, f.subcommand(), f.summary()));
    }
    let v: Vec<Value> = all
        .iter()
        .map(|f| json!({ "id": f.id, "command": f.subcommand(), "parameters": f.summary(), "preset": f }))
        .collect();
    Output { table: None, report: Some(Value::Array(v)), text: Some(text), prefer_table: true }
}

/// Runs a figure preset. The command must be the preset's own subcommand.
pub fn run_figure(cmd: &Command, fig: &FigurePreset, opts: TruncationOptions) -> Result<Output, CliError> {
    if cmd.name() != fig.subcommand() {
        return Err(Error::InvalidParameter(format!(
            "figure {} is produced by `{}`, not `{}`",
            fig.id,
            fig.subcommand(),
            cmd.name()
        ))
        .into());
    }
    let grid = fig.lambda_grid();
    let bases = fig.base_params();
    let t = match &fig.kind {
        PresetKind::Levels { levels, .. } => {
            level_curves(&bases[0], &grid, *levels, EnergyUnit::Oscillator, opts)?.to_table()
        }
        PresetKind::PairSplitting { thetas, pairs, unit, .. } => {
            let mut cols = vec!["lambda".to_string()];
            let mut curves = Vec::new();
            let mut t0 = Table::default();
            for (j, p) in bases.iter().enumerate() {
                t0 = t0.meta(format!("theta{j}"), uscsim::format::fmt_num(thetas[j]));
                for &n in pairs {
                    let s = pair_splitting(p, &grid, n, opts)?;
                    let scale = p.omega0 / unit.scale(p);
                    cols.push(if thetas.len() > 1 { format!("dE_n{n}_theta{j}") } else { format!("dE_n{n}") });
                    curves.push(s.splitting.iter().map(|v| v * scale).collect::<Vec<_>>());
                }
            }
            let mut t = Table::new(cols).meta("units", unit.label());
            t.meta.extend(t0.meta);
            for (i, &l) in grid.iter().enumerate() {
                let mut row = vec![l];
                row.extend(curves.iter().map(|c| c[i]));
                t.push(row);
            }
            t
        }
        PresetKind::PhaseSpace { lambda, field } => {
            let p = bases[0].with_lambda(lambda * bases[0].omega0);
            field_table(&p, *field, &PhaseGrid::default_for(*lambda), opts)?
        }
        PresetKind::Squeezing { eps_over_delta } | PresetKind::Entropy { eps_over_delta } => {
            let mut t = Table::new(["eps_over_delta", "lambda", "s_x", "s_p", "K", "S"]);
            for (p, &e) in bases.iter().zip(eps_over_delta) {
                for m in metrics_scan(p, &grid, opts)? {
                    t.push(vec![e, m.lambda, m.squeezing.s_x, m.squeezing.s_p, m.squeezing.k_product, m.entropy]);
                }
            }
            t
        }
        PresetKind::Onset { targets, .. } => onset_table(&bases, targets, opts)?,
    };
    let t = match fig.ratio {
        Some(r) => t.meta("ratio", serde_json::to_string(&r)?),
        None => t,
    };
    Ok(Output::table(t.meta("figure", &fig.id)))
}
