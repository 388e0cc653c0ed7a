use uscsim::approx::{
    displaced_number_overlap, kinetic_correction_ratio, potential_minima, rwa_effective_hamiltonian,
    semiclassical_stationary_points, wkb_splitting, Branch, Stability,
};
use uscsim::hilbert::choose_truncation;
use uscsim::spectrum::lowest_energies;
use uscsim::{SystemParams, TruncationOptions};

#[test]
fn weak_coupling_splitting_matches_rwa() {
    let p = SystemParams::new(1.0, 0.0, 0.02);
    let e = lowest_energies(&p, 32, 3).unwrap();
    let rwa = rwa_effective_hamiltonian(&p, 1).unwrap().splitting();
    assert!((rwa - 0.04).abs() < 1e-12);
    assert!(((e[2] - e[1]) / rwa - 1.0).abs() < 0.05, "{}", e[2] - e[1]);
}

#[test]
fn overlap_examples() {
    assert!((displaced_number_overlap(0, 0, 1.0) - 0.606531).abs() < 1e-6);
    assert!(displaced_number_overlap(1, 1, 1.0).abs() < 1e-14);
}

#[test]
fn wkb_within_factor_three_of_exact() {
    // ħω0/Δ = 0.01; 2g²/(mω0²Δ) = 4λ²/Δ is kept where the splitting is above
    // double-precision roundoff on the level energies.
    for kap in [1.2, 1.3, 1.4, 1.5] {
        let p = SystemParams::new(100.0, 0.0, (25.0f64 * kap).sqrt());
        let t = choose_truncation(&p, 2, TruncationOptions::default()).unwrap();
        let e = lowest_energies(&p, t.n_max, 2).unwrap();
        let exact = e[1] - e[0];
        let wkb = wkb_splitting(&p).unwrap();
        let r = wkb / exact;
        assert!((1.0 / 3.0..=3.0).contains(&r), "kappa {kap}: wkb {wkb:e} exact {exact:e}");
    }
}

#[test]
fn semiclassical_roots_at_kappa_two() {
    let p = SystemParams::new(1.0, 0.0, 0.5f64.sqrt());
    let pts = semiclassical_stationary_points(&p);
    let stable: Vec<_> = pts.iter().filter(|s| s.ground_candidate && s.stability == Stability::Stable).collect();
    assert_eq!(stable.len(), 2);
    for s in &stable {
        assert!((s.sigma_z.abs() - 3f64.sqrt() / 2.0).abs() < 1e-10);
        assert!((s.sigma_x.powi(2) + s.sigma_z.powi(2) - 1.0).abs() < 1e-10);
        assert!((s.x + p.g() * s.sigma_z).abs() < 1e-10);
    }
    assert!(pts.iter().any(|s| s.sigma_z.abs() < 1e-12 && s.stability == Stability::Unstable));
    let minima = potential_minima(&p, Branch::Ground);
    for s in &stable {
        assert!(minima.iter().any(|m| (m.0 - s.x).abs() < 1e-8), "{} vs {minima:?}", s.x);
    }
}

#[test]
fn kinetic_ratio_examples() {
    let k = kinetic_correction_ratio(&SystemParams::from_omega_over_delta(0.01, 0.0, 3.0));
    assert!((k.ratio - 0.01).abs() < 1e-15);
    assert!((k.kinetic / k.potential - k.ratio).abs() < 1e-15);
    assert_eq!(kinetic_correction_ratio(&SystemParams::new(1.0, 0.0, 1.0)).ratio, 1.0);
}

#[test]
fn semiclassical_energy_bounds_exact_ground() {
    // minus-branch energy sits above E_0 − ħω0/2 and the gap shrinks as ħω0/E_q → 0
    let mut prev = f64::INFINITY;
    for r in [1.0, 0.3, 0.1, 0.03] {
        let p = SystemParams::from_omega_over_delta(r, 0.0, 0.0);
        let p = p.with_lambda(0.75 * p.delta.sqrt());
        let e0 = lowest_energies(&p, choose_truncation(&p, 1, TruncationOptions::default()).unwrap().n_max, 1).unwrap()[0];
        let sc = semiclassical_stationary_points(&p)
            .into_iter()
            .filter(|s| s.ground_candidate && s.stability == Stability::Stable)
            .map(|s| s.energy)
            .fold(f64::INFINITY, f64::min);
        assert!(sc >= e0 - 0.5 - 1e-9, "r = {r}: {sc} vs {e0}");
        let rel = (sc - e0).abs() / p.e_q();
        assert!(rel <= prev, "r = {r}: {rel} after {prev}");
        prev = rel;
    }
}
