use proptest::prelude::*;
use uscsim::approx::displaced_number_overlap;
use uscsim::decoherence::{rates_between, ChannelOperator};
use uscsim::dynamics::{cat_projection, evolve, fidelity, StateRef, SweepShape};
use uscsim::hilbert::{build_hamiltonian, choose_truncation, parity_operator};
use uscsim::linalg::{commutator, max_abs_entry};
use uscsim::nonclassical::{q_function, reduce, squeezing, PhaseGrid, Subsystem};
use uscsim::spectrum::lowest_energies;
use uscsim::{FockTruncation, NoiseChannel, PureState, SweepSchedule, SystemParams, TruncationOptions, C64};

fn params() -> impl Strategy<Value = SystemParams> {
    (0.1..5.0f64, -2.0..2.0f64, 0.0..3.0f64).prop_map(|(d, e, l)| SystemParams::new(d, e, l))
}

fn state(n_max: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * (n_max + 1))
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| PureState::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian(p in params(), n in 8usize..40) {
        let h = build_hamiltonian(&p, &FockTruncation::new(n).unwrap()).unwrap();
        prop_assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn parity_commutes_without_bias(p in params(), n in 8usize..40) {
        let p = p.with_eps(0.0);
        let h = build_hamiltonian(&p, &FockTruncation::new(n).unwrap()).unwrap();
        let pi = parity_operator(n);
        prop_assert!(max_abs_entry(&commutator(&h.entries, &pi.entries)) < 1e-10);
    }

    #[test]
    fn truncation_monotone_in_coupling(p in params(), dl in 0.0..2.0f64, levels in 1usize..12) {
        let lo = choose_truncation(&p, levels, TruncationOptions::default()).unwrap();
        let hi = choose_truncation(&p.with_lambda(p.lambda + dl), levels, TruncationOptions::default()).unwrap();
        prop_assert!(hi.n_max >= lo.n_max);
    }

    #[test]
    fn energies_scale_with_units(p in params(), f in 0.1..10.0f64) {
        let a = lowest_energies(&p, 48, 4).unwrap();
        let b = lowest_energies(&p.rescaled(f), 48, 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((f * x - y).abs() < 1e-9 * f.max(1.0) * (1.0 + x.abs()));
        }
    }

    #[test]
    fn overlap_matrix_is_orthogonal(d in 0.0..2.0f64) {
        let n = 128;
        let o: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| displaced_number_overlap(i, j, d)).collect()).collect();
        for i in 0..n / 2 {
            for j in 0..n / 2 {
                let s: f64 = (0..n).map(|k| o[k][i] * o[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s - want).abs() < 1e-6, "({i},{j}) {s}");
            }
        }
    }

    #[test]
    fn reduced_states_are_valid(psi in state(10)) {
        let osc = reduce(&psi, Subsystem::Oscillator).unwrap();
        let qb = reduce(&psi, Subsystem::Qubit).unwrap();
        prop_assert!(osc.check_invariants().is_ok());
        prop_assert!(qb.check_invariants().is_ok());
        prop_assert!((osc.purity() - qb.purity()).abs() < 1e-10);
        let s = squeezing(&osc).unwrap();
        prop_assert!(s.k_product >= 0.25 * (1.0 - 1e-9));
    }

    #[test]
    fn q_function_is_nonnegative(psi in state(8)) {
        let osc = reduce(&psi, Subsystem::Oscillator).unwrap();
        let q = q_function(&osc, &PhaseGrid::square(2.0, 9)).unwrap();
        prop_assert!(q.min() >= -1e-12);
    }

    #[test]
    fn projection_probabilities_sum_to_one(psi in state(10), phi in 0.0..6.3f64) {
        let outs = cat_projection(&psi, phi).unwrap();
        let total: f64 = outs.iter().flatten().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric(a in state(6), b in state(6)) {
        let ab = fidelity(StateRef::Pure(&a), StateRef::Pure(&b)).unwrap();
        let ba = fidelity(StateRef::Pure(&b), StateRef::Pure(&a)).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn rates_ignore_global_phase(a in state(8), b in state(8), phase in 0.0..6.3f64) {
        let ch = NoiseChannel::white(ChannelOperator::OscillatorX, 0.3);
        let r0 = rates_between(&a, 1.0, &b, 0.0, &ch).unwrap();
        let rot = PureState::new(b.amplitudes.iter().map(|c| c * C64::from_polar(1.0, phase)).collect()).unwrap();
        let r1 = rates_between(&a, 1.0, &rot, 0.0, &ch).unwrap();
        prop_assert!(r0.relaxation >= 0.0 && r0.dephasing >= 0.0);
        prop_assert!((r0.relaxation - r1.relaxation).abs() < 1e-12 * (1.0 + r0.relaxation));
        prop_assert!((r0.dephasing - r1.dephasing).abs() < 1e-12 * (1.0 + r0.dephasing));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_preserves_norm(
        psi in state(12),
        lambda in 0.0..1.0f64,
        e0 in -1.0..1.0f64,
        e1 in -1.0..1.0f64,
        t in 0.0..3.0f64,
    ) {
        let p = SystemParams::new(1.0, 0.0, lambda);
        let sched = SweepSchedule { eps_start: e0, eps_end: e1, duration: t, shape: SweepShape::Linear, steps: 8 };
        let out = evolve(&psi, &p, &sched).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-9);
    }
}
