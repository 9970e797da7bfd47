//! Property tests over random states, POVMs and candidates.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qmetric::harness::{replay, run_conformance, Axiom, ConformanceConfig, Status};
use qmetric::hilbert::{
    canonicalize, entanglement_entropy, entropy_of_subsystem, haar_state, haar_unitary, overlap, schmidt, EntropyBase,
};
use qmetric::metrics::{d_bures, d_fs, d_hilbert, d_trace_pure, fidelity, measurement_distance_l1, DistanceCandidate, Povm};
use qmetric::operational::{families, fs_from_popt, helstrom, qfi_finite_difference};
use qmetric::{BipartiteState, SeededRng, StateVector, Subsystem, C64};

fn pair(seed: u64, d: usize) -> (StateVector, StateVector) {
    let mut rng = SeededRng::new(seed);
    (haar_state(d, &mut rng).unwrap(), haar_state(d, &mut rng).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_ray_ignores_global_phase(seed in any::<u64>(), d in 1usize..9, theta in -PI..PI) {
        let psi = haar_state(d, &mut SeededRng::new(seed)).unwrap();
        let diff = canonicalize(&psi.with_phase(theta)).unwrap()
            .max_component_difference(&canonicalize(&psi).unwrap()).unwrap();
        prop_assert!(diff <= 1e-10, "{diff}");
    }

    #[test]
    fn overlap_is_unitarily_invariant(seed in any::<u64>(), d in 1usize..9) {
        let mut rng = SeededRng::new(seed);
        let (a, b) = (haar_state(d, &mut rng).unwrap(), haar_state(d, &mut rng).unwrap());
        let u = haar_unitary(d, &mut rng).unwrap();
        let moved = overlap(&a.apply(&u).unwrap(), &b.apply(&u).unwrap()).unwrap();
        prop_assert!((moved - overlap(&a, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn marginal_entropies_agree(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let s = haar_state(da * db, &mut SeededRng::new(seed)).unwrap();
        let s = BipartiteState::new(s, da, db).unwrap();
        let ea = entropy_of_subsystem(&s, Subsystem::A, EntropyBase::Natural).unwrap();
        let eb = entropy_of_subsystem(&s, Subsystem::B, EntropyBase::Natural).unwrap();
        prop_assert!((ea - eb).abs() <= 1e-10, "{ea} vs {eb}");
    }

    #[test]
    fn entropy_matches_schmidt_spectrum(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let s = haar_state(da * db, &mut SeededRng::new(seed)).unwrap();
        let s = BipartiteState::new(s, da, db).unwrap();
        let want: f64 = schmidt(&s).unwrap().lambdas().iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.ln())
            .sum();
        let got = entanglement_entropy(&s, EntropyBase::Natural).unwrap();
        prop_assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }

    #[test]
    fn radial_and_trace_identities(seed in any::<u64>(), d in 1usize..17) {
        let (a, b) = pair(seed, d);
        let fs = d_fs(&a, &b).unwrap();
        prop_assert!((d_bures(&a, &b).unwrap() - 2.0 * (fs / 2.0).sin()).abs() <= 1e-12);
        prop_assert!((d_trace_pure(&a, &b).unwrap() - fs.sin()).abs() <= 1e-12);
        prop_assert!((fidelity(&a, &b).unwrap() - fs.cos().powi(2)).abs() <= 1e-12);
        prop_assert!((0.0..=FRAC_PI_2).contains(&fs));
    }

    #[test]
    fn fs_and_bures_order_pairs_alike(s1 in any::<u64>(), s2 in any::<u64>(), d in 2usize..9) {
        let (a, b) = pair(s1, d);
        let (c, e) = pair(s2, d);
        let dfs = d_fs(&a, &b).unwrap() - d_fs(&c, &e).unwrap();
        let db = d_bures(&a, &b).unwrap() - d_bures(&c, &e).unwrap();
        if dfs.abs() > 1e-9 && db.abs() > 1e-9 {
            prop_assert_eq!(dfs.signum(), db.signum());
        }
    }

    #[test]
    fn amplitude_moduli_bound(seed in any::<u64>(), d in 1usize..9) {
        let (a, b) = pair(seed, d);
        let lhs: f64 = a.amplitudes().iter().zip(b.amplitudes().iter())
            .map(|(x, y)| (x.norm() - y.norm()).powi(2))
            .sum::<f64>()
            .sqrt();
        prop_assert!(lhs <= d_hilbert(&a, &b).unwrap() + 1e-9);
    }

    #[test]
    fn helstrom_povm_is_valid_and_inverts(seed in any::<u64>(), d in 1usize..9) {
        let (a, b) = pair(seed, d);
        let h = helstrom(&a, &b).unwrap();
        let mut sum = nalgebra::DMatrix::<C64>::zeros(d, d);
        for e in h.optimal_povm.effects() {
            let min = e.clone().symmetric_eigenvalues().min();
            prop_assert!(min >= -1e-10, "negative eigenvalue {min}");
            sum += e;
        }
        let dev = (sum - nalgebra::DMatrix::<C64>::identity(d, d)).norm();
        prop_assert!(dev <= 1e-10, "completeness defect {dev}");
        let back = fs_from_popt(h.p_success).unwrap();
        prop_assert!((back - d_fs(&a, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn bures_is_bounded_by_helstrom_l1(seed in any::<u64>(), d in 1usize..9) {
        let (a, b) = pair(seed, d);
        let l1 = measurement_distance_l1(&helstrom(&a, &b).unwrap().optimal_povm, &a, &b).unwrap();
        prop_assert!(d_bures(&a, &b).unwrap() <= 2f64.sqrt() * l1.sqrt() + 1e-9);
    }

    #[test]
    fn random_povm_never_beats_helstrom(seed in any::<u64>(), d in 2usize..6, k in 2usize..9) {
        let mut rng = SeededRng::new(seed);
        let (a, b) = (haar_state(d, &mut rng).unwrap(), haar_state(d, &mut rng).unwrap());
        let m = Povm::random(d, k, &mut rng).unwrap();
        let best = measurement_distance_l1(&helstrom(&a, &b).unwrap().optimal_povm, &a, &b).unwrap();
        prop_assert!(measurement_distance_l1(&m, &a, &b).unwrap() <= best + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn failing_verdicts_replay(seed in any::<u64>(), which in 0usize..5) {
        let candidate = match which {
            0 => DistanceCandidate::hilbert(),
            1 => DistanceCandidate::bures(),
            2 => DistanceCandidate::measurement_l2("basis", Povm::computational_basis(3)),
            3 => DistanceCandidate::entropy_difference(2, 2, EntropyBase::Natural),
            _ => DistanceCandidate::constant_zero(),
        };
        let config = ConformanceConfig { trials: 60, seed, ..ConformanceConfig::default() };
        let report = run_conformance(&candidate, &config).unwrap();
        let mut failures = 0;
        for v in report.verdicts.iter().filter(|v| v.status == Status::Fail) {
            failures += 1;
            let cx = v.counterexample.as_ref().expect("Fail carries a counterexample");
            let replayed = replay(&candidate, cx).unwrap();
            prop_assert!(replayed > 1e-9, "{:?} replays to {replayed}", v.axiom);
            prop_assert!((replayed - v.max_violation).abs() <= 1e-9 * (1.0 + v.max_violation));
        }
        prop_assert!(failures > 0);
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let config = ConformanceConfig { trials: 40, seed, ..ConformanceConfig::default() };
        let c = DistanceCandidate::entanglement_aware(2, 2, EntropyBase::Two);
        let a = serde_json::to_string(&run_conformance(&c, &config).unwrap()).unwrap();
        let b = serde_json::to_string(&run_conformance(&c, &config).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn fubini_study_satisfies_intrinsic_axioms_across_seeds() {
    for seed in 0..5 {
        let config = ConformanceConfig { trials: 200, seed, ..ConformanceConfig::default() };
        let report = run_conformance(&DistanceCandidate::fubini_study(), &config).unwrap();
        for a in &Axiom::ALL[..6] {
            assert!(report.passes(*a), "seed {seed}: {a:?}");
        }
    }
}

#[test]
fn qfi_error_shrinks_with_step() {
    for theta in [0.0, 0.4, 1.3] {
        let errors: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| {
                let q = qfi_finite_difference(&families::qubit_rotation, theta, h).unwrap();
                let e = (q.value - 1.0).abs();
                assert!(e <= h, "theta {theta}, step {h}: error {e}");
                e
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }
}
