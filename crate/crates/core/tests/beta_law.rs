//! Distribution checks for Haar sampling against closed-form laws.

use qmetric::experiments::{beta_mean_overlap, beta_tail};
use qmetric::hilbert::{haar_state, haar_unitary, overlap};
use qmetric::{SeededRng, StateVector};
use statrs::distribution::{Beta, ContinuousCDF};

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
fn ks(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn squared_overlap_with_basis_state_is_beta() {
    for (k, d) in [2usize, 3, 8, 64].into_iter().enumerate() {
        let mut rng = SeededRng::new(2024).child(k as u64);
        let zero = StateVector::basis(d, 0).unwrap();
        let r2: Vec<f64> = (0..100_000)
            .map(|_| overlap(&haar_state(d, &mut rng).unwrap(), &zero).unwrap().powi(2))
            .collect();
        let law = Beta::new(1.0, d as f64 - 1.0).unwrap();
        let stat = ks(r2, |x| law.cdf(x));
        assert!(stat < 0.01, "d={d}: KS = {stat}");
    }
}

#[test]
fn haar_unitary_columns_follow_the_same_law() {
    let d = 4;
    let mut rng = SeededRng::new(5);
    let zero = StateVector::basis(d, 0).unwrap();
    let r2: Vec<f64> = (0..20_000)
        .map(|_| {
            let u = haar_unitary(d, &mut rng).unwrap();
            overlap(&zero.apply(&u).unwrap(), &zero).unwrap().powi(2)
        })
        .collect();
    let law = Beta::new(1.0, d as f64 - 1.0).unwrap();
    let stat = ks(r2, |x| law.cdf(x));
    // Critical value at α = 0.001 for n = 2·10⁴.
    assert!(stat < 1.95 / (20_000f64).sqrt(), "KS = {stat}");
}

#[test]
fn mean_overlap_and_tail_match_beta_integrals() {
    for d in [2usize, 5, 40, 1000] {
        // E[r] = ∫ P(r > t) dt = ∫ (1 − t²)^{d−1} dt, by Simpson's rule.
        let n = 20_000;
        let h = 1.0 / n as f64;
        let f = |t: f64| (1.0 - t * t).powi(d as i32 - 1);
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = s * h / 3.0;
        assert!((beta_mean_overlap(d) - integral).abs() < 1e-9, "d={d}");

        let law = Beta::new(1.0, d as f64 - 1.0).unwrap();
        for eps in [0.05f64, 0.1, 0.2] {
            let want = 1.0 - law.cdf(eps.sin().powi(2));
            assert!((beta_tail(d, eps) - want).abs() < 1e-12, "d={d}, eps={eps}");
        }
    }
}
