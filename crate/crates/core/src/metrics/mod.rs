//! The distance hierarchy on pure states.
//!
//! All ray distances are functions of the overlap `r = |⟨a|b⟩|` and are
//! evaluated through the phase-aligned chord `c = sqrt(2(1 − r))`:
//!
//! | distance | closed form | evaluated as |
//! |---|---|---|
//! | Fubini–Study | `arccos r` | `2 asin(c/2)` |
//! | Bures | `sqrt(2(1 − r))` | `c` |
//! | trace (pure) | `sqrt(1 − r²)` | `c sqrt(1 − c²/4)` |
//! | fidelity | `r²` | `(1 − c²/2)²` |
//!
//! The two columns agree exactly in real arithmetic; the right-hand one keeps
//! full relative precision for nearby states.

mod candidate;
mod povm;
mod profile;

pub use candidate::{DistanceCandidate, Domain, MeasurementContext};
pub use povm::TOL_POVM;
pub use povm::Povm;
pub use profile::{distance_from_profile, profile_additivity_defect, OverlapProfile};

use crate::error::{Error, Result};
use crate::hilbert::{chord, entanglement_entropy, overlap, BipartiteState, EntropyBase, StateVector};

/// Fubini–Study distance `arccos |⟨a|b⟩|`, in `[0, π/2]`.
pub fn d_fs(a: &StateVector, b: &StateVector) -> Result<f64> {
    let c = chord(a, b)?;
    Ok(2.0 * (0.5 * c).min(1.0).asin())
}

/// Bures distance `sqrt(2(1 − r))`, in `[0, √2]`.
pub fn d_bures(a: &StateVector, b: &StateVector) -> Result<f64> {
    chord(a, b)
}

/// Trace distance of the projectors, `sqrt(1 − r²) = sin d_fs`.
pub fn d_trace_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let c = chord(a, b)?;
    Ok(c * (1.0 - 0.25 * c * c).max(0.0).sqrt())
}

/// Transition probability `r²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let r = overlap(a, b)?;
    Ok(r * r)
}

/// Euclidean distance between the amplitude vectors. Depends on the gauge of
/// each argument, so it is not a function on rays.
pub fn d_hilbert(a: &StateVector, b: &StateVector) -> Result<f64> {
    crate::hilbert::inner_product(a, b)?;
    Ok((b.amplitudes() - a.amplitudes()).norm())
}

fn check_factorization(a: &BipartiteState, b: &BipartiteState) -> Result<()> {
    if a.factorization() != b.factorization() {
        return Err(Error::FactorizationMismatch {
            dim_a: b.dim_a(),
            dim_b: b.dim_b(),
            expected_a: a.dim_a(),
            expected_b: a.dim_b(),
        });
    }
    Ok(())
}

/// Entanglement-aware distance `sqrt(d_fs² + |E(a) − E(b)|²)`.
pub fn d_entanglement_aware(a: &BipartiteState, b: &BipartiteState, base: EntropyBase) -> Result<f64> {
    check_factorization(a, b)?;
    let fs = d_fs(a.state(), b.state())?;
    let de = entanglement_entropy(a, base)? - entanglement_entropy(b, base)?;
    Ok(fs.hypot(de))
}

/// `d_fs² + (|E(a) − E(b)| / log d)²` with `d = min(dim_a, dim_b)`.
/// The entropy normalization makes the value independent of the log base.
pub fn complementarity(a: &BipartiteState, b: &BipartiteState) -> Result<f64> {
    check_factorization(a, b)?;
    let d = a.dim_a().min(a.dim_b());
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "complementarity needs both factors >= 2, got {}x{}",
            a.dim_a(),
            a.dim_b()
        )));
    }
    let fs = d_fs(a.state(), b.state())?;
    let de = (entanglement_entropy(a, EntropyBase::Natural)?
        - entanglement_entropy(b, EntropyBase::Natural)?)
        / (d as f64).ln();
    Ok(fs * fs + de * de)
}

/// `‖p − q‖₂` for the outcome distributions of `m` on `a` and `b`.
pub fn measurement_distance_l2(m: &Povm, a: &StateVector, b: &StateVector) -> Result<f64> {
    let (p, q) = (m.probabilities(a)?, m.probabilities(b)?);
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// `Σ_m |p_m − q_m|` for the outcome distributions of `m` on `a` and `b`.
pub fn measurement_distance_l1(m: &Povm, a: &StateVector, b: &StateVector) -> Result<f64> {
    let (p, q) = (m.probabilities(a)?, m.probabilities(b)?);
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{haar_state, C64};
    use crate::rng::SeededRng;
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};

    fn ket(i: usize) -> StateVector {
        StateVector::basis(2, i).unwrap()
    }

    fn rotated(theta: f64) -> StateVector {
        StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap()
    }

    fn bell(sign: f64) -> BipartiteState {
        let c = [C64::new(1.0, 0.0), C64::new(sign, 0.0)];
        BipartiteState::schmidt_diagonal(2, 2, &c).unwrap()
    }

    fn product01() -> BipartiteState {
        BipartiteState::new(StateVector::basis(4, 1).unwrap(), 2, 2).unwrap()
    }

    #[test]
    fn fubini_study_examples() {
        let rng = &mut SeededRng::new(30);
        let psi = haar_state(3, rng).unwrap();
        assert_eq!(d_fs(&psi, &psi.with_phase(1.1)).unwrap(), 0.0);
        assert!((d_fs(&ket(0), &ket(1)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((d_fs(&ket(0), &rotated(PI / 6.0)).unwrap() - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn bures_examples() {
        assert_eq!(d_bures(&ket(0), &ket(0)).unwrap(), 0.0);
        assert!((d_bures(&ket(0), &ket(1)).unwrap() - SQRT_2).abs() < 1e-15);
        // r = 0.5: both closed forms give 1.
        let b = rotated(0.5f64.acos());
        let r = 0.5f64;
        assert!(((2.0 * (1.0 - r)).sqrt() - 1.0).abs() < 1e-15);
        assert!((2.0 * (r.acos() / 2.0).sin() - 1.0).abs() < 1e-15);
        assert!((d_bures(&ket(0), &b).unwrap() - 1.0).abs() < 1e-15);
    }

    /// Eigenvalues of a 2x2 Hermitian matrix in closed form.
    fn eig2(m: &DMatrix<C64>) -> [f64; 2] {
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - rad, mean + rad]
    }

    #[test]
    fn trace_distance_examples() {
        assert_eq!(d_trace_pure(&ket(1), &ket(1)).unwrap(), 0.0);
        assert!((d_trace_pure(&ket(0), &ket(1)).unwrap() - 1.0).abs() < 1e-15);
        let (a, b) = (ket(0), rotated(PI / 6.0));
        let diff = a.projector() - b.projector();
        let oracle = 0.5 * eig2(&diff).iter().map(|l| l.abs()).sum::<f64>();
        assert!((oracle - 0.5).abs() < 1e-15);
        assert!((d_trace_pure(&a, &b).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(fidelity(&ket(0), &ket(0)).unwrap(), 1.0);
        assert!(fidelity(&ket(0), &ket(1)).unwrap() < 1e-30);
        let z = crate::hilbert::inner_product(&ket(0), &rotated(PI / 6.0)).unwrap();
        let oracle = z.norm_sqr();
        assert!((fidelity(&ket(0), &rotated(PI / 6.0)).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.75).abs() < 1e-15);
    }

    #[test]
    fn hilbert_examples() {
        let rng = &mut SeededRng::new(31);
        let psi = haar_state(4, rng).unwrap();
        assert_eq!(d_hilbert(&psi, &psi).unwrap(), 0.0);
        assert!((d_hilbert(&psi.with_phase(PI), &psi).unwrap() - 2.0).abs() < 1e-15);
        assert!((d_hilbert(&ket(0), &ket(1)).unwrap() - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn entanglement_aware_examples() {
        let base = EntropyBase::Natural;
        assert_eq!(d_entanglement_aware(&bell(1.0), &bell(1.0), base).unwrap(), 0.0);
        let d = d_entanglement_aware(&bell(1.0), &bell(-1.0), base).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-12);
        let d = d_entanglement_aware(&bell(1.0), &product01(), base).unwrap();
        let oracle = (FRAC_PI_2 * FRAC_PI_2 + LN_2 * LN_2).sqrt();
        assert!((d - oracle).abs() < 1e-12);
    }

    #[test]
    fn entanglement_aware_rejects_mismatched_factorizations() {
        let a = BipartiteState::new(StateVector::basis(6, 0).unwrap(), 2, 3).unwrap();
        let b = BipartiteState::new(StateVector::basis(6, 0).unwrap(), 3, 2).unwrap();
        assert!(matches!(
            d_entanglement_aware(&a, &b, EntropyBase::Natural),
            Err(Error::FactorizationMismatch { .. })
        ));
    }

    #[test]
    fn complementarity_is_base_free() {
        let v = complementarity(&product01(), &bell(1.0)).unwrap();
        assert!((v - (FRAC_PI_2 * FRAC_PI_2 + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn measurement_examples() {
        let m = Povm::computational_basis(2);
        let rng = &mut SeededRng::new(32);
        let psi = haar_state(2, rng).unwrap();
        assert_eq!(measurement_distance_l2(&m, &psi, &psi).unwrap(), 0.0);
        assert_eq!(measurement_distance_l1(&m, &psi, &psi).unwrap(), 0.0);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let minus = StateVector::from_real(&[1.0, -1.0]).unwrap();
        assert!(measurement_distance_l2(&m, &plus, &minus).unwrap() < 1e-15);
        assert!(d_fs(&plus, &minus).unwrap() > 1.5);
        assert!((measurement_distance_l2(&m, &ket(0), &ket(1)).unwrap() - SQRT_2).abs() < 1e-15);
        assert!((measurement_distance_l1(&m, &ket(0), &ket(1)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_dimension_mismatch() {
        let m = Povm::computational_basis(3);
        assert!(measurement_distance_l2(&m, &ket(0), &ket(1)).is_err());
        let v = StateVector::normalized(DVector::from_element(3, C64::new(1.0, 0.0))).unwrap();
        assert!(measurement_distance_l1(&m, &v, &v).is_ok());
    }
}
