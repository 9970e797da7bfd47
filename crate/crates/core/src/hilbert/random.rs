use nalgebra::{DMatrix, DVector};

use super::{StateVector, C64};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

fn complex_gaussian(rng: &mut SeededRng) -> C64 {
    let re = rng.gaussian();
    let im = rng.gaussian();
    C64::new(re, im)
}

/// Haar-random pure state: `2·dim` standard normals as real and imaginary
/// parts, then normalized.
pub fn haar_state(dim: usize, rng: &mut SeededRng) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension("haar_state needs dim >= 1".into()));
    }
    let amps = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    StateVector::normalized(amps)
}

/// Haar-random unitary from the QR factorization of a complex Ginibre matrix,
/// with the diagonal phases of `R` moved into `Q` so the law is exactly Haar.
pub fn haar_unitary(dim: usize, rng: &mut SeededRng) -> Result<DMatrix<C64>> {
    if dim == 0 {
        return Err(Error::InvalidDimension("haar_unitary needs dim >= 1".into()));
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// `max |(U†U − I)_{jk}|`.
pub fn is_unitary(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::super::{canonicalize, overlap};
    use super::*;

    #[test]
    fn dimension_one_state_is_trivial_ray() {
        let rng = &mut SeededRng::new(9);
        let psi = haar_state(1, rng).unwrap();
        let ray = canonicalize(&psi).unwrap();
        let a = ray.representative().amplitudes()[0];
        assert!((a.re - 1.0).abs() < 1e-15 && a.im == 0.0);
    }

    #[test]
    fn zero_dimension_rejected() {
        let rng = &mut SeededRng::new(9);
        assert!(haar_state(0, rng).is_err());
        assert!(haar_unitary(0, rng).is_err());
    }

    #[test]
    fn unitaries_are_unitary() {
        let rng = &mut SeededRng::new(10);
        let u = haar_unitary(1, rng).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        for dim in [2, 3, 7, 16, 33] {
            for _ in 0..20 {
                let u = haar_unitary(dim, rng).unwrap();
                assert!(is_unitary(&u) < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_is_unitarily_invariant() {
        let rng = &mut SeededRng::new(11);
        for k in 0..10_000 {
            let dim = 2 + k % 5;
            let u = haar_unitary(dim, rng).unwrap();
            let a = haar_state(dim, rng).unwrap();
            let b = haar_state(dim, rng).unwrap();
            let before = overlap(&a, &b).unwrap();
            let after = overlap(&a.apply(&u).unwrap(), &b.apply(&u).unwrap()).unwrap();
            assert!((before - after).abs() < 1e-12, "{before} vs {after}");
        }
    }

    #[test]
    fn haar_unitary_first_column_moduli_follow_beta_mean() {
        // The first column of a Haar unitary is a Haar state: E|U_00|^2 = 1/d.
        let rng = &mut SeededRng::new(12);
        let n = 20_000;
        let d = 3;
        let mean: f64 = (0..n)
            .map(|_| haar_unitary(d, rng).unwrap()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn haar_unitary_diagonal_phase_is_uniform() {
        // Without phase correction arg(U_00) is biased; with it, E[U_00] = 0.
        let rng = &mut SeededRng::new(13);
        let n = 20_000;
        let mut acc = C64::new(0.0, 0.0);
        for _ in 0..n {
            acc += haar_unitary(2, rng).unwrap()[(0, 0)];
        }
        assert!((acc / n as f64).norm() < 0.02);
    }
}
