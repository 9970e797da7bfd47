use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigen, StateVector, C64, TOL_EIG};
use crate::rng::SeededRng;

/// Tolerance on Hermiticity and completeness of POVM effects.
pub const TOL_POVM: f64 = 1e-10;

/// Positive operator-valued measure: PSD effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<DMatrix<C64>>,
}

impl Povm {
    pub fn new(effects: Vec<DMatrix<C64>>) -> Result<Self> {
        let dim = effects
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        if dim == 0 {
            return Err(Error::InvalidPovm("zero-dimensional effects".into()));
        }
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (m, e) in effects.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidPovm(format!(
                    "effect {m} is {}x{}, expected {dim}x{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            let herm = (e - e.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > TOL_POVM {
                return Err(Error::InvalidPovm(format!(
                    "effect {m} is not Hermitian (defect {herm:e})"
                )));
            }
            let (values, _) = hermitian_eigen(e);
            if values[0] < -TOL_EIG {
                return Err(Error::InvalidPovm(format!(
                    "effect {m} has negative eigenvalue {:e}",
                    values[0]
                )));
            }
            sum += e;
        }
        let defect = (sum - DMatrix::<C64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > TOL_POVM {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { dim, effects })
    }

    /// Projective measurement in the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|k| {
                let mut e = DMatrix::zeros(dim, dim);
                e[(k, k)] = C64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { dim, effects }
    }

    /// Random POVM with `count` effects `E_m = S^{-1/2} A_m S^{-1/2}`, where
    /// `A_m = G_m†G_m` for complex Gaussian `G_m` and `S = Σ A_m`.
    pub fn random(dim: usize, count: usize, rng: &mut SeededRng) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::InvalidPovm(format!(
                "random POVM needs dim >= 1 and count >= 1 (got {dim}, {count})"
            )));
        }
        let raw: Vec<DMatrix<C64>> = (0..count)
            .map(|_| {
                let g = DMatrix::from_fn(dim, dim, |_, _| {
                    let re = rng.gaussian();
                    let im = rng.gaussian();
                    C64::new(re, im)
                });
                g.adjoint() * g
            })
            .collect();
        let s = raw.iter().fold(DMatrix::zeros(dim, dim), |acc, a| acc + a);
        let (values, vectors) = hermitian_eigen(&s);
        let mut s_inv_sqrt = DMatrix::<C64>::zeros(dim, dim);
        for (l, v) in values.iter().zip(&vectors) {
            if *l <= 0.0 {
                return Err(Error::InvalidPovm("singular effect sum".into()));
            }
            s_inv_sqrt += v * v.adjoint() * C64::new(1.0 / l.sqrt(), 0.0);
        }
        let effects = raw
            .iter()
            .map(|a| {
                let e = &s_inv_sqrt * a * &s_inv_sqrt;
                (&e + e.adjoint()) * C64::new(0.5, 0.0)
            })
            .collect();
        Self::new(effects)
    }

    /// Two-outcome measurement `{I − P, P}` for the projector `P` onto
    /// orthonormal `vectors`. Both effects are projectors by construction, so
    /// the eigenvalue validation of [`Povm::new`] is skipped.
    pub fn binary_from_projector(dim: usize, vectors: &[DVector<C64>]) -> Result<Self> {
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::dim(dim, v.len()));
            }
            p += v * v.adjoint();
        }
        let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
        let rest = DMatrix::<C64>::identity(dim, dim) - &p;
        Ok(Self { dim, effects: vec![rest, p] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[DMatrix<C64>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome distribution `p_m = ⟨ψ|E_m|ψ⟩`.
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        if psi.dim() != self.dim {
            return Err(Error::dim(self.dim, psi.dim()));
        }
        Ok(self.effects.iter().map(|e| psi.expectation(e)).collect())
    }

    /// Largest `|[E_j, E_k]|` entry; zero when all effects commute.
    pub fn commutator_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, a) in self.effects.iter().enumerate() {
            for b in &self.effects[j + 1..] {
                let c = a * b - b * a;
                worst = worst.max(c.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// True when every effect is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.effects.iter().all(|e| {
            (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || e[(i, j)].norm() <= TOL_POVM))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::haar_state;

    #[test]
    fn random_povms_are_valid() {
        let rng = &mut SeededRng::new(40);
        for dim in [1, 2, 3, 6] {
            for count in [1, 2, 5] {
                let m = Povm::random(dim, count, rng).unwrap();
                assert_eq!(m.len(), count);
                let psi = haar_state(dim, rng).unwrap();
                let p = m.probabilities(&psi).unwrap();
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!(p.iter().all(|&x| x >= -1e-12));
            }
        }
    }

    #[test]
    fn rejects_incomplete_or_negative_effects() {
        let mut e = DMatrix::<C64>::zeros(2, 2);
        e[(0, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(Povm::new(vec![e.clone()]), Err(Error::InvalidPovm(_))));

        let mut neg = DMatrix::<C64>::identity(2, 2) * C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        let comp = DMatrix::<C64>::identity(2, 2) - &neg;
        assert!(matches!(Povm::new(vec![neg, comp]), Err(Error::InvalidPovm(_))));
        assert!(Povm::new(vec![]).is_err());
    }

    #[test]
    fn basis_povm_is_diagonal_and_commuting() {
        let m = Povm::computational_basis(3);
        assert!(m.is_diagonal());
        assert_eq!(m.commutator_defect(), 0.0);
        let rng = &mut SeededRng::new(41);
        let r = Povm::random(3, 3, rng).unwrap();
        assert!(!r.is_diagonal());
        assert!(r.commutator_defect() > 1e-6);
    }
}
