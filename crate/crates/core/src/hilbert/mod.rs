//! Complex Hilbert-space primitives.
//!
//! A [`StateVector`] is always stored with unit norm. Distances between rays are
//! computed from the phase-aligned chord `min_φ ‖b − e^{iφ}a‖`, which equals
//! `sqrt(2(1 − r))` for overlap `r` but does not lose precision as `r → 1`.

mod bipartite;
mod density;
mod random;

pub use bipartite::{
    entanglement_entropy, entropy_of_subsystem, partial_trace, schmidt, schmidt_entropy,
    tensor_product, BipartiteState,
    SchmidtDecomposition, Subsystem,
};
pub use density::{hermitian_eigen, DensityMatrix, EntropyBase};
pub use random::{haar_state, haar_unitary, is_unitary};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Normalization tolerance for state vectors and density matrices.
pub const TOL_NORM: f64 = 1e-12;

/// Eigenvalues at or below this floor are treated as zero.
pub const TOL_EIG: f64 = 1e-10;

/// Unit-norm amplitude vector. The physical object is the ray it spans.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within [`TOL_NORM`].
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        Self::with_tolerance(amps, TOL_NORM)
    }

    /// Like [`StateVector::new`] with a caller-chosen normalization tolerance.
    /// The stored amplitudes are rescaled to unit norm unless they are already
    /// within a few ulps of it, so serialized states read back bit-exactly.
    pub fn with_tolerance(amps: DVector<C64>, tol: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension("state dimension must be >= 1".into()));
        }
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        if (norm - 1.0).abs() <= 8.0 * f64::EPSILON {
            return Ok(Self { amps });
        }
        Ok(Self { amps: amps / C64::new(norm, 0.0) })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension("state dimension must be >= 1".into()));
        }
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { amps: amps / C64::new(norm, 0.0) })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amps))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 || index >= dim {
            return Err(Error::InvalidDimension(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Real-coefficient state `Σ_k coeffs[k] |k⟩`, normalized.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::normalized(DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    /// `e^{iθ}|ψ⟩`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self {
            amps: &self.amps * C64::from_polar(1.0, theta),
        }
    }

    /// `U|ψ⟩`, renormalized to absorb rounding.
    pub fn apply(&self, unitary: &DMatrix<C64>) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::dim(self.dim(), unitary.nrows()));
        }
        Self::normalized(unitary * &self.amps)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.amps * self.amps.adjoint()
    }

    /// `⟨ψ|A|ψ⟩` for Hermitian `A`, real part.
    pub fn expectation(&self, op: &DMatrix<C64>) -> f64 {
        self.amps.dotc(&(op * &self.amps)).re
    }
}

/// Equivalence class of a state modulo global phase, held in canonical gauge.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    representative: StateVector,
}

impl Ray {
    pub fn representative(&self) -> &StateVector {
        &self.representative
    }

    /// Largest componentwise difference between the canonical representatives.
    pub fn max_component_difference(&self, other: &Ray) -> Result<f64> {
        check_dims(&self.representative, &other.representative)?;
        Ok(self
            .representative
            .amps
            .iter()
            .zip(other.representative.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Canonical gauge: the first amplitude of modulus above [`TOL_NORM`] is made
/// real and positive.
pub fn canonicalize(v: &StateVector) -> Result<Ray> {
    let pivot = v
        .amps
        .iter()
        .find(|z| z.norm() > TOL_NORM)
        .ok_or(Error::ZeroVector)?;
    let phase = pivot.conj() / pivot.norm();
    let mut amps = &v.amps * phase;
    // The pivot is real up to rounding; pin its imaginary part exactly.
    if let Some(p) = amps.iter_mut().find(|z| z.norm() > TOL_NORM) {
        *p = C64::new(p.norm(), 0.0);
    }
    Ok(Ray {
        representative: StateVector { amps },
    })
}

pub(crate) fn check_dims(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::dim(a.dim(), b.dim()));
    }
    Ok(())
}

/// `⟨a|b⟩`, antilinear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dims(a, b)?;
    Ok(a.amps.dotc(&b.amps))
}

/// Phase-aligned chord `min_φ ‖b − e^{iφ}a‖ = sqrt(2(1 − |⟨a|b⟩|))`.
pub fn chord(a: &StateVector, b: &StateVector) -> Result<f64> {
    let z = inner_product(a, b)?;
    let m = z.norm();
    let phase = if m > 0.0 { z / m } else { C64::new(1.0, 0.0) };
    let s: f64 = a
        .amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| (y - x * phase).norm_sqr())
        .sum();
    Ok(s.sqrt().min(std::f64::consts::SQRT_2))
}

/// `|⟨a|b⟩|` clamped to `[0, 1]`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    let c = chord(a, b)?;
    Ok((1.0 - 0.5 * c * c).clamp(0.0, 1.0))
}
