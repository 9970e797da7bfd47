use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{C64, TOL_EIG, TOL_NORM};
use crate::error::{Error, Result};

/// Logarithm base used for entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyBase {
    #[default]
    Natural,
    Two,
}

impl EntropyBase {
    /// `ln(base)`: divide natural-log quantities by this.
    pub fn ln_base(self) -> f64 {
        match self {
            EntropyBase::Natural => 1.0,
            EntropyBase::Two => std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EntropyBase::Natural => "e",
            EntropyBase::Two => "2",
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                n,
                entries.ncols()
            )));
        }
        let herm_defect = hermitian_defect(&entries);
        if herm_defect > TOL_NORM {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {herm_defect:e})"
            )));
        }
        let entries = hermitian_part(&entries);
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TOL_NORM || trace.im.abs() > TOL_NORM {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace} != 1")));
        }
        let rho = Self { entries };
        let min = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -TOL_EIG {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Von Neumann entropy `−Σ λ log λ`, with eigenvalues at or below
    /// [`TOL_EIG`] contributing zero.
    pub fn entropy(&self, base: EntropyBase) -> f64 {
        shannon_entropy(&self.eigenvalues()) / base.ln_base()
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::dim(self.dim(), other.dim()));
        }
        let diff = &self.entries - &other.entries;
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
    }
}

/// Natural-log Shannon entropy of a spectrum with the `0 log 0 = 0` floor.
pub(crate) fn shannon_entropy(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > TOL_EIG)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}

pub(crate) fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of the Hermitian part of `m`: ascending eigenvalues with
/// matching unit eigenvectors.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    (values, vectors)
}
