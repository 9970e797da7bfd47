use nalgebra::{DMatrix, DVector};

use super::density::shannon_entropy;
use super::{DensityMatrix, EntropyBase, StateVector, C64};
use crate::error::{Error, Result};

/// Which factor of `H_A ⊗ H_B` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A pure state on `H_A ⊗ H_B`. Amplitude `i·dim_b + j` multiplies `|i⟩_A ⊗ |j⟩_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    state: StateVector,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(state: StateVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDimension(format!(
                "factor dimensions must be positive, got {dim_a}x{dim_b}"
            )));
        }
        if dim_a * dim_b != state.dim() {
            return Err(Error::dim(dim_a * dim_b, state.dim()));
        }
        Ok(Self { state, dim_a, dim_b })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn factorization(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// `C[i][j] = ⟨i j|ψ⟩`, a `dim_a × dim_b` matrix.
    pub fn coefficient_matrix(&self) -> DMatrix<C64> {
        let amps = self.state.amplitudes();
        DMatrix::from_fn(self.dim_a, self.dim_b, |i, j| amps[i * self.dim_b + j])
    }

    /// `Σ_i s_i |i⟩|i⟩` for a nonnegative Schmidt spectrum (normalized).
    pub fn schmidt_diagonal(dim_a: usize, dim_b: usize, coeffs: &[C64]) -> Result<Self> {
        if coeffs.len() > dim_a.min(dim_b) {
            return Err(Error::InvalidDimension(format!(
                "{} Schmidt coefficients do not fit {dim_a}x{dim_b}",
                coeffs.len()
            )));
        }
        let mut amps = DVector::zeros(dim_a * dim_b);
        for (i, &c) in coeffs.iter().enumerate() {
            amps[i * dim_b + i] = c;
        }
        Self::new(StateVector::normalized(amps)?, dim_a, dim_b)
    }

    /// `(1/√d) Σ_i |ii⟩` on `d × d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        Self::schmidt_diagonal(d, d, &vec![C64::new(1.0, 0.0); d])
    }
}

/// `|a⟩ ⊗ |b⟩`.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<BipartiteState> {
    let (da, db) = (a.dim(), b.dim());
    let (xa, xb) = (a.amplitudes(), b.amplitudes());
    let amps = DVector::from_fn(da * db, |k, _| xa[k / db] * xb[k % db]);
    BipartiteState::new(StateVector::normalized(amps)?, da, db)
}

/// Reduced density matrix of the kept subsystem.
pub fn partial_trace(s: &BipartiteState, keep: Subsystem) -> Result<DensityMatrix> {
    let c = s.coefficient_matrix();
    let rho = match keep {
        // ρ_A = C C†
        Subsystem::A => &c * c.adjoint(),
        // ρ_B[j][j'] = Σ_i C_ij conj(C_ij') = (C† C)ᵀ
        Subsystem::B => (c.adjoint() * &c).transpose(),
    };
    DensityMatrix::new(rho)
}

/// Schmidt decomposition `|ψ⟩ = Σ_k s_k |a_k⟩ ⊗ |b_k⟩` with `s` descending.
/// The Schmidt phases are absorbed into the `b_k`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub sqrt_lambda: Vec<f64>,
    pub basis_a: Vec<DVector<C64>>,
    pub basis_b: Vec<DVector<C64>>,
}

impl SchmidtDecomposition {
    /// Squared coefficients: the common spectrum of both reduced states.
    pub fn lambdas(&self) -> Vec<f64> {
        self.sqrt_lambda.iter().map(|s| s * s).collect()
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.sqrt_lambda.iter().filter(|&&s| s > tol).count()
    }

    /// `Σ_k s_k a_k ⊗ b_k` as flat amplitudes.
    pub fn reconstruct(&self) -> DVector<C64> {
        let da = self.basis_a.first().map_or(0, |v| v.len());
        let db = self.basis_b.first().map_or(0, |v| v.len());
        let mut out = DVector::zeros(da * db);
        for ((s, a), b) in self.sqrt_lambda.iter().zip(&self.basis_a).zip(&self.basis_b) {
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] += a[i] * b[j] * *s;
                }
            }
        }
        out
    }
}

pub fn schmidt(s: &BipartiteState) -> Result<SchmidtDecomposition> {
    let c = s.coefficient_matrix();
    let svd = c.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::InvalidDimension("SVD did not return singular vectors".into())),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    // C = U S V†, so C_ij = Σ_k s_k U_ik (V†)_kj and b_k = row k of V†.
    Ok(SchmidtDecomposition {
        sqrt_lambda: order.iter().map(|&k| svd.singular_values[k]).collect(),
        basis_a: order.iter().map(|&k| u.column(k).into_owned()).collect(),
        basis_b: order
            .iter()
            .map(|&k| v_t.row(k).transpose().into_owned())
            .collect(),
    })
}

/// Entanglement entropy `S(ρ_A)` in the requested base.
pub fn entanglement_entropy(s: &BipartiteState, base: EntropyBase) -> Result<f64> {
    entropy_of_subsystem(s, Subsystem::A, base)
}

/// `S(ρ_A)` or `S(ρ_B)`; equal for pure states.
pub fn entropy_of_subsystem(s: &BipartiteState, keep: Subsystem, base: EntropyBase) -> Result<f64> {
    Ok(partial_trace(s, keep)?.entropy(base))
}

/// Entropy from the Schmidt spectrum, `−Σ s_k² log s_k²`.
pub fn schmidt_entropy(d: &SchmidtDecomposition, base: EntropyBase) -> f64 {
    shannon_entropy(&d.lambdas()) / base.ln_base()
}
