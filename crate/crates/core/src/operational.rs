//! Operational readings of the ray distances: optimal two-state
//! discrimination and finite-difference quantum Fisher information.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{inner_product, StateVector, C64};
use crate::metrics::{d_bures, d_fs, d_trace_pure, Povm};

/// Optimal discrimination of two equiprobable pure states.
#[derive(Clone, Debug)]
pub struct DiscriminationResult {
    pub p_success: f64,
    pub trace_distance: f64,
    pub fs_distance: f64,
    /// Effects `[E₊, E₋]`: guess the first state on `+`, the second on `−`.
    pub optimal_povm: Povm,
}

/// Helstrom measurement for `a` versus `b` with equal priors.
///
/// `E₋` projects onto the negative eigenvector of `|a⟩⟨a| − |b⟩⟨b|`, which lies in
/// `span{a, b}` and is found in closed form there; `E₊ = I − E₋` absorbs both the
/// positive eigenvector and the complement of the span.
pub fn helstrom(a: &StateVector, b: &StateVector) -> Result<DiscriminationResult> {
    let z = inner_product(a, b)?;
    let fs_distance = d_fs(a, b)?;
    let trace_distance = d_trace_pure(a, b)?;
    let dim = a.dim();

    let xa = a.amplitudes();
    let residual: DVector<C64> = b.amplitudes() - xa * z;
    // Second Gram–Schmidt pass keeps e2 orthogonal to a when b ≈ a.
    let residual = &residual - xa * xa.dotc(&residual);
    let s = residual.norm();
    let optimal_povm = if s > 0.0 {
        let e2 = residual / C64::new(s, 0.0);
        // In the basis (a, e2): b = (z, s) and the negative eigenvector of
        // [[s², −zs], [−s z̄, −s²]] is (z, 1 + s)/sqrt(2(1 + s)).
        let s = s.min(1.0);
        let v = (xa * z + e2 * C64::new(1.0 + s, 0.0)) / C64::new((2.0 * (1.0 + s)).sqrt(), 0.0);
        let v = &v / C64::new(v.norm(), 0.0);
        Povm::binary_from_projector(dim, &[v])?
    } else {
        Povm::binary_from_projector(dim, &[])?
    };

    Ok(DiscriminationResult {
        p_success: 0.5 * (1.0 + trace_distance),
        trace_distance,
        fs_distance,
        optimal_povm,
    })
}

/// Fubini–Study distance recovered from an optimal success probability.
pub fn fs_from_popt(p: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::Range { value: p, lo: 0.5, hi: 1.0 });
    }
    Ok((2.0 * p - 1.0).clamp(0.0, 1.0).asin())
}

/// Allowed finite-difference steps.
pub const QFI_STEP_RANGE: (f64, f64) = (1e-6, 1e-2);
/// Default finite-difference step.
pub const QFI_DEFAULT_STEP: f64 = 1e-4;
/// Normalization tolerance for parameterized family outputs.
pub const FAMILY_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct QfiEstimate {
    pub theta: f64,
    pub step: f64,
    /// `4(1 − |⟨ψ_θ|ψ_{θ+h}⟩|²)/h²`.
    pub value: f64,
    /// `d_B(ψ_θ, ψ_{θ+h})²/h²`, which tends to `value/4`.
    pub bures_quadratic: f64,
}

impl QfiEstimate {
    /// `|d_B²/h² − F_Q/4|`, of order `h²` for smooth families.
    pub fn bures_gap(&self) -> f64 {
        (self.bures_quadratic - 0.25 * self.value).abs()
    }
}

fn family_state<F>(family: &F, theta: f64) -> Result<StateVector>
where
    F: Fn(f64) -> DVector<C64> + ?Sized,
{
    StateVector::with_tolerance(family(theta), FAMILY_NORM_TOL)
}

/// Forward-difference quantum Fisher information of `family` at `theta`.
///
/// Uses `1 − r² = sin² d_fs`, evaluated from the phase-aligned chord so that
/// no catastrophic cancellation occurs at small steps.
pub fn qfi_finite_difference<F>(family: &F, theta: f64, step: f64) -> Result<QfiEstimate>
where
    F: Fn(f64) -> DVector<C64> + ?Sized,
{
    let (lo, hi) = QFI_STEP_RANGE;
    if !(lo..=hi).contains(&step) {
        return Err(Error::Range { value: step, lo, hi });
    }
    let here = family_state(family, theta)?;
    let there = family_state(family, theta + step)?;
    if here.dim() != there.dim() {
        return Err(Error::dim(here.dim(), there.dim()));
    }
    let h2 = step * step;
    let t = d_trace_pure(&here, &there)?;
    let b = d_bures(&here, &there)?;
    let value = 4.0 * t * t / h2;
    Ok(QfiEstimate {
        theta,
        step,
        value: if value < 0.0 && value > -1e-9 { 0.0 } else { value },
        bures_quadratic: b * b / h2,
    })
}

/// Built-in one-parameter qubit families.
pub mod families {
    use super::*;

    /// `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn qubit_rotation(theta: f64) -> DVector<C64> {
        DVector::from_vec(vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::new((theta / 2.0).sin(), 0.0),
        ])
    }

    /// `(|0⟩ + e^{iθ}|1⟩)/√2`.
    pub fn qubit_phase(theta: f64) -> DVector<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DVector::from_vec(vec![C64::new(h, 0.0), C64::from_polar(h, theta)])
    }

    /// `|0⟩` for every θ.
    pub fn constant(_theta: f64) -> DVector<C64> {
        DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }
}
