//! Serialized counterexamples and their standalone re-evaluation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::AXIOM_TOL;
use crate::error::{Error, Result};
use crate::hilbert::{StateVector, C64};
use crate::io::{matrix_from_json, MatrixJson, StateJson};
use crate::metrics::{d_fs, DistanceCandidate, Domain};

/// A recorded input on which a candidate breaks (or, as a witness, meets) an
/// axiom. [`replay`] maps each kind to the violation it demonstrates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Counterexample {
    /// `|c(e^{iθa}a, e^{iθb}b) − c(a, b)|`.
    Representatives {
        a: StateJson,
        b: StateJson,
        #[serde(rename = "phaseA")]
        phase_a: f64,
        #[serde(rename = "phaseB")]
        phase_b: f64,
    },
    /// `|c(Ua, Ub) − c(a, b)|`.
    Transformed {
        a: StateJson,
        b: StateJson,
        unitary: MatrixJson,
    },
    /// Distinct rays the candidate does not separate: `d_fs(a, b)` when
    /// `c(a, b) ≤ 1e-9`, else 0.
    Collapse { a: StateJson, b: StateJson },
    /// One ray given a positive value: `c(a, b)`.
    Separated { a: StateJson, b: StateJson },
    /// A plain evaluation `c(a, b)`.
    Pair { a: StateJson, b: StateJson },
    /// `max(0, c(a, b) − c(a, via) − c(via, b))`.
    Triangle {
        a: StateJson,
        b: StateJson,
        via: StateJson,
    },
    /// `|c(start, end) − c(start, middle) − c(middle, end)|` along a geodesic.
    Geodesic {
        start: StateJson,
        middle: StateJson,
        end: StateJson,
        theta1: f64,
        theta2: f64,
    },
    /// Disagreement between `c(a, b) = 0` and equality of the outcome
    /// distributions under the candidate's POVM.
    ContextMismatch { a: StateJson, b: StateJson },
}

pub(crate) fn state_json(c: &DistanceCandidate, s: &StateVector) -> StateJson {
    let mut j = StateJson::from_state(s);
    if let Domain::Bipartite { dim_a, dim_b } = c.domain() {
        j.dim_a = Some(dim_a);
        j.dim_b = Some(dim_b);
    }
    j
}

pub(crate) fn representatives_violation(
    c: &DistanceCandidate,
    a: &StateVector,
    b: &StateVector,
    phase_a: f64,
    phase_b: f64,
) -> Result<f64> {
    let moved = c.evaluate(&a.with_phase(phase_a), &b.with_phase(phase_b))?;
    Ok((moved - c.evaluate(a, b)?).abs())
}

pub(crate) fn transformed_violation(
    c: &DistanceCandidate,
    a: &StateVector,
    b: &StateVector,
    u: &DMatrix<C64>,
) -> Result<f64> {
    let moved = c.evaluate(&a.apply(u)?, &b.apply(u)?)?;
    Ok((moved - c.evaluate(a, b)?).abs())
}

pub(crate) fn collapse_violation(c: &DistanceCandidate, a: &StateVector, b: &StateVector) -> Result<f64> {
    if c.evaluate(a, b)? <= AXIOM_TOL {
        d_fs(a, b)
    } else {
        Ok(0.0)
    }
}

pub(crate) fn triangle_violation(
    c: &DistanceCandidate,
    a: &StateVector,
    b: &StateVector,
    via: &StateVector,
) -> Result<f64> {
    Ok((c.evaluate(a, b)? - c.evaluate(a, via)? - c.evaluate(via, b)?).max(0.0))
}

pub(crate) fn geodesic_violation(
    c: &DistanceCandidate,
    start: &StateVector,
    middle: &StateVector,
    end: &StateVector,
) -> Result<f64> {
    Ok((c.evaluate(start, end)? - c.evaluate(start, middle)? - c.evaluate(middle, end)?).abs())
}

/// Violation of `c(a, b) = 0 ⟺ p_a = p_b` on one pair: the distribution gap
/// if the candidate collapses different distributions, the value if it
/// separates equal ones.
pub(crate) fn context_violation(c: &DistanceCandidate, a: &StateVector, b: &StateVector) -> Result<f64> {
    let ctx = c.context().ok_or_else(|| Error::Candidate {
        candidate: c.name().to_string(),
        axiom: "MeasurementContextuality".into(),
        message: "candidate has no measurement context".into(),
    })?;
    let pa = ctx.povm.probabilities(a)?;
    let pb = ctx.povm.probabilities(b)?;
    let gap: f64 = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum();
    let value = c.evaluate(a, b)?;
    Ok(match (value <= AXIOM_TOL, gap <= AXIOM_TOL) {
        (true, false) => gap,
        (false, true) => value,
        _ => 0.0,
    })
}

/// Re-evaluates a counterexample against `c` from its serialized form.
pub fn replay(c: &DistanceCandidate, cx: &Counterexample) -> Result<f64> {
    match cx {
        Counterexample::Representatives { a, b, phase_a, phase_b } => {
            representatives_violation(c, &a.to_state()?, &b.to_state()?, *phase_a, *phase_b)
        }
        Counterexample::Transformed { a, b, unitary } => {
            let a = a.to_state()?;
            let u = matrix_from_json(unitary, a.dim(), "counterexample.unitary")?;
            transformed_violation(c, &a, &b.to_state()?, &u)
        }
        Counterexample::Collapse { a, b } => collapse_violation(c, &a.to_state()?, &b.to_state()?),
        Counterexample::Separated { a, b } | Counterexample::Pair { a, b } => {
            c.evaluate(&a.to_state()?, &b.to_state()?)
        }
        Counterexample::Triangle { a, b, via } => {
            triangle_violation(c, &a.to_state()?, &b.to_state()?, &via.to_state()?)
        }
        Counterexample::Geodesic { start, middle, end, .. } => {
            geodesic_violation(c, &start.to_state()?, &middle.to_state()?, &end.to_state()?)
        }
        Counterexample::ContextMismatch { a, b } => context_violation(c, &a.to_state()?, &b.to_state()?),
    }
}
