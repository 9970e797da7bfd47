//! The eight axiom checks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use nalgebra::{DMatrix, DVector};

use super::witness::{
    collapse_violation, context_violation, geodesic_violation, representatives_violation,
    state_json, transformed_violation, triangle_violation,
};
use super::{Axiom, AxiomVerdict, Counterexample, Status, AXIOM_TOL, DISTINCT_FS};
use crate::error::{Error, Result};
use crate::hilbert::{
    canonicalize, haar_state, haar_unitary, partial_trace, BipartiteState,
    StateVector, Subsystem, C64,
};
use crate::io::matrix_to_json;
use crate::metrics::{d_fs, DistanceCandidate, Domain, Povm, TOL_POVM};
use crate::rng::SeededRng;

/// Largest entry difference tolerated between the marginals of a Schmidt-phase pair.
const MARGINAL_TOL: f64 = 1e-10;
/// Smallest relative phase used when a pair must differ only in phase.
const MIN_PHASE_GAP: f64 = 0.05;

/// Which unitaries the invariance check draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitaryScope {
    /// Haar unitaries on the whole space.
    Global,
    /// `U_A ⊗ U_B` with Haar factors.
    Local { dim_a: usize, dim_b: usize },
}

impl UnitaryScope {
    pub fn label(self) -> &'static str {
        match self {
            UnitaryScope::Global => "global",
            UnitaryScope::Local { .. } => "local",
        }
    }
}

struct Tracker {
    axiom: Axiom,
    trials: usize,
    max: f64,
    worst: Option<Counterexample>,
    failed: bool,
}

impl Tracker {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            trials: 0,
            max: 0.0,
            worst: None,
            failed: false,
        }
    }

    fn observe(&mut self, violation: f64, failing: bool, cx: impl FnOnce() -> Counterexample) {
        self.trials += 1;
        self.failed |= failing;
        if violation > self.max || (failing && self.worst.is_none()) {
            self.max = violation;
            self.worst = Some(cx());
        }
    }

    fn finish(self) -> AxiomVerdict {
        if self.trials == 0 {
            return AxiomVerdict::not_applicable(self.axiom);
        }
        AxiomVerdict {
            axiom: self.axiom,
            variant: None,
            status: if self.failed { Status::Fail } else { Status::Pass },
            trials: self.trials,
            max_violation: self.max,
            counterexample: if self.failed { self.worst } else { None },
            witness: None,
        }
    }
}

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidDimension("trials must be >= 1".into()));
    }
    Ok(())
}

/// Re-raises an evaluation failure as a candidate error naming the axiom and
/// echoing the inputs.
fn annotate<'a>(c: &'a DistanceCandidate, axiom: Axiom, inputs: &'a [&'a StateVector]) -> impl FnOnce(Error) -> Error + 'a {
    move |e| {
        let echo: Vec<String> = inputs
            .iter()
            .map(|s| serde_json::to_string(&state_json(c, s)).unwrap_or_default())
            .collect();
        let message = match e {
            Error::Candidate { message, .. } => message,
            other => other.to_string(),
        };
        Error::Candidate {
            candidate: c.name().to_string(),
            axiom: format!("{axiom:?}"),
            message: format!("{message}; inputs: [{}]", echo.join(", ")),
        }
    }
}

fn dims_at_least(c: &DistanceCandidate, dims: &[usize], min: usize) -> Vec<usize> {
    c.domain().dims(dims).into_iter().filter(|&d| d >= min).collect()
}

fn ket(dim: usize, i: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Orthonormal pair spanning a Haar-random plane.
fn random_frame(dim: usize, rng: &mut SeededRng) -> Result<(DVector<C64>, DVector<C64>)> {
    let e0 = haar_state(dim, rng)?.into_amplitudes();
    let mut e1 = haar_state(dim, rng)?.into_amplitudes();
    for _ in 0..2 {
        let z = e0.dotc(&e1);
        e1 -= &e0 * z;
    }
    Ok((e0, StateVector::normalized(e1)?.into_amplitudes()))
}

fn combine(terms: &[(C64, &DVector<C64>)]) -> Result<StateVector> {
    let dim = terms[0].1.len();
    let v = terms.iter().fold(DVector::zeros(dim), |acc, (z, e)| acc + *e * *z);
    StateVector::normalized(v)
}

fn geodesic_point(e0: &DVector<C64>, e1: &DVector<C64>, t: f64) -> Result<StateVector> {
    combine(&[(C64::new(t.cos(), 0.0), e0), (C64::new(t.sin(), 0.0), e1)])
}

/// A phase in `[MIN_PHASE_GAP, 2π − MIN_PHASE_GAP]`.
fn phase_gap(rng: &mut SeededRng) -> f64 {
    rng.uniform(MIN_PHASE_GAP, TAU - MIN_PHASE_GAP)
}

/// Axiom 1: values do not depend on the representatives' global phases.
pub fn check_ray(c: &DistanceCandidate, dims: &[usize], trials: usize, rng: &mut SeededRng) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = dims_at_least(c, dims, 1);
    let mut t = Tracker::new(Axiom::Ray);
    for k in 0..trials {
        let d = dims[k % dims.len()];
        let (a, b, pa, pb) = if k == 0 {
            let a = haar_state(d, rng)?;
            (a.clone(), a, PI, 0.0)
        } else {
            let a = haar_state(d, rng)?;
            let b = haar_state(d, rng)?;
            (a, b, rng.uniform(0.0, TAU), rng.uniform(0.0, TAU))
        };
        let v = representatives_violation(c, &a, &b, pa, pb).map_err(annotate(c, Axiom::Ray, &[&a, &b]))?;
        t.observe(v, v >= AXIOM_TOL, || Counterexample::Representatives {
            a: state_json(c, &a),
            b: state_json(c, &b),
            phase_a: pa,
            phase_b: pb,
        });
    }
    Ok(t.finish())
}

/// Hadamard on the first two coordinates, identity elsewhere.
fn hadamard_block(dim: usize) -> DMatrix<C64> {
    let mut u = DMatrix::<C64>::identity(dim, dim);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    u[(0, 0)] = h;
    u[(0, 1)] = h;
    u[(1, 0)] = h;
    u[(1, 1)] = -h;
    u
}

/// Axiom 2: `c(Uψ, Uφ) = c(ψ, φ)` for unitaries drawn according to `scope`.
pub fn check_unitary_invariance(
    c: &DistanceCandidate,
    dims: &[usize],
    trials: usize,
    scope: UnitaryScope,
    rng: &mut SeededRng,
) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = match scope {
        UnitaryScope::Global => dims_at_least(c, dims, 1),
        UnitaryScope::Local { dim_a, dim_b } => vec![dim_a * dim_b],
    };
    let mut t = Tracker::new(Axiom::UnitaryInvariance);
    for k in 0..trials {
        let d = dims[k % dims.len()];
        let (a, b, u) = match scope {
            UnitaryScope::Global if k == 0 && d >= 2 => {
                (StateVector::basis(d, 0)?, StateVector::basis(d, 1)?, hadamard_block(d))
            }
            UnitaryScope::Global => (haar_state(d, rng)?, haar_state(d, rng)?, haar_unitary(d, rng)?),
            UnitaryScope::Local { dim_a, dim_b } => {
                let ua = haar_unitary(dim_a, rng)?;
                let ub = haar_unitary(dim_b, rng)?;
                (haar_state(d, rng)?, haar_state(d, rng)?, ua.kronecker(&ub))
            }
        };
        let v = transformed_violation(c, &a, &b, &u).map_err(annotate(c, Axiom::UnitaryInvariance, &[&a, &b]))?;
        t.observe(v, v >= AXIOM_TOL, || Counterexample::Transformed {
            a: state_json(c, &a),
            b: state_json(c, &b),
            unitary: matrix_to_json(&u),
        });
    }
    Ok(t.finish())
}

fn rays_coincide(a: &StateVector, b: &StateVector) -> Result<bool> {
    Ok(canonicalize(a)?.max_component_difference(&canonicalize(b)?)? <= AXIOM_TOL)
}

/// Records a distinct-ray pair: failing when the candidate gives it a value at
/// or below the positivity threshold.
fn observe_distinct(t: &mut Tracker, c: &DistanceCandidate, a: &StateVector, b: &StateVector) -> Result<()> {
    let v = collapse_violation(c, a, b).map_err(annotate(c, t.axiom, &[a, b]))?;
    t.observe(v, v > 0.0, || Counterexample::Collapse {
        a: state_json(c, a),
        b: state_json(c, b),
    });
    Ok(())
}

/// Axiom 3: superpositions with equal moduli and different relative phase are
/// separated.
pub fn check_superposition(c: &DistanceCandidate, dims: &[usize], trials: usize, rng: &mut SeededRng) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = dims_at_least(c, dims, 2);
    let mut t = Tracker::new(Axiom::Superposition);
    if dims.is_empty() {
        return Ok(t.finish());
    }
    for k in 0..trials {
        let d = dims[k % dims.len()];
        let ((e0, e1), chi, p1, p2) = if k == 0 {
            ((ket(d, 0), ket(d, 1)), FRAC_PI_4, 0.0, PI)
        } else {
            let frame = random_frame(d, rng)?;
            let chi = rng.uniform(0.1, FRAC_PI_2 - 0.1);
            let p1 = rng.uniform(0.0, TAU);
            (frame, chi, p1, p1 + phase_gap(rng))
        };
        let (cos, sin) = (C64::new(chi.cos(), 0.0), chi.sin());
        let a = combine(&[(cos, &e0), (C64::from_polar(sin, p1), &e1)])?;
        let b = combine(&[(cos, &e0), (C64::from_polar(sin, p2), &e1)])?;
        if rays_coincide(&a, &b)? {
            continue;
        }
        observe_distinct(&mut t, c, &a, &b)?;
    }
    Ok(t.finish())
}

/// A common eigenbasis of a commuting POVM, or `None` if the effects do not
/// commute. Diagonal POVMs get the computational basis.
pub(crate) fn joint_eigenbasis(povm: &Povm) -> Option<Vec<DVector<C64>>> {
    let d = povm.dim();
    if povm.is_diagonal() {
        return Some((0..d).map(|i| ket(d, i)).collect());
    }
    if povm.commutator_defect() > TOL_POVM {
        return None;
    }
    // A generic combination separates every joint eigenspace.
    let mix = povm
        .effects()
        .iter()
        .enumerate()
        .fold(DMatrix::<C64>::zeros(d, d), |acc, (m, e)| {
            acc + e * C64::new(1.0 / (m as f64 + std::f64::consts::SQRT_2), 0.0)
        });
    Some(crate::hilbert::hermitian_eigen(&mix).1)
}

/// Distinct rays `(u₀ ± u₁)/√2` in a joint eigenbasis: every effect assigns
/// them the same probability.
pub fn collapse_pair(povm: &Povm) -> Result<Option<(StateVector, StateVector)>> {
    if povm.dim() < 2 {
        return Ok(None);
    }
    let Some(basis) = joint_eigenbasis(povm) else {
        return Ok(None);
    };
    let one = C64::new(1.0, 0.0);
    let a = combine(&[(one, &basis[0]), (one, &basis[1])])?;
    let b = combine(&[(one, &basis[0]), (-one, &basis[1])])?;
    Ok(Some((a, b)))
}

/// Random pair with identical moduli in `basis` and independent phases.
fn equal_distribution_pair(basis: &[DVector<C64>], rng: &mut SeededRng) -> Result<(StateVector, StateVector)> {
    let moduli = haar_state(basis.len(), rng)?;
    let pick = |rng: &mut SeededRng| {
        let terms: Vec<(C64, &DVector<C64>)> = basis
            .iter()
            .zip(moduli.amplitudes().iter())
            .map(|(e, m)| (C64::from_polar(m.norm(), rng.uniform(0.0, TAU)), e))
            .collect();
        combine(&terms)
    };
    let a = pick(rng)?;
    let b = pick(rng)?;
    Ok((a, b))
}

/// Axiom 4: zero exactly on coincident rays.
pub fn check_nondegeneracy(c: &DistanceCandidate, dims: &[usize], trials: usize, rng: &mut SeededRng) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = dims_at_least(c, dims, 1);
    let collapse = match c.context() {
        Some(ctx) => collapse_pair(&ctx.povm)?,
        None => None,
    };
    let mut t = Tracker::new(Axiom::NonDegeneracy);
    for k in 0..trials {
        let d = dims[k % dims.len()];
        let distinct = match k % 4 {
            0 if k == 0 && d >= 2 => {
                let a = StateVector::from_real(&[1.0, 1.0])?;
                let b = StateVector::from_real(&[1.0, -1.0])?;
                let pad = |s: StateVector| -> Result<StateVector> {
                    let mut v = DVector::zeros(d);
                    v.rows_mut(0, 2).copy_from(s.amplitudes());
                    StateVector::normalized(v)
                };
                Some((pad(a)?, pad(b)?))
            }
            2 if k == 2 && collapse.as_ref().is_some_and(|(a, _)| a.dim() == d) => collapse.clone(),
            0 | 2 if d < 2 => None,
            0 => Some((haar_state(d, rng)?, haar_state(d, rng)?)),
            2 => {
                let a = haar_state(d, rng)?;
                let mut v = a.amplitudes().clone();
                let i = rng.range_inclusive(0, d - 1);
                v[i] *= C64::from_polar(1.0, phase_gap(rng));
                Some((a, StateVector::normalized(v)?))
            }
            _ => {
                let a = haar_state(d, rng)?;
                let theta = if k == 1 { 0.0 } else { rng.uniform(0.0, TAU) };
                let b = a.with_phase(theta);
                let v = c.evaluate(&a, &b).map_err(annotate(c, Axiom::NonDegeneracy, &[&a, &b]))?;
                t.observe(v, v >= AXIOM_TOL, || Counterexample::Separated {
                    a: state_json(c, &a),
                    b: state_json(c, &b),
                });
                None
            }
        };
        if let Some((a, b)) = distinct {
            if d_fs(&a, &b)? > DISTINCT_FS {
                observe_distinct(&mut t, c, &a, &b)?;
            }
        }
    }
    Ok(t.finish())
}

fn observe_triangle(
    t: &mut Tracker,
    c: &DistanceCandidate,
    a: &StateVector,
    b: &StateVector,
    via: &StateVector,
) -> Result<()> {
    let v = triangle_violation(c, a, b, via).map_err(annotate(c, Axiom::Triangle, &[a, b, via]))?;
    t.observe(v, v >= AXIOM_TOL, || Counterexample::Triangle {
        a: state_json(c, a),
        b: state_json(c, b),
        via: state_json(c, via),
    });
    Ok(())
}

/// Axiom 5: triangle inequality on geodesic (collinear) and Haar triples.
pub fn check_triangle(c: &DistanceCandidate, dims: &[usize], trials: usize, rng: &mut SeededRng) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = dims_at_least(c, dims, 1);
    let mut t = Tracker::new(Axiom::Triangle);
    for k in 0..trials {
        let d = dims[k % dims.len()];
        if k % 3 == 2 || d < 2 {
            let x = haar_state(d, rng)?;
            let y = haar_state(d, rng)?;
            let z = haar_state(d, rng)?;
            observe_triangle(&mut t, c, &x, &y, &z)?;
            observe_triangle(&mut t, c, &y, &z, &x)?;
            observe_triangle(&mut t, c, &z, &x, &y)?;
            continue;
        }
        let ((e0, e1), t1, t2) = if k == 0 {
            ((ket(d, 0), ket(d, 1)), FRAC_PI_4, FRAC_PI_4)
        } else {
            let t1 = rng.uniform(0.0, FRAC_PI_2);
            (random_frame(d, rng)?, t1, rng.uniform(0.0, FRAC_PI_2 - t1))
        };
        let start = geodesic_point(&e0, &e1, 0.0)?;
        let middle = geodesic_point(&e0, &e1, t1)?;
        let end = geodesic_point(&e0, &e1, t1 + t2)?;
        observe_triangle(&mut t, c, &start, &end, &middle)?;
    }
    Ok(t.finish())
}

/// Axiom 6: additivity along geodesics in random two-dimensional frames.
///
/// The axiom's other clause (dependence on the transition probability only)
/// already follows from Axioms 1 and 2, so only additivity is sampled.
pub fn check_geodesic_additivity(
    c: &DistanceCandidate,
    dims: &[usize],
    trials: usize,
    rng: &mut SeededRng,
) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let dims = dims_at_least(c, dims, 2);
    let mut t = Tracker::new(Axiom::GeodesicAdditivity);
    if dims.is_empty() {
        return Ok(t.finish());
    }
    for k in 0..trials {
        let d = dims[k % dims.len()];
        let ((e0, e1), t1, t2) = if k == 0 {
            ((ket(d, 0), ket(d, 1)), FRAC_PI_4, FRAC_PI_4)
        } else {
            let t1 = rng.uniform(0.0, FRAC_PI_2);
            (random_frame(d, rng)?, t1, rng.uniform(0.0, FRAC_PI_2 - t1))
        };
        let start = geodesic_point(&e0, &e1, 0.0)?;
        let middle = geodesic_point(&e0, &e1, t1)?;
        let end = geodesic_point(&e0, &e1, t1 + t2)?;
        let v = geodesic_violation(c, &start, &middle, &end)
            .map_err(annotate(c, Axiom::GeodesicAdditivity, &[&start, &middle, &end]))?;
        t.observe(v, v >= AXIOM_TOL, || Counterexample::Geodesic {
            start: state_json(c, &start),
            middle: state_json(c, &middle),
            end: state_json(c, &end),
            theta1: t1,
            theta2: t2,
        });
    }
    Ok(t.finish())
}

fn marginal_gap(a: &BipartiteState, b: &BipartiteState) -> Result<f64> {
    let mut gap = 0.0f64;
    for keep in [Subsystem::A, Subsystem::B] {
        let (ra, rb) = (partial_trace(a, keep)?, partial_trace(b, keep)?);
        let diff = ra.entries() - rb.entries();
        gap = gap.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(gap)
}

/// Axiom 7: some pair with identical marginals is separated.
///
/// Pairs are Schmidt-phase families `Σ √λ_i |ii⟩` vs `Σ √λ_i e^{iθ_i} |ii⟩` with
/// uniform `λ` on the full Schmidt rank, moved by a common random local
/// unitary. The first pair per factorization uses `θ_k = 2πk/r`, which makes
/// the two states orthogonal (Φ⁺ vs Φ⁻ for two qubits).
pub fn check_entanglement_awareness(
    c: &DistanceCandidate,
    dims_ab: &[(usize, usize)],
    trials: usize,
    rng: &mut SeededRng,
) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let factorizations: Vec<(usize, usize)> = match c.domain() {
        Domain::Bipartite { dim_a, dim_b } => vec![(dim_a, dim_b)],
        Domain::Fixed(d) => dims_ab.iter().copied().filter(|(a, b)| a * b == d).collect(),
        Domain::Any => dims_ab.to_vec(),
    }
    .into_iter()
    .filter(|&(a, b)| a.min(b) >= 2)
    .collect();
    if factorizations.is_empty() {
        return Ok(AxiomVerdict::not_applicable(Axiom::EntanglementAwareness));
    }

    // (fs separation, pair) of the best-separated unresolved pair.
    let mut best: Option<(f64, StateVector, StateVector)> = None;
    for k in 0..trials {
        let (da, db) = factorizations[k % factorizations.len()];
        let r = da.min(db);
        let amp = (1.0 / r as f64).sqrt();
        let phases: Vec<f64> = if k < factorizations.len() {
            (0..r).map(|i| TAU * i as f64 / r as f64).collect()
        } else {
            std::iter::once(0.0).chain((1..r).map(|_| rng.uniform(0.0, TAU))).collect()
        };
        let plain = vec![C64::new(amp, 0.0); r];
        let twisted: Vec<C64> = phases.iter().map(|&p| C64::from_polar(amp, p)).collect();
        let mut a = BipartiteState::schmidt_diagonal(da, db, &plain)?;
        let mut b = BipartiteState::schmidt_diagonal(da, db, &twisted)?;
        if k >= factorizations.len() {
            let u = haar_unitary(da, rng)?.kronecker(&haar_unitary(db, rng)?);
            a = BipartiteState::new(a.state().apply(&u)?, da, db)?;
            b = BipartiteState::new(b.state().apply(&u)?, da, db)?;
        }
        let gap = marginal_gap(&a, &b)?;
        if gap > MARGINAL_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Schmidt-phase pair has marginals differing by {gap:e}"
            )));
        }
        let (a, b) = (a.state().clone(), b.state().clone());
        let v = c
            .evaluate(&a, &b)
            .map_err(annotate(c, Axiom::EntanglementAwareness, &[&a, &b]))?;
        if v > AXIOM_TOL {
            let verdict = AxiomVerdict {
                axiom: Axiom::EntanglementAwareness,
                variant: None,
                status: Status::Pass,
                trials: k + 1,
                max_violation: 0.0,
                counterexample: None,
                witness: Some(Counterexample::Pair {
                    a: state_json(c, &a),
                    b: state_json(c, &b),
                }),
            };
            return Ok(verdict);
        }
        let sep = d_fs(&a, &b)?;
        if best.as_ref().is_none_or(|(s, _, _)| sep > *s) {
            best = Some((sep, a, b));
        }
    }
    let (sep, a, b) = best.expect("at least one trial");
    Ok(AxiomVerdict {
        axiom: Axiom::EntanglementAwareness,
        variant: None,
        status: Status::Fail,
        trials,
        max_violation: sep,
        counterexample: Some(Counterexample::Collapse {
            a: state_json(c, &a),
            b: state_json(c, &b),
        }),
        witness: None,
    })
}

/// Axiom 8: for a candidate defined by a measurement, zero exactly when the
/// outcome distributions agree, plus an explicit collapse of distinct rays
/// when the measurement admits one.
///
/// Collapse pairs are constructed for commuting POVMs from a joint
/// eigenbasis. For non-commuting POVMs only the equivalence is sampled.
pub fn check_measurement_contextuality(c: &DistanceCandidate, trials: usize, rng: &mut SeededRng) -> Result<AxiomVerdict> {
    require_trials(trials)?;
    let Some(ctx) = c.context() else {
        return Ok(AxiomVerdict::not_applicable(Axiom::MeasurementContextuality));
    };
    let d = ctx.povm.dim();
    let basis = if d >= 2 { joint_eigenbasis(&ctx.povm) } else { None };
    let collapse = collapse_pair(&ctx.povm)?;
    let mut t = Tracker::new(Axiom::MeasurementContextuality);
    for k in 0..trials {
        let (a, b) = match (&collapse, &basis) {
            (Some(pair), _) if k == 0 => pair.clone(),
            (_, Some(basis)) if k % 2 == 1 => equal_distribution_pair(basis, rng)?,
            _ => (haar_state(d, rng)?, haar_state(d, rng)?),
        };
        let v = context_violation(c, &a, &b).map_err(annotate(c, Axiom::MeasurementContextuality, &[&a, &b]))?;
        t.observe(v, v >= AXIOM_TOL, || Counterexample::ContextMismatch {
            a: state_json(c, &a),
            b: state_json(c, &b),
        });
    }
    let mut verdict = t.finish();
    if verdict.passed() {
        if let Some((a, b)) = &collapse {
            verdict.witness = Some(Counterexample::Collapse {
                a: state_json(c, a),
                b: state_json(c, b),
            });
        }
    }
    Ok(verdict)
}
