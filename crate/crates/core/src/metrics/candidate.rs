use std::fmt;
use std::sync::Arc;

use super::profile::OverlapProfile;
use super::{d_bures, d_entanglement_aware, d_fs, d_hilbert, d_trace_pure, overlap, Povm};
use super::{measurement_distance_l1, measurement_distance_l2};
use crate::error::{Error, Result};
use crate::hilbert::{entanglement_entropy, BipartiteState, EntropyBase, StateVector};

type EvalFn = dyn Fn(&StateVector, &StateVector) -> Result<f64> + Send + Sync;

/// State spaces a candidate can be evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Any dimension.
    Any,
    /// One fixed dimension (e.g. the dimension of a POVM).
    Fixed(usize),
    /// `H_A ⊗ H_B` with the given factor dimensions.
    Bipartite { dim_a: usize, dim_b: usize },
}

impl Domain {
    /// Dimensions to sample from, given a requested list.
    pub fn dims(&self, requested: &[usize]) -> Vec<usize> {
        match *self {
            Domain::Any => requested.to_vec(),
            Domain::Fixed(d) => vec![d],
            Domain::Bipartite { dim_a, dim_b } => vec![dim_a * dim_b],
        }
    }
}

/// A measurement that a candidate's values are defined relative to.
#[derive(Clone, Debug)]
pub struct MeasurementContext {
    pub id: String,
    pub povm: Povm,
}

/// A distance function on states plus the metadata the axiom harness needs.
#[derive(Clone)]
pub struct DistanceCandidate {
    name: String,
    claims_metric: bool,
    claims_additivity: bool,
    domain: Domain,
    context: Option<Arc<MeasurementContext>>,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for DistanceCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceCandidate")
            .field("name", &self.name)
            .field("claims_metric", &self.claims_metric)
            .field("domain", &self.domain)
            .field("context", &self.context.as_ref().map(|c| &c.id))
            .finish()
    }
}

impl DistanceCandidate {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        eval: impl Fn(&StateVector, &StateVector) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            claims_metric: false,
            claims_additivity: false,
            domain,
            context: None,
            eval: Arc::new(eval),
        }
    }

    pub fn claiming_metric(mut self, claims: bool) -> Self {
        self.claims_metric = claims;
        self
    }

    pub fn claiming_additivity(mut self, claims: bool) -> Self {
        self.claims_additivity = claims;
        self
    }

    pub fn with_context(mut self, context: MeasurementContext) -> Self {
        self.context = Some(Arc::new(context));
        self
    }

    pub fn fubini_study() -> Self {
        Self::new("fs", Domain::Any, d_fs)
            .claiming_metric(true)
            .claiming_additivity(true)
    }

    pub fn scaled_fubini_study(c: f64) -> Self {
        Self::new(format!("{c}*fs"), Domain::Any, move |a, b| Ok(c * d_fs(a, b)?))
            .claiming_metric(true)
            .claiming_additivity(true)
    }

    pub fn bures() -> Self {
        Self::new("bures", Domain::Any, d_bures).claiming_metric(true)
    }

    pub fn trace_pure() -> Self {
        Self::new("trace", Domain::Any, d_trace_pure).claiming_metric(true)
    }

    pub fn hilbert() -> Self {
        Self::new("hilbert", Domain::Any, d_hilbert).claiming_metric(true)
    }

    pub fn entanglement_aware(dim_a: usize, dim_b: usize, base: EntropyBase) -> Self {
        Self::new(
            format!("entanglement[{dim_a}x{dim_b}]"),
            Domain::Bipartite { dim_a, dim_b },
            move |a, b| {
                let a = BipartiteState::new(a.clone(), dim_a, dim_b)?;
                let b = BipartiteState::new(b.clone(), dim_a, dim_b)?;
                d_entanglement_aware(&a, &b, base)
            },
        )
        .claiming_metric(true)
    }

    /// `|E(a) − E(b)|`: a function of the marginals only.
    pub fn entropy_difference(dim_a: usize, dim_b: usize, base: EntropyBase) -> Self {
        Self::new(
            format!("entropy-difference[{dim_a}x{dim_b}]"),
            Domain::Bipartite { dim_a, dim_b },
            move |a, b| {
                let a = BipartiteState::new(a.clone(), dim_a, dim_b)?;
                let b = BipartiteState::new(b.clone(), dim_a, dim_b)?;
                Ok((entanglement_entropy(&a, base)? - entanglement_entropy(&b, base)?).abs())
            },
        )
    }

    pub fn measurement_l2(id: impl Into<String>, povm: Povm) -> Self {
        let id = id.into();
        let m = povm.clone();
        Self::new(format!("measurement-l2[{id}]"), Domain::Fixed(povm.dim()), move |a, b| {
            measurement_distance_l2(&m, a, b)
        })
        .with_context(MeasurementContext { id, povm })
    }

    pub fn measurement_l1(id: impl Into<String>, povm: Povm) -> Self {
        let id = id.into();
        let m = povm.clone();
        Self::new(format!("measurement-l1[{id}]"), Domain::Fixed(povm.dim()), move |a, b| {
            measurement_distance_l1(&m, a, b)
        })
        .with_context(MeasurementContext { id, povm })
    }

    /// `f(|⟨a|b⟩|)` without validating the profile. `claims_metric` records
    /// whether the caller asserts the metric axioms.
    pub fn from_profile_unchecked(p: OverlapProfile, claims_metric: bool) -> Self {
        let name = format!("profile[{}]", p.name());
        Self::new(name, Domain::Any, move |a, b| Ok(p.eval(overlap(a, b)?)))
            .claiming_metric(claims_metric)
    }

    pub fn constant_zero() -> Self {
        Self::new("zero", Domain::Any, |a, b| {
            crate::hilbert::inner_product(a, b)?;
            Ok(0.0)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn claims_metric(&self) -> bool {
        self.claims_metric
    }

    pub fn claims_additivity(&self) -> bool {
        self.claims_additivity
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn context(&self) -> Option<&MeasurementContext> {
        self.context.as_deref()
    }

    pub fn evaluate(&self, a: &StateVector, b: &StateVector) -> Result<f64> {
        let v = (self.eval)(a, b)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Candidate {
                candidate: self.name.clone(),
                axiom: "evaluation".into(),
                message: format!("returned {v}, expected a finite nonnegative value"),
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::super::distance_from_profile;
    use super::*;
    use crate::hilbert::haar_state;
    use crate::rng::SeededRng;

    #[test]
    fn profile_candidates_reproduce_closed_forms() {
        let fs = distance_from_profile(&OverlapProfile::arccos()).unwrap();
        let bures = distance_from_profile(&OverlapProfile::bures()).unwrap();
        let rng = &mut SeededRng::new(50);
        for k in 0..10_000 {
            let dim = 2 + k % 4;
            let a = haar_state(dim, rng).unwrap();
            let b = haar_state(dim, rng).unwrap();
            let x = fs.evaluate(&a, &b).unwrap();
            assert!((x - d_fs(&a, &b).unwrap()).abs() < 1e-12);
            let y = bures.evaluate(&a, &b).unwrap();
            assert!((y - d_bures(&a, &b).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_profiles_are_refused() {
        assert!(matches!(
            distance_from_profile(&OverlapProfile::linear()),
            Err(Error::ProfileViolation { .. })
        ));
    }

    #[test]
    fn candidates_are_symmetric() {
        let rng = &mut SeededRng::new(51);
        let cands = [
            DistanceCandidate::fubini_study(),
            DistanceCandidate::bures(),
            DistanceCandidate::trace_pure(),
            DistanceCandidate::hilbert(),
            DistanceCandidate::entanglement_aware(2, 2, EntropyBase::Natural),
            DistanceCandidate::measurement_l2("basis", Povm::computational_basis(4)),
        ];
        for c in &cands {
            for _ in 0..200 {
                let a = haar_state(4, rng).unwrap();
                let b = haar_state(4, rng).unwrap();
                let ab = c.evaluate(&a, &b).unwrap();
                let ba = c.evaluate(&b, &a).unwrap();
                assert!((ab - ba).abs() < 1e-12, "{}", c.name());
            }
        }
    }

    #[test]
    fn bipartite_candidate_rejects_wrong_dimension() {
        let c = DistanceCandidate::entanglement_aware(2, 2, EntropyBase::Natural);
        let a = StateVector::basis(3, 0).unwrap();
        assert!(c.evaluate(&a, &a).is_err());
    }
}
