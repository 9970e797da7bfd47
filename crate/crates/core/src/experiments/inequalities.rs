//! Inequality sweeps over Haar-random pairs and triples.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::DVector;
use serde_json::Value;

use super::{sweep, sweep_with, ExperimentConfig, ExperimentRecord, Tally, Verdict, CHUNK, INEQUALITY_SLACK};
use crate::error::Result;
use crate::hilbert::{
    entropy_of_subsystem, haar_state, overlap, partial_trace, tensor_product, BipartiteState,
    StateVector, Subsystem, C64,
};
use crate::io::StateJson;
use crate::metrics::{
    complementarity, d_bures, d_entanglement_aware, d_fs, d_hilbert, d_trace_pure, fidelity,
    measurement_distance_l1, Povm,
};
use crate::operational::helstrom;
use crate::rng::SeededRng;

/// POVMs per chunk in the measurement suite.
const POVM_CHUNK: usize = 10;
/// Pairs evaluated per random POVM.
const PAIRS_PER_POVM: usize = 100;

fn witness(states: &[(&str, &StateVector)]) -> Value {
    Value::Object(
        states
            .iter()
            .map(|(k, s)| (k.to_string(), serde_json::to_value(StateJson::from_state(s)).unwrap_or_default()))
            .collect(),
    )
}

fn bipartite_witness(states: &[(&str, &BipartiteState)]) -> Value {
    Value::Object(
        states
            .iter()
            .map(|(k, s)| (k.to_string(), serde_json::to_value(StateJson::from_bipartite(s)).unwrap_or_default()))
            .collect(),
    )
}

/// Most balanced factorization `d = a·b` with `2 ≤ a ≤ b`, if any.
pub fn balanced_factors(d: usize) -> Option<(usize, usize)> {
    (2..=d).take_while(|a| a * a <= d).filter(|a| d.is_multiple_of(*a)).last().map(|a| (a, d / a))
}

/// A bipartite state drawn from one of three families: Haar, product of Haar
/// factors, or a product state perturbed toward a Haar state. The mix covers
/// the whole entropy range.
pub(crate) fn bipartite_sample(da: usize, db: usize, rng: &mut SeededRng) -> Result<BipartiteState> {
    match rng.range_inclusive(0, 2) {
        0 => BipartiteState::new(haar_state(da * db, rng)?, da, db),
        1 => tensor_product(&haar_state(da, rng)?, &haar_state(db, rng)?),
        _ => {
            let p = tensor_product(&haar_state(da, rng)?, &haar_state(db, rng)?)?;
            let h = haar_state(da * db, rng)?;
            let x = rng.uniform(0.0, 1.0);
            let v = p.state().amplitudes() + h.amplitudes() * C64::new(x, 0.0);
            BipartiteState::new(StateVector::normalized(v)?, da, db)
        }
    }
}

/// Three points on a random geodesic, in order.
fn geodesic_triple(d: usize, rng: &mut SeededRng) -> Result<[StateVector; 3]> {
    let e0 = haar_state(d, rng)?.into_amplitudes();
    let mut e1 = haar_state(d, rng)?.into_amplitudes();
    for _ in 0..2 {
        let z = e0.dotc(&e1);
        e1 -= &e0 * z;
    }
    let e1 = StateVector::normalized(e1)?.into_amplitudes();
    let t1 = rng.uniform(0.0, FRAC_PI_2);
    let t2 = t1 + rng.uniform(0.0, FRAC_PI_2 - t1);
    let at = |t: f64| -> Result<StateVector> {
        StateVector::normalized(&e0 * C64::new(t.cos(), 0.0) + &e1 * C64::new(t.sin(), 0.0))
    };
    Ok([at(0.0)?, at(t1)?, at(t2)?])
}

/// Haar triple on odd draws, geodesic triple on even ones.
fn triple(d: usize, rng: &mut SeededRng) -> Result<[StateVector; 3]> {
    if d >= 2 && rng.range_inclusive(0, 1) == 0 {
        geodesic_triple(d, rng)
    } else {
        Ok([haar_state(d, rng)?, haar_state(d, rng)?, haar_state(d, rng)?])
    }
}

/// Checks all three orientations of the triangle inequality from the three
/// pairwise values `[d(x,y), d(y,z), d(z,x)]`.
fn check_triangle(t: &mut Tally, d: [f64; 3], w: impl Fn() -> Value) {
    t.check(0, d[0], d[1] + d[2], &w);
    t.check(0, d[1], d[2] + d[0], &w);
    t.check(0, d[2], d[0] + d[1], &w);
}

fn binary_entropy(t: f64) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    h(t) + h(1.0 - t)
}

struct Suites<'a> {
    config: &'a ExperimentConfig,
    root: SeededRng,
}

impl Suites<'_> {
    fn rng(&self, suite: u64, dim_index: usize) -> SeededRng {
        self.root.child(suite).child(dim_index as u64)
    }

    fn record(&self, name: &str, dim: usize, claim: &str) -> ExperimentRecord {
        ExperimentRecord::new(format!("inequality.{name}"), Some(dim))
            .param("slack", INEQUALITY_SLACK)
            .claim(claim)
    }

    fn comparison(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let names = ["bures<=fs", "fs<=(pi/2)sqrt(1-r)", "(2/pi)fs<=bures", "sqrt(2(1-r))<=fs"];
        let t = sweep(&self.rng(0, j), self.config.samples, CHUNK, &names, |rng, t| {
            let (a, b) = (haar_state(d, rng)?, haar_state(d, rng)?);
            let (fs, bures, r) = (d_fs(&a, &b)?, d_bures(&a, &b)?, overlap(&a, &b)?);
            let w = || witness(&[("a", &a), ("b", &b)]);
            t.check(0, bures, fs, w);
            t.check(1, fs, FRAC_PI_2 * (1.0 - r).max(0.0).sqrt(), w);
            t.check(2, 2.0 / PI * fs, bures, w);
            t.check(3, (2.0 * (1.0 - r)).max(0.0).sqrt(), fs, w);
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("comparison_sandwich", d, "sqrt(2(1-r)) <= d_fs <= (pi/2) sqrt(1-r) and (2/pi) d_fs <= d_bures <= d_fs"),
            self.config.seed,
        ))
    }

    fn fuchs_van_de_graaf(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let names = ["1-sqrt(F)<=trace", "trace<=sqrt(1-F)"];
        let t = sweep(&self.rng(1, j), self.config.samples, CHUNK, &names, |rng, t| {
            let (a, b) = (haar_state(d, rng)?, haar_state(d, rng)?);
            let (f, tr) = (fidelity(&a, &b)?, d_trace_pure(&a, &b)?);
            let w = || witness(&[("a", &a), ("b", &b)]);
            t.check(0, 1.0 - f.sqrt(), tr, w);
            t.check(1, tr, (1.0 - f).max(0.0).sqrt(), w);
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("fuchs_van_de_graaf", d, "1 - sqrt(F) <= d_trace <= sqrt(1 - F)"),
            self.config.seed,
        ))
    }

    fn measurement_l1(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let povms = (self.config.samples / PAIRS_PER_POVM).max(1);
        let names = ["l1<=2sin(fs)"];
        let t = sweep(&self.rng(2, j), povms, POVM_CHUNK, &names, |rng, t| {
            let k = rng.range_inclusive(2, (2 * d).min(8));
            let m = Povm::random(d, k, rng)?;
            for _ in 0..PAIRS_PER_POVM {
                let (a, b) = (haar_state(d, rng)?, haar_state(d, rng)?);
                let l1 = measurement_distance_l1(&m, &a, &b)?;
                t.check(0, l1, 2.0 * d_fs(&a, &b)?.sin(), || {
                    let mut w = witness(&[("a", &a), ("b", &b)]);
                    w["povm"] = serde_json::to_value(crate::io::PovmJson::from_povm(&m)).unwrap_or_default();
                    w
                });
            }
            Ok(())
        })?;
        let mut r = t.into_record(
            self.record("measurement_l1", d, "sum_m |p_m - q_m| <= 2 sin d_fs for every POVM")
                .param("povms", povms)
                .param("pairsPerPovm", PAIRS_PER_POVM),
            self.config.seed,
        );
        r.statistics.remove("samples");
        r.stat("povms", povms);
        Ok(r)
    }

    fn amplitude_moduli(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let names = ["moduliL2<=hilbert"];
        let t = sweep(&self.rng(3, j), self.config.samples, CHUNK, &names, |rng, t| {
            let (a, b) = (haar_state(d, rng)?, haar_state(d, rng)?);
            let moduli: f64 = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes().iter())
                .map(|(x, y)| (x.norm() - y.norm()).powi(2))
                .sum::<f64>()
                .sqrt();
            t.check(0, moduli, d_hilbert(&a, &b)?, || witness(&[("a", &a), ("b", &b)]));
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("amplitude_moduli_l2", d, "sqrt(sum_i (|a_i| - |b_i|)^2) <= ||a - b||"),
            self.config.seed,
        ))
    }

    fn bures_helstrom(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let names = ["bures<=sqrt(2)sqrt(l1)", "l1<=2sin(fs)", "2sin(fs)<=l1"];
        let t = sweep(&self.rng(4, j), self.config.samples, CHUNK, &names, |rng, t| {
            let (a, b) = (haar_state(d, rng)?, haar_state(d, rng)?);
            let m = helstrom(&a, &b)?.optimal_povm;
            let l1 = measurement_distance_l1(&m, &a, &b)?;
            let target = 2.0 * d_fs(&a, &b)?.sin();
            let w = || witness(&[("a", &a), ("b", &b)]);
            t.check(0, d_bures(&a, &b)?, SQRT_2 * l1.sqrt(), w);
            t.check(1, l1, target, w);
            t.check(2, target, l1, w);
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("bures_helstrom", d, "with the Helstrom POVM: L1 = 2 sin d_fs and d_bures <= sqrt(2) sqrt(L1)"),
            self.config.seed,
        ))
    }

    fn multiplicative_fidelity(&self, j: usize, d: usize) -> Result<ExperimentRecord> {
        let names = ["multiplicative"];
        let t = sweep(&self.rng(5, j), self.config.samples, CHUNK, &names, |rng, t| {
            let [x, y, z] = triple(d, rng)?;
            let (fxy, fyz, fxz) = (fidelity(&x, &y)?, fidelity(&y, &z)?, fidelity(&x, &z)?);
            let rhs = (fxy * fyz).sqrt() - ((1.0 - fxy).max(0.0) * (1.0 - fyz).max(0.0)).sqrt();
            t.check(0, rhs, fxz.sqrt(), || witness(&[("psi", &x), ("phi", &y), ("chi", &z)]));
            Ok(())
        })?;
        Ok(t.into_record(
            self.record(
                "multiplicative_fidelity",
                d,
                "sqrt F(psi,chi) >= sqrt(F(psi,phi) F(phi,chi)) - sqrt((1 - F(psi,phi))(1 - F(phi,chi)))",
            ),
            self.config.seed,
        ))
    }

    fn triangle<F>(&self, suite: u64, name: &str, j: usize, d: usize, dist: F) -> Result<ExperimentRecord>
    where
        F: Fn(&StateVector, &StateVector) -> Result<f64> + Sync,
    {
        let t = sweep(&self.rng(suite, j), self.config.samples, CHUNK, &["triangle"], |rng, t| {
            let [x, y, z] = triple(d, rng)?;
            let v = [dist(&x, &y)?, dist(&y, &z)?, dist(&z, &x)?];
            check_triangle(t, v, || witness(&[("x", &x), ("y", &y), ("z", &z)]));
            Ok(())
        })?;
        Ok(t.into_record(
            self.record(&format!("triangle_{name}"), d, &format!("d_{name}(x,z) <= d_{name}(x,y) + d_{name}(y,z)")),
            self.config.seed,
        ))
    }

    fn entanglement_sandwich(&self, j: usize, (da, db): (usize, usize)) -> Result<ExperimentRecord> {
        let base = self.config.entropy_base;
        let names = ["fs<=dE", "dE<=fs+|dE|"];
        let t = sweep(&self.rng(8, j), self.config.samples, CHUNK, &names, |rng, t| {
            let (a, b) = (bipartite_sample(da, db, rng)?, bipartite_sample(da, db, rng)?);
            let fs = d_fs(a.state(), b.state())?;
            let de = d_entanglement_aware(&a, &b, base)?;
            let gap = (crate::hilbert::entanglement_entropy(&a, base)?
                - crate::hilbert::entanglement_entropy(&b, base)?)
                .abs();
            let w = || bipartite_witness(&[("a", &a), ("b", &b)]);
            t.check(0, fs, de, w);
            t.check(1, de, fs + gap, w);
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("entanglement_sandwich", da * db, "d_fs <= d_E <= d_fs + |E(a) - E(b)|")
                .param("dimA", da)
                .param("dimB", db)
                .param("entropyBase", base.label()),
            self.config.seed,
        ))
    }

    fn triangle_entanglement(&self, j: usize, (da, db): (usize, usize)) -> Result<ExperimentRecord> {
        let base = self.config.entropy_base;
        let t = sweep(&self.rng(9, j), self.config.samples, CHUNK, &["triangle"], |rng, t| {
            let x = bipartite_sample(da, db, rng)?;
            let y = bipartite_sample(da, db, rng)?;
            let z = bipartite_sample(da, db, rng)?;
            let v = [
                d_entanglement_aware(&x, &y, base)?,
                d_entanglement_aware(&y, &z, base)?,
                d_entanglement_aware(&z, &x, base)?,
            ];
            check_triangle(t, v, || bipartite_witness(&[("x", &x), ("y", &y), ("z", &z)]));
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("triangle_E", da * db, "d_E(x,z) <= d_E(x,y) + d_E(y,z)")
                .param("dimA", da)
                .param("dimB", db)
                .param("entropyBase", base.label()),
            self.config.seed,
        ))
    }

    /// `|E(a) − E(b)| ≤ T ln(d − 1) + h(T)` on the smaller subsystem, with half
    /// the pairs at a random small separation.
    fn fannes_audenaert(&self, j: usize, (da, db): (usize, usize)) -> Result<ExperimentRecord> {
        let base = self.config.entropy_base;
        let keep = if da <= db { Subsystem::A } else { Subsystem::B };
        let d = da.min(db);
        let n = (self.config.samples / 10).max(1);
        let t = sweep(&self.rng(10, j), n, CHUNK, &["fannes_audenaert"], |rng, t| {
            let a = bipartite_sample(da, db, rng)?;
            let b = if rng.range_inclusive(0, 1) == 0 {
                bipartite_sample(da, db, rng)?
            } else {
                let eps = 10f64.powf(rng.uniform(-4.0, 0.0));
                let g: DVector<C64> = haar_state(da * db, rng)?.into_amplitudes();
                let v = a.state().amplitudes() + g * C64::new(eps, 0.0);
                BipartiteState::new(StateVector::normalized(v)?, da, db)?
            };
            let tr = partial_trace(&a, keep)?.trace_distance(&partial_trace(&b, keep)?)?.min(1.0);
            let lhs = (entropy_of_subsystem(&a, keep, base)? - entropy_of_subsystem(&b, keep, base)?).abs();
            let rhs = (tr * ((d - 1) as f64).ln() + binary_entropy(tr)) / base.ln_base();
            t.check(0, lhs, rhs, || bipartite_witness(&[("a", &a), ("b", &b)]));
            Ok(())
        })?;
        Ok(t.into_record(
            self.record("fannes_audenaert", da * db, "|E(a) - E(b)| <= T log(d - 1) + h(T), T = trace distance of the marginals")
                .param("dimA", da)
                .param("dimB", db)
                .param("entropyBase", base.label()),
            self.config.seed,
        ))
    }

    /// Smallest `d_fs² + (|ΔE|/ln 2)²` against Φ⁺ over random two-qubit states.
    fn complementarity_floor(&self) -> Result<ExperimentRecord> {
        let phi = BipartiteState::maximally_entangled(2)?;
        let n = (self.config.samples / 10).max(1);
        let init: (f64, Option<BipartiteState>) = (f64::INFINITY, None);
        let (floor, arg) = sweep_with(
            &self.root.child(11),
            n,
            init,
            |rng, acc| {
                let s = bipartite_sample(2, 2, rng)?;
                let v = complementarity(&s, &phi)?;
                if v < acc.0 {
                    *acc = (v, Some(s));
                }
                Ok(())
            },
            |acc, part| {
                if part.0 < acc.0 {
                    *acc = part;
                }
            },
        )?;
        let mut r = ExperimentRecord::new("complementarity_floor", Some(4))
            .param("reference", "phi+")
            .claim("d_fs^2 + (|dE| / log 2)^2 stays above a positive constant depending only on the reference");
        r.stat("samples", n);
        r.stat("floor", floor);
        if let Some(s) = arg {
            r.stat("argmin", serde_json::to_value(StateJson::from_bipartite(&s))?);
        }
        r.verdict = Verdict::ReportOnly;
        Ok(r)
    }

    fn tightness(&self) -> Result<Vec<ExperimentRecord>> {
        let pair = |r: f64| -> Result<(StateVector, StateVector)> {
            Ok((
                StateVector::basis(2, 0)?,
                StateVector::from_real(&[r, (1.0 - r * r).sqrt()])?,
            ))
        };
        let r1 = 1.0 - 1e-6;
        let (a, b) = pair(r1)?;
        let ratio1 = d_fs(&a, &b)? / (2.0 * (1.0 - r1)).sqrt();
        let mut near = ExperimentRecord::new("tightness.r_to_1", Some(2))
            .param("r", r1)
            .param("tolerance", 1e-3)
            .claim("d_fs / sqrt(2(1 - r)) -> 1 as r -> 1");
        near.stat("ratio", ratio1);
        near.stat("expected", 1.0);
        near.verdict = if (ratio1 - 1.0).abs() <= 1e-3 { Verdict::Consistent } else { Verdict::Inconsistent };

        let r0 = 1e-9;
        let (a, b) = pair(r0)?;
        let ratio0 = d_bures(&a, &b)? / d_fs(&a, &b)?;
        let limit = 2.0 * SQRT_2 / PI;
        let mut far = ExperimentRecord::new("tightness.r_to_0", Some(2))
            .param("r", r0)
            .param("tolerance", 1e-6)
            .claim("d_bures / d_fs -> 2 sqrt(2) / pi as r -> 0");
        far.stat("ratio", ratio0);
        far.stat("expected", limit);
        far.verdict = if (ratio0 - limit).abs() <= 1e-6 { Verdict::Consistent } else { Verdict::Inconsistent };
        Ok(vec![near, far])
    }
}

/// All inequality suites for every configured dimension, plus the
/// complementarity floor and the tightness probes.
///
/// Bipartite suites run on the most balanced factorization of each dimension
/// and are skipped for primes.
pub fn cmd_inequalities(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let s = Suites {
        config,
        root: SeededRng::new(config.seed),
    };
    let mut out = Vec::new();
    for (j, &d) in config.dims.iter().enumerate() {
        out.push(s.comparison(j, d)?);
        out.push(s.fuchs_van_de_graaf(j, d)?);
        out.push(s.measurement_l1(j, d)?);
        out.push(s.amplitude_moduli(j, d)?);
        out.push(s.bures_helstrom(j, d)?);
        out.push(s.multiplicative_fidelity(j, d)?);
        out.push(s.triangle(6, "fs", j, d, d_fs)?);
        out.push(s.triangle(7, "bures", j, d, d_bures)?);
        if let Some(f) = balanced_factors(d) {
            out.push(s.entanglement_sandwich(j, f)?);
            out.push(s.triangle_entanglement(j, f)?);
            out.push(s.fannes_audenaert(j, f)?);
        }
    }
    out.push(s.complementarity_floor()?);
    out.extend(s.tightness()?);
    Ok(out)
}
