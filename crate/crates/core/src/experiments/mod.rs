//! Reproducible experiment suites behind the `qmetric` command line tool.
//!
//! Every sweep is split into fixed-size chunks. Chunk `k` of a suite draws from
//! its own child stream, chunks run in parallel, and their tallies are merged
//! in chunk order, so output is identical for any worker count.

mod axioms;
mod concentration;
mod inequalities;
mod single;

pub use axioms::{cmd_axioms, resolve_candidate, write_report, CANDIDATE_HELP};
pub use concentration::{beta_mean_overlap, beta_tail, cmd_concentration, CONCENTRATION_EPSILONS};
pub use inequalities::cmd_inequalities;
pub use inequalities::balanced_factors;
pub use single::{cmd_discriminate, cmd_dist, cmd_qfi, DistanceKind, QfiFamily};

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hilbert::EntropyBase;
use crate::io::Real;
use crate::rng::SeededRng;

/// Slack on every inequality.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Samples per parallel work unit.
pub const CHUNK: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub entropy_base: EntropyBase,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidDimension("samples must be >= 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidDimension("dims must be nonempty".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(format!("dims must be >= 2, got {d}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    ReportOnly,
}

/// One statistic. Reals are written with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Stat {
    Real(f64),
    Count(u64),
    Text(String),
    Json(Value),
}

impl Serialize for Stat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Stat::Real(x) => Real(*x).serialize(s),
            Stat::Count(n) => n.serialize(s),
            Stat::Text(t) => t.serialize(s),
            Stat::Json(v) => v.serialize(s),
        }
    }
}

impl Stat {
    fn csv_value(&self) -> String {
        match self {
            Stat::Real(x) if x.is_finite() => format!("{x:.16e}"),
            Stat::Real(_) => String::new(),
            Stat::Count(n) => n.to_string(),
            Stat::Text(t) => t.clone(),
            Stat::Json(v) => v.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Stat::Real(x) => Some(*x),
            Stat::Count(n) => Some(*n as f64),
            _ => None,
        }
    }
}

impl From<f64> for Stat {
    fn from(x: f64) -> Self {
        Stat::Real(x)
    }
}

impl From<u64> for Stat {
    fn from(n: u64) -> Self {
        Stat::Count(n)
    }
}

impl From<usize> for Stat {
    fn from(n: usize) -> Self {
        Stat::Count(n as u64)
    }
}

impl From<&str> for Stat {
    fn from(t: &str) -> Self {
        Stat::Text(t.to_string())
    }
}

impl From<String> for Stat {
    fn from(t: String) -> Self {
        Stat::Text(t)
    }
}

impl From<Value> for Stat {
    fn from(v: Value) -> Self {
        Stat::Json(v)
    }
}

/// Where to find a violation again: the chunk seed regenerates the chunk and
/// `index` picks the sample inside it.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Reproduction {
    pub seed: u64,
    pub chunk: u64,
    pub chunk_seed: u64,
    pub index: u64,
    pub bound: String,
    pub lhs: Real,
    pub rhs: Real,
    pub witness: Value,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub parameters: BTreeMap<String, Stat>,
    pub statistics: BTreeMap<String, Stat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduction: Option<Reproduction>,
}

impl ExperimentRecord {
    pub fn new(experiment: impl Into<String>, dim: Option<usize>) -> Self {
        Self {
            experiment: experiment.into(),
            dim,
            parameters: BTreeMap::new(),
            statistics: BTreeMap::new(),
            claim: None,
            verdict: Verdict::ReportOnly,
            reproduction: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Stat>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn stat(&mut self, key: &str, value: impl Into<Stat>) {
        self.statistics.insert(key.to_string(), value.into());
    }

    pub fn claim(mut self, text: &str) -> Self {
        self.claim = Some(text.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.statistics.get(key).and_then(Stat::as_f64)
    }
}

/// Exit status for a set of records: 1 if any is inconsistent.
pub fn exit_code(records: &[ExperimentRecord]) -> i32 {
    i32::from(records.iter().any(|r| r.verdict == Verdict::Inconsistent))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a> {
    command: &'a str,
    rng: &'a str,
    config: &'a ExperimentConfig,
    records: &'a [ExperimentRecord],
}

/// Writes records as pretty JSON (with the run configuration) or as CSV rows
/// `experiment, dim, key, value, verdict`.
pub fn write_records<W: Write>(
    out: &mut W,
    format: OutputFormat,
    command: &str,
    config: &ExperimentConfig,
    records: &[ExperimentRecord],
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let env = Envelope {
                command,
                rng: crate::rng::ALGORITHM,
                config,
                records,
            };
            serde_json::to_writer_pretty(&mut *out, &env)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(["experiment", "dim", "key", "value", "verdict"]).map_err(csv_err)?;
            for r in records {
                let dim = r.dim.map(|d| d.to_string()).unwrap_or_default();
                let verdict = format!("{:?}", r.verdict);
                for (k, v) in &r.statistics {
                    w.write_record([r.experiment.as_str(), &dim, k, &v.csv_value(), &verdict])
                        .map_err(csv_err)?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Running record of one inequality `lhs ≤ rhs + slack`.
#[derive(Clone, Debug)]
pub(crate) struct Bound {
    pub name: &'static str,
    pub checks: u64,
    pub violations: u64,
    pub max_excess: f64,
    pub max_utilization: f64,
}

impl Bound {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            violations: 0,
            max_excess: f64::NEG_INFINITY,
            max_utilization: 0.0,
        }
    }

    fn merge(&mut self, other: &Bound) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.max_excess = self.max_excess.max(other.max_excess);
        self.max_utilization = self.max_utilization.max(other.max_utilization);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Violation {
    pub chunk: u64,
    pub chunk_seed: u64,
    pub index: u64,
    pub bound: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub witness: Value,
}

/// Per-chunk accumulator for a set of named inequalities.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    pub samples: u64,
    pub bounds: Vec<Bound>,
    pub first: Option<Violation>,
    chunk: u64,
    chunk_seed: u64,
    index: u64,
}

impl Tally {
    pub fn new(names: &[&'static str]) -> Self {
        Self {
            samples: 0,
            bounds: names.iter().map(|n| Bound::new(n)).collect(),
            first: None,
            chunk: 0,
            chunk_seed: 0,
            index: 0,
        }
    }

    /// Checks `lhs ≤ rhs + INEQUALITY_SLACK` for bound `k`.
    pub fn check(&mut self, k: usize, lhs: f64, rhs: f64, witness: impl FnOnce() -> Value) {
        let b = &mut self.bounds[k];
        b.checks += 1;
        let excess = lhs - rhs;
        b.max_excess = b.max_excess.max(excess);
        if rhs > 1e-12 {
            b.max_utilization = b.max_utilization.max(lhs / rhs);
        }
        if excess.is_nan() || excess > INEQUALITY_SLACK {
            b.violations += 1;
            if self.first.is_none() {
                self.first = Some(Violation {
                    chunk: self.chunk,
                    chunk_seed: self.chunk_seed,
                    index: self.index,
                    bound: b.name,
                    lhs,
                    rhs,
                    witness: witness(),
                });
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.samples += other.samples;
        for (a, b) in self.bounds.iter_mut().zip(&other.bounds) {
            a.merge(b);
        }
        if self.first.is_none() {
            self.first = other.first;
        }
    }

    pub fn violations(&self) -> u64 {
        self.bounds.iter().map(|b| b.violations).sum()
    }

    /// Fills an inequality record: counts, worst excess and utilization per
    /// bound, verdict, and a reproduction for the first violation.
    pub fn into_record(self, mut record: ExperimentRecord, seed: u64) -> ExperimentRecord {
        record.stat("samples", self.samples);
        record.stat("violations", self.violations());
        for b in &self.bounds {
            record.stat(&format!("{}.checks", b.name), b.checks);
            record.stat(&format!("{}.violations", b.name), b.violations);
            record.stat(&format!("{}.maxExcess", b.name), b.max_excess);
            record.stat(&format!("{}.maxUtilization", b.name), b.max_utilization);
        }
        record.verdict = if self.violations() == 0 {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        };
        record.reproduction = self.first.map(|v| Reproduction {
            seed,
            chunk: v.chunk,
            chunk_seed: v.chunk_seed,
            index: v.index,
            bound: v.bound.to_string(),
            lhs: Real(v.lhs),
            rhs: Real(v.rhs),
            witness: v.witness,
        });
        record
    }
}

/// Runs `n` samples of `body` in chunks of `chunk`. Chunk `k` uses
/// `rng.child(k)`; tallies are merged in chunk order.
pub(crate) fn sweep<F>(rng: &SeededRng, n: usize, chunk: usize, names: &[&'static str], body: F) -> Result<Tally>
where
    F: Fn(&mut SeededRng, &mut Tally) -> Result<()> + Sync,
{
    let chunks = n.div_ceil(chunk);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.child(k as u64);
            let mut t = Tally::new(names);
            t.chunk = k as u64;
            t.chunk_seed = r.seed();
            let len = chunk.min(n - k * chunk);
            for i in 0..len {
                t.index = i as u64;
                body(&mut r, &mut t)?;
                t.samples += 1;
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Tally::new(names);
    for p in parts {
        total.merge(p);
    }
    Ok(total)
}

/// Like [`sweep`] for plain accumulators: chunk results are folded in order.
pub(crate) fn sweep_with<T, F, M>(rng: &SeededRng, n: usize, init: T, body: F, merge: M) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(&mut SeededRng, &mut T) -> Result<()> + Sync,
    M: Fn(&mut T, T),
{
    let chunks = n.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.child(k as u64);
            let mut acc = init.clone();
            for _ in 0..CHUNK.min(n - k * CHUNK) {
                body(&mut r, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = init;
    for p in parts {
        merge(&mut total, p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_independent_of_thread_count() {
        let run = || {
            sweep(&SeededRng::new(3), 2500, CHUNK, &["x"], |r, t| {
                let x = r.uniform(0.0, 1.0);
                t.check(0, x, 0.999, || Value::from(x));
                Ok(())
            })
            .unwrap()
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a.samples, 2500);
        assert_eq!(a.bounds[0].violations, b.bounds[0].violations);
        assert_eq!(a.bounds[0].max_excess.to_bits(), b.bounds[0].max_excess.to_bits());
        assert!(a.bounds[0].violations > 0);
        let v = a.first.unwrap();
        assert_eq!(v.chunk, 0);
        // Replay the first violation from its chunk seed and index.
        let mut r = SeededRng::new(v.chunk_seed);
        let x = (0..=v.index).map(|_| r.uniform(0.0, 1.0)).last().unwrap();
        assert_eq!(x, v.lhs);
    }

    #[test]
    fn nan_counts_as_violation() {
        let mut t = Tally::new(&["x"]);
        t.check(0, f64::NAN, 1.0, || Value::Null);
        assert_eq!(t.violations(), 1);
    }

    #[test]
    fn csv_rows_per_statistic() {
        let mut r = ExperimentRecord::new("demo", Some(4));
        r.stat("a", 1.5);
        r.stat("n", 3usize);
        r.verdict = Verdict::Consistent;
        let cfg = ExperimentConfig {
            seed: 1,
            dims: vec![4],
            samples: 1,
            entropy_base: EntropyBase::Natural,
        };
        let mut buf = Vec::new();
        write_records(&mut buf, OutputFormat::Csv, "demo", &cfg, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "experiment,dim,key,value,verdict\ndemo,4,a,1.5000000000000000e0,Consistent\ndemo,4,n,3,Consistent\n"
        );
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig {
            seed: 0,
            dims: vec![2, 3],
            samples: 10,
            entropy_base: EntropyBase::Two,
        };
        assert!(ok.validate().is_ok());
        assert!(ExperimentConfig { samples: 0, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { dims: vec![], ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { dims: vec![1], ..ok }.validate().is_err());
    }
}
