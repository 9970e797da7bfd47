//! Candidate lookup for the `axioms` command.

use std::io::Write;
use std::path::Path;

use super::OutputFormat;
use crate::error::{Error, Result};
use crate::harness::{run_conformance, ConformanceConfig, ConformanceReport};
use crate::hilbert::EntropyBase;
use crate::io::{read_povm, read_profile_table};
use crate::metrics::{distance_from_profile, DistanceCandidate};

/// Names accepted by [`resolve_candidate`].
pub const CANDIDATE_HELP: &str = "fs, bures, trace, hilbert, zero, scaled-fs:<c>, entanglement, \
entropy-difference, measurement:<povm.json>, measurement-l1:<povm.json>, profile:<table.json>";

/// Builds a candidate from its command-line name. `factors` is the tensor
/// factorization used by the bipartite candidates.
pub fn resolve_candidate(name: &str, factors: (usize, usize), base: EntropyBase) -> Result<DistanceCandidate> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let need = |what: &str| {
        arg.filter(|a| !a.is_empty())
            .ok_or_else(|| Error::parse("candidate", format!("'{head}' needs {what} after ':'")))
    };
    let (da, db) = factors;
    Ok(match head {
        "fs" => DistanceCandidate::fubini_study(),
        "bures" => DistanceCandidate::bures(),
        "trace" => DistanceCandidate::trace_pure(),
        "hilbert" => DistanceCandidate::hilbert(),
        "zero" => DistanceCandidate::constant_zero(),
        "scaled-fs" => {
            let c: f64 = need("a scale")?
                .parse()
                .map_err(|_| Error::parse("candidate", "scale must be a number"))?;
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::parse("candidate", "scale must be positive"));
            }
            DistanceCandidate::scaled_fubini_study(c)
        }
        "entanglement" => DistanceCandidate::entanglement_aware(da, db, base),
        "entropy-difference" => DistanceCandidate::entropy_difference(da, db, base),
        "measurement" | "measurement-l2" => {
            let path = need("a POVM file")?;
            DistanceCandidate::measurement_l2(path, read_povm(Path::new(path))?)
        }
        "measurement-l1" => {
            let path = need("a POVM file")?;
            DistanceCandidate::measurement_l1(path, read_povm(Path::new(path))?)
        }
        "profile" => distance_from_profile(&read_profile_table(Path::new(need("a table file")?))?)?,
        _ => {
            return Err(Error::parse(
                "candidate",
                format!("unknown candidate '{name}' (expected one of: {CANDIDATE_HELP})"),
            ))
        }
    })
}

/// Runs the conformance harness on a named candidate.
pub fn cmd_axioms(name: &str, factors: (usize, usize), base: EntropyBase, config: &ConformanceConfig) -> Result<ConformanceReport> {
    run_conformance(&resolve_candidate(name, factors, base)?, config)
}

/// Writes a report as pretty JSON or as CSV rows
/// `experiment, dim, key, value, verdict` with one row per verdict field.
pub fn write_report<W: Write>(out: &mut W, format: OutputFormat, report: &ConformanceReport) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(["experiment", "dim", "key", "value", "verdict"]).map_err(csv_err)?;
            let experiment = format!("axioms.{}", report.candidate);
            for v in &report.verdicts {
                let key = match &v.variant {
                    Some(var) => format!("{:?}.{var}", v.axiom),
                    None => format!("{:?}", v.axiom),
                };
                let status = format!("{:?}", v.status);
                for (k, val) in [
                    ("trials", v.trials.to_string()),
                    ("maxViolation", format!("{:.16e}", v.max_violation)),
                ] {
                    w.write_record([experiment.as_str(), "", &format!("{key}.{k}"), &val, &status])
                        .map_err(csv_err)?;
                }
            }
            let flags: Vec<String> = report.flags.iter().map(|f| format!("{f:?}")).collect();
            let verdict = if report.claims_met() { "ClaimsMet" } else { "ClaimsUnmet" };
            w.write_record([experiment.as_str(), "", "flags", &flags.join(";"), verdict])
                .map_err(csv_err)?;
            w.flush()?;
        }
    }
    Ok(())
}
