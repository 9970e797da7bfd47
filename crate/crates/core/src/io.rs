//! JSON file formats for states, POVMs and overlap-profile tables.
//!
//! ```text
//! state: {"dim": 4, "amplitudes": [[re, im], ...], "dimA": 2, "dimB": 2}
//! povm:  {"dim": 2, "effects": [[[[re, im], ...], ...], ...]}
//! table: {"name": "...", "samples": [[r, f], ...]}
//! ```
//!
//! Reals are written with 17 significant digits so every double round-trips.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hilbert::{BipartiteState, StateVector, C64};
use crate::metrics::{OverlapProfile, Povm};

/// A double that serializes with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Real)
    }
}

fn complex_to_json(z: &C64) -> [Real; 2] {
    [Real(z.re), Real(z.im)]
}

fn complex_from_json(p: &[Real; 2]) -> C64 {
    C64::new(p[0].0, p[1].0)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub dim: usize,
    pub amplitudes: Vec<[Real; 2]>,
    #[serde(rename = "dimA", skip_serializing_if = "Option::is_none", default)]
    pub dim_a: Option<usize>,
    #[serde(rename = "dimB", skip_serializing_if = "Option::is_none", default)]
    pub dim_b: Option<usize>,
}

impl StateJson {
    pub fn from_state(s: &StateVector) -> Self {
        Self {
            dim: s.dim(),
            amplitudes: s.amplitudes().iter().map(complex_to_json).collect(),
            dim_a: None,
            dim_b: None,
        }
    }

    pub fn from_bipartite(s: &BipartiteState) -> Self {
        Self {
            dim_a: Some(s.dim_a()),
            dim_b: Some(s.dim_b()),
            ..Self::from_state(s.state())
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        self.to_state_at("state")
    }

    fn to_state_at(&self, location: &str) -> Result<StateVector> {
        if self.amplitudes.len() != self.dim {
            return Err(Error::parse(
                format!("{location}.amplitudes"),
                format!("expected {} entries, found {}", self.dim, self.amplitudes.len()),
            ));
        }
        let amps = DVector::from_iterator(self.dim, self.amplitudes.iter().map(complex_from_json));
        StateVector::new(amps).map_err(|e| Error::parse(format!("{location}.amplitudes"), e.to_string()))
    }

    /// The factorization, if both `dimA` and `dimB` are present.
    pub fn to_bipartite(&self) -> Result<Option<BipartiteState>> {
        match (self.dim_a, self.dim_b) {
            (Some(a), Some(b)) => Ok(Some(
                BipartiteState::new(self.to_state()?, a, b)
                    .map_err(|e| Error::parse("state.dimA/dimB", e.to_string()))?,
            )),
            (None, None) => Ok(None),
            _ => Err(Error::parse("state", "dimA and dimB must be given together")),
        }
    }
}

pub type MatrixJson = Vec<Vec<[Real; 2]>>;

pub fn matrix_to_json(m: &DMatrix<C64>) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_json(&m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson, dim: usize, location: &str) -> Result<DMatrix<C64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::parse(location, format!("expected a {dim}x{dim} matrix")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| complex_from_json(&rows[i][j])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub effects: Vec<MatrixJson>,
}

impl PovmJson {
    pub fn from_povm(m: &Povm) -> Self {
        Self {
            dim: m.dim(),
            effects: m.effects().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let effects = self
            .effects
            .iter()
            .enumerate()
            .map(|(k, e)| matrix_from_json(e, self.dim, &format!("povm.effects[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(effects).map_err(|e| Error::parse("povm.effects", e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileTableJson {
    pub name: String,
    pub samples: Vec<[f64; 2]>,
}

impl ProfileTableJson {
    pub fn to_profile(&self) -> Result<OverlapProfile> {
        OverlapProfile::from_table(
            self.name.clone(),
            self.samples.iter().map(|p| (p[0], p[1])).collect(),
        )
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::parse(
            format!("{}:{}:{}", path.display(), e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// Reads a state file; errors carry the file and field location.
pub fn read_state(path: &Path) -> Result<StateJson> {
    let json: StateJson = read_json(path)?;
    json.to_state_at(&path.display().to_string())?;
    Ok(json)
}

pub fn read_povm(path: &Path) -> Result<Povm> {
    read_json::<PovmJson>(path)?
        .to_povm()
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

pub fn read_profile_table(path: &Path) -> Result<OverlapProfile> {
    read_json::<ProfileTableJson>(path)?.to_profile()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
