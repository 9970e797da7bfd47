//! Overlap profiles `f: [0, 1] → ℝ≥0`, inducing ray distances `f(|⟨a|b⟩|)`.
//!
//! A profile yields a metric exactly when `f(1) = 0`, `f` is strictly
//! decreasing, and `g(θ) = f(cos θ)` is subadditive on `θ₁ + θ₂ ≤ π/2`. The
//! checks here run on finite grids.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use super::candidate::DistanceCandidate;
use crate::error::{Error, Result};

/// Grid size for the monotonicity check on `[0, 1]`.
pub const MONOTONE_GRID: usize = 1000;
/// Grid size per axis for the subadditivity check on `[0, π/2]`.
pub const SUBADDITIVE_GRID: usize = 200;
/// Slack for the subadditivity check.
pub const SUBADDITIVE_SLACK: f64 = 1e-9;

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct OverlapProfile {
    name: String,
    f: Arc<ProfileFn>,
}

impl fmt::Debug for OverlapProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OverlapProfile").field("name", &self.name).finish()
    }
}

impl OverlapProfile {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `c · arccos r`: the Fubini–Study distance scaled by `c`.
    pub fn scaled_arccos(c: f64) -> Self {
        let name = if c == 1.0 { "arccos".to_string() } else { format!("{c}*arccos") };
        Self::new(name, move |r| c * r.clamp(0.0, 1.0).acos())
    }

    pub fn arccos() -> Self {
        Self::scaled_arccos(1.0)
    }

    /// `sqrt(2(1 − r))`.
    pub fn bures() -> Self {
        Self::new("bures", |r| (2.0 * (1.0 - r)).max(0.0).sqrt())
    }

    /// `1 − r`.
    pub fn linear() -> Self {
        Self::new("linear", |r| 1.0 - r)
    }

    /// `(1 − r)²`.
    pub fn squared_linear() -> Self {
        Self::new("squared-linear", |r| (1.0 - r) * (1.0 - r))
    }

    /// Profile from `(r, f)` samples covering `[0, 1]`, interpolated linearly
    /// in the angle `θ = arccos r`. Interpolating in angle keeps a concave
    /// `g(θ)` concave, so tables of valid profiles stay valid.
    pub fn from_table(name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let name = name.into();
        if points.len() < 2 {
            return Err(Error::ProfileViolation {
                profile: name,
                condition: "table needs at least two samples".into(),
                witness: vec![],
            });
        }
        let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if lo > 0.0 || hi < 1.0 || points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::ProfileViolation {
                profile: name,
                condition: "table must cover [0, 1] with finite values".into(),
                witness: vec![lo, hi],
            });
        }
        let mut nodes: Vec<(f64, f64)> = points
            .into_iter()
            .map(|(r, f)| (r.clamp(0.0, 1.0).acos(), f))
            .collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::new(name, move |r| {
            let t = r.clamp(0.0, 1.0).acos();
            let k = nodes.partition_point(|p| p.0 < t);
            if k == 0 {
                return nodes[0].1;
            }
            if k == nodes.len() {
                return nodes[k - 1].1;
            }
            let (t0, f0) = nodes[k - 1];
            let (t1, f1) = nodes[k];
            if t1 == t0 {
                f1
            } else {
                f0 + (f1 - f0) * (t - t0) / (t1 - t0)
            }
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    /// `g(θ) = f(cos θ)`.
    pub fn angular(&self, theta: f64) -> f64 {
        self.eval(theta.cos().clamp(0.0, 1.0))
    }

    fn violation(&self, condition: &str, witness: Vec<f64>) -> Error {
        Error::ProfileViolation {
            profile: self.name.clone(),
            condition: condition.into(),
            witness,
        }
    }

    /// Checks `f(1) = 0`, positivity and strict decrease on the `[0, 1]` grid,
    /// and subadditivity of `g` on the angle grid.
    pub fn validate(&self) -> Result<()> {
        let f1 = self.eval(1.0);
        if f1.abs() > 1e-12 {
            return Err(self.violation("f(1) = 0", vec![1.0, f1]));
        }
        let n = MONOTONE_GRID;
        let grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&r| self.eval(r)).collect();
        for (k, (&r, &v)) in grid.iter().zip(&values).enumerate() {
            if !v.is_finite() {
                return Err(self.violation("finite values", vec![r, v]));
            }
            if k + 1 < n {
                if v <= 0.0 {
                    return Err(self.violation("f(r) > 0 for r < 1", vec![r, v]));
                }
                if v <= values[k + 1] - 1e-12 || v <= values[k + 1] {
                    return Err(self.violation(
                        "strictly decreasing",
                        vec![r, v, grid[k + 1], values[k + 1]],
                    ));
                }
            }
        }
        let m = SUBADDITIVE_GRID;
        let step = FRAC_PI_2 / (m - 1) as f64;
        let g: Vec<f64> = (0..m).map(|k| self.angular(k as f64 * step)).collect();
        for i in 0..m {
            for j in 0..m - i {
                let excess = g[i + j] - g[i] - g[j];
                if excess > SUBADDITIVE_SLACK {
                    return Err(self.violation(
                        "subadditivity of g(θ) = f(cos θ)",
                        vec![i as f64 * step, j as f64 * step, excess],
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ray distance `f(|⟨a|b⟩|)` for a profile that passes [`OverlapProfile::validate`].
pub fn distance_from_profile(p: &OverlapProfile) -> Result<DistanceCandidate> {
    p.validate()?;
    Ok(DistanceCandidate::from_profile_unchecked(p.clone(), true))
}

/// `max |g(θ₁ + θ₂) − g(θ₁) − g(θ₂)|` over grid angles `θ_k = k·(π/2)/(grid − 1)`
/// with `θ₁ + θ₂ ≤ π/2`. Vanishes exactly for linear `g`, i.e. multiples of
/// the Fubini–Study distance.
pub fn profile_additivity_defect(p: &OverlapProfile, grid: usize) -> f64 {
    let grid = grid.max(2);
    let step = FRAC_PI_2 / (grid - 1) as f64;
    let g: Vec<f64> = (0..grid).map(|k| p.angular(k as f64 * step)).collect();
    let mut worst = 0.0f64;
    for i in 0..grid {
        for j in 0..grid - i {
            worst = worst.max((g[i + j] - g[i] - g[j]).abs());
        }
    }
    worst
}
