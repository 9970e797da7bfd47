//! Distance functions on pure quantum states and tooling to check them.
//!
//! The crate is split along the lines of the distance hierarchy it implements:
//!
//! - [`hilbert`]: state vectors, rays, Haar sampling, bipartite structure,
//!   reduced states, Schmidt decomposition and entanglement entropy.
//! - [`metrics`]: Fubini–Study, Bures, trace, Hilbert-space, entanglement-aware
//!   and measurement-induced distances, POVMs, and overlap profiles.
//! - [`harness`]: sampling-based conformance checks of a [`metrics::DistanceCandidate`]
//!   against the eight distance axioms.
//! - [`operational`]: Helstrom discrimination and finite-difference quantum Fisher
//!   information.
//! - [`experiments`]: reproducible sweeps behind the `qmetric` command line tool.

#![forbid(unsafe_code)]

pub mod error;
pub mod experiments;
pub mod harness;
pub mod hilbert;
pub mod io;
pub mod metrics;
pub mod operational;
pub mod rng;

pub use error::{Error, Result};
pub use hilbert::{BipartiteState, DensityMatrix, Ray, StateVector, Subsystem, C64};
pub use rng::SeededRng;
