//! Desk-scale laboratory for studying tangent expansion on torus
//! diffeomorphisms: orbit-level expansion bookkeeping (Pliss times, neutral
//! segments), empirical-measure splitting with weak-star diagnostics, and a
//! curve-subdivision engine that certifies smooth-size bounds and counts
//! reparametrization families.
//!
//! The library is organized bottom-up:
//!
//! * [`dynamics`]: built-in models with exact derivative oracles, the
//!   projective bundle chart, expansion observables.
//! * [`orbit`]: Birkhoff sums, Pliss times, neutral segments, sampled
//!   parameter sets on a marked curve.
//! * [`measure`]: empirical measures, a fixed test-function dictionary,
//!   neutral-mass decomposition, periodic-orbit scans, parameter clustering.
//! * [`curve`]: regular curves, smooth-size certificates, the subdivision
//!   engine, segment classification, counting bounds.
//! * [`pipeline`]: the end-to-end certificate experiment.
//! * [`config`] and [`report`]: run configuration and artifact emission.

pub mod config;
pub mod curve;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod orbit;
pub mod pipeline;
pub mod report;

pub use error::{LabError, Result};
