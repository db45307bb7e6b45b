//! Bodyweight-adjusted scoring for powerlifting totals.
//!
//! The library covers the full path from raw meet results to a scoring
//! model and its diagnostics:
//!
//! * [`poly`]: dense polynomials (Horner evaluation, derivatives).
//! * [`model`]: validated scoring models; points = total * normalization / f(bw).
//! * [`wilks`]: the classic Wilks baseline as a separate, fixed formula.
//! * [`modelfile`] / [`builtin`]: the versioned JSON model format and the
//!   models shipped with the crate.
//! * [`ingest`]: CSV parsing, bodyweight overrides, weight classes and the
//!   top-N-per-class sample selection pipeline.
//! * [`regression`]: numerically careful least-squares polynomial fitting.
//! * [`diagnostics`]: fairness and shape checks for a fitted curve (score
//!   trends, top-k concentration, monotonicity, plateau detection, and a
//!   two-sample bias experiment).

pub mod builtin;
pub mod diagnostics;
pub mod ingest;
pub mod model;
pub mod modelfile;
pub mod poly;
pub mod regression;
pub mod wilks;

pub use model::{FitMeta, ModelError, Score, ScoringModel, Sex};
pub use poly::{PolyError, Polynomial};
