//! Stability scores and grid search over `(lambda, G)`.
//!
//! The consensus score compares the co-membership rate of pairs placed in
//! the same stable cluster with that of pairs placed in different clusters.
//! Delta, PAC and the silhouette are provided as comparators.

mod cdf;
mod grid;
mod score;
mod silhouette;

pub use cdf::{cdf_scores, delta_score, CdfScores, EmpiricalCdf, DEFAULT_PAC_BOUNDS};
pub use grid::{calibrate, Calibration, CellScores, ScoreGrid, ScoreKind};
pub use score::{consensus_score, consensus_score_or_none, tally, WithinBetweenTallies};
pub use silhouette::silhouette_score;
