//! Consensus weighted distance-based clustering.
//!
//! Items are repeatedly subsampled, clustered on a (possibly attribute-weighted)
//! distance, and the co-membership counts are aggregated into a consensus
//! matrix. The number of clusters `G` and the weighting penalty `lambda` are
//! calibrated jointly by maximising a consensus score: the two-proportion z
//! statistic comparing co-membership rates of within- and between-cluster
//! pairs.
//!
//! The crate is organised along the pipeline:
//!
//! * [`distance`]: per-attribute distances, sparse (`l1`/`l2` constrained)
//!   attribute weights and COSA item-by-attribute weights.
//! * [`cluster`]: hierarchical agglomeration and PAM.
//! * [`consensus`]: subsampling, co-membership counts and consensus matrices.
//! * [`calibration`]: consensus score, Delta/PAC/silhouette comparators and
//!   grid search.
//! * [`simulate`]: Gaussian mixture generator with per-attribute explained
//!   variance control.
//! * [`metrics`]: pair-counting agreement indices and weighting F1.
//! * [`pipeline`], [`benchmark`], [`io`], [`plot`]: orchestration and output.

pub mod benchmark;
pub mod calibration;
pub mod cluster;
pub mod consensus;
pub mod distance;
mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod plot;
mod seed;
pub mod simulate;

pub use error::{Error, Result};
pub use seed::derive_seed;
