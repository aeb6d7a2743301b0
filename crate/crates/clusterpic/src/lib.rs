pub mod cluster;
pub mod equivalence;
pub mod error;
pub mod galois;
pub mod genus2;
pub mod graph;
pub mod homology;
pub mod ingest;
pub mod input;
pub mod invariants;
pub mod label;
pub mod linalg;
pub mod notation;
pub mod padic;
pub mod rat;
pub mod report;
pub mod semistability;
#[cfg(test)]
mod testutil;
pub mod weierstrass;

pub use cluster::{ClusterAttributes, ClusterPicture, Violation};
pub use error::{Error, Result};
pub use galois::{GaloisData, Sign};
pub use ingest::{RootSet, RootSpec};
