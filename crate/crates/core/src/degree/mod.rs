//! Brouwer degrees of 7-dimensional maps by signed regular-value counting.

pub mod engine;
pub mod maps;
pub mod oracle;

use thiserror::Error;

pub use engine::{degree_on_rp7, mapping_degree, DegreeConfig, DegreeReport, Preimage, TrialReport};
pub use maps::{Domain, MapFamily};
pub use oracle::{antipodal_classes, polar_form, power_map_preimages};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("value is ±1, where the preimage set is not discrete")]
    NonGenericValue,
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("unknown map {0:?}")]
    UnknownMap(String),
    #[error("Newton stalled near {stalled} candidate preimages and converged at none")]
    NonConvergence { stalled: usize },
    #[error("preimage counts differ between restarts at every sampled value")]
    UnstablePreimageCount,
    #[error("trials disagree on the degree: {0:?}")]
    ConflictingEstimates(Vec<i64>),
    #[error("map is not odd, so it does not descend to RP⁷")]
    NotOdd,
}
