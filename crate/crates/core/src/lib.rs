//! Mining of paired subgroup descriptions across two datasets that share only
//! their model attributes.
//!
//! Given a left and a right dataset, the crate searches for pairs of
//! conjunctive descriptions (one per dataset) whose covered instances induce
//! models that are large, exceptional with respect to the respective whole
//! dataset, and similar to each other. Two model classes are built in: simple
//! linear regression and multivariate covariance.
//!
//! The crate is organised along the mining pipeline:
//!
//! * [`data`]: tabular data model, selectors, descriptions, supports, binning
//! * [`model`]: mergeable sufficient statistics, fitting, Gaussian densities
//! * [`measures`]: size / exceptionality / similarity components and the
//!   combined interestingness score
//! * [`search`]: candidate enumeration, exhaustive and mine-and-pair search
//! * [`syngen`]: synthetic benchmark generator with implanted models and
//!   machine-readable ground truth
//! * [`eval`]: ground-truth matching, recall@k, experiment sweeps

pub mod bitset;
pub mod data;
pub mod error;
pub mod eval;
pub mod measures;
pub mod model;
pub mod search;
pub mod syngen;

pub use bitset::SupportSet;
pub use data::{AttrKind, AttrRole, Attribute, Dataset, Description, Predicate, Selector};
pub use measures::{MeasureConfig, ScoreBreakdown};
pub use model::{ModelClass, ModelParams, ModelStats};
pub use search::{Algorithm, Candidate, PatternPair, SearchConfig};
