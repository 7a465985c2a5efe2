//! Adaptive selection between a composite binary endpoint and its most
//! relevant component.
//!
//! A two-arm trial compares a control and a treatment on two binary events,
//! one of which is clinically more important. Whether the union of both
//! events (the composite) or the important event alone makes the more
//! efficient primary endpoint depends on the correlation between the events,
//! which is rarely known at the design stage. This crate estimates that
//! correlation from blinded interim data, picks the endpoint with the
//! smaller required sample size, and recomputes the sample size for it.
//!
//! - [`trial_model`]: endpoint parameters, joint laws, correlated sampling
//! - [`design`]: Wald test, sample sizes, composite parameters
//! - [`estimation`]: blinded (and unblinded) estimation
//! - [`adaptive`]: decision rule, reassessment, `K` endpoints, multiple arms
//! - [`sim`]: Monte Carlo power and type 1 error
//! - [`cli`]: the command-line verbs and their file formats
//!
//! ```
//! use endpoint_select::{decision_ratio, DesignConfig, EndpointSpec};
//!
//! let relevant = EndpointSpec::new(0.615, 0.52)?;
//! let additional = EndpointSpec::new(0.15, 0.66)?;
//! let cfg = DesignConfig::default();
//! // Uncorrelated components favour the composite.
//! assert!(decision_ratio(&relevant, &additional, 0.0, &cfg)? >= 1.0);
//! # Ok::<(), endpoint_select::Error>(())
//! ```

pub mod adaptive;
pub mod cli;
pub mod design;
pub mod error;
pub mod estimation;
pub mod rng;
pub mod root;
pub mod sim;
pub mod trial_model;

pub use adaptive::{
    decision_ratio, interim_size, multiarm_select, recursive_select, select_and_reassess, AdaptivePlan, BlindedRecords,
    KEndpointPlan, SelectedEndpoint, SelectionOutcome,
};
pub use design::{
    composite_endpoint, composite_event_prob, composite_odds_ratio, multiarm_total, sample_size_composite,
    sample_size_single, treated_prob, wald_logor_test, DesignConfig, TestResult,
};
pub use error::{Arm, Error, Result};
pub use estimation::{
    estimate_blinded, estimate_control_prob, estimate_unblinded, BlindedEstimates, BlindedSummary, SubjectRecord,
};
pub use trial_model::{
    build_joint, corr_from_conditional, sample_pairs, valid_correlation_range, CellCounts, CorrelationRange,
    EndpointSpec, JointBinaryModel,
};
