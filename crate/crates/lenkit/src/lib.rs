//! lenkit: train small concept-activation networks under parsimony
//! constraints, then extract, simplify, and quantitatively evaluate
//! first-order-logic explanations of each output concept.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`logic`]: formula IR, evaluation, DNF/CNF conversion, minimization,
//!   parsing and printing.
//! - [`data`]: concept datasets, CSV ingestion, synthetic generators,
//!   k-fold splitting.
//! - [`network`]: dense feed-forward engine with manual backprop, masked
//!   weights, and the per-sample affine collapse of ReLU nets.
//! - [`criteria`]: training losses for the supervised, black-box-mimicry,
//!   and unsupervised clustering objectives.
//! - [`pruning`]: node-, network-, and example-level parsimony strategies.
//! - [`extraction`]: empirical truth tables and example-, set- and
//!   class-level explanations, plus global CNF aggregation.
//! - [`models`]: the psi / mu / relu presets wiring everything together.
//! - [`metrics`]: the six evaluation metrics and fold aggregation.
//! - [`bench`]: cross-validated benchmark harness and its report schema.

pub mod criteria;
pub mod data;
pub mod error;
pub mod logic;
pub mod metrics;
pub mod models;
pub mod extraction;
pub mod pruning;
pub mod network;

pub use error::{Error, ErrorKind, Result};
