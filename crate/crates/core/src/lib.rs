//! Decision-theoretic robustness for Bayesian analysis of random-graph models.
//!
//! The crate has four layers:
//!
//! * [`models`] and [`graph`]: seeded samplers for sparse Erdős–Rényi graphs,
//!   labelled two-block SBMs, step graphons and erased configuration models;
//! * [`metrics`] and [`info`]: descriptive graph statistics and the
//!   KL/Chernoff information indices separating ER from the SBM;
//! * [`posterior`] and [`robust`]: baseline posteriors and worst-case risk
//!   over KL and χ² balls around them;
//! * [`graphon`] and [`experiments`]: graphon-level neighbourhoods and the
//!   seeded experiment harness.
//!
//! All randomness flows through [`rng::stream`], so equal seeds give equal
//! outputs regardless of thread count.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiments;
pub mod graph;
pub mod graphon;
pub mod info;
pub mod metrics;
pub mod models;
pub mod posterior;
pub mod rng;
pub mod robust;

pub use error::{Error, Result};
pub use graph::Graph;
pub use models::{DegreeModel, LabelledSbmParams, Labels, SparseErParams, StepGraphon};
pub use posterior::{TwoPointPosterior, WeightedSample};
pub use robust::{Divergence, PhiBall, SensitivityCurve, TiltSolution};
