//! Greedy sparse sensor placement and full-state reconstruction with cheap
//! (noisy) and expensive (accurate) sensors under a cost budget.
//!
//! The pipeline is: build or load a data matrix ([`dataset`]), derive a
//! reconstruction basis from training snapshots ([`basis`]), choose sensor
//! locations with pivoted QR plus optional oversampling ([`placement`]),
//! assign fidelities and noise ([`multifidelity`]), then reconstruct and
//! score held-out snapshots ([`evaluation`]).

pub mod basis;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod multifidelity;
pub mod placement;
pub mod seed;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
