//! Conditional central limit theorems through exchangeable pairs whose
//! conditioning statistic moves by at most one lattice step.
//!
//! The crate is organised as a pipeline: [`models`] produce configurations
//! and one-step proposals, [`moments`] turns proposals into conditional
//! moments and residuals, [`transform`] symmetrises asymmetric drifts,
//! [`bounds`] evaluates the Wasserstein error bounds, [`empirics`] measures
//! actual distances, and [`oracle`] provides brute-force ground truth.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod core;
pub mod empirics;
pub mod error;
pub mod models;
pub mod moments;
pub mod normal;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod transform;

pub use crate::core::{
    BoundReport, Contract, CountLaw, LatticeSpec, Mat2, MomentProfile, PairCase, PairConstants,
    PairStep, ResidualSummary, TheoremTag, Vec2,
};
pub use crate::error::{Error, Result};
pub use crate::models::PairModel;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Whether block sampling runs on the rayon pool.
pub const PARALLEL: bool = cfg!(feature = "parallel");
