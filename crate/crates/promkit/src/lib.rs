//! Parametric reduced-order modeling toolkit.
//!
//! The offline half learns low-rank linear surrogate models from snapshot
//! trajectories of quantities of interest (QoIs) at sampled parameter points,
//! using dynamic mode decomposition on lifted observables. The online half
//! predicts full trajectories at unseen parameter values by interpolating
//! reduced-order bases on the Grassmann manifold and reduced operators on
//! matrix manifolds, without re-running the high-fidelity model.
//!
//! Modules:
//! - [`data`]: snapshot matrices, parameter points, observable lifts, file I/O
//! - [`solvers`]: high-fidelity finite-difference solvers producing training data
//! - [`dmd`]: offline DMD training of local reduced-order models
//! - [`manifold`]: Grassmann / matrix-manifold interpolation of bases and operators
//! - [`reconstruct`]: iteration-free spectral trajectory reconstruction
//! - [`baselines`]: POD-Galerkin and Kriging reference methods
//! - [`metrics`]: relative L2 error metrics

pub mod baselines;
pub mod data;
pub mod dmd;
mod error;
pub mod linalg;
pub mod manifold;
pub mod metrics;
pub mod parallel;
pub mod reconstruct;
pub mod solvers;

pub use error::{Error, Result};
