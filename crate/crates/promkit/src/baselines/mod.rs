//! Baseline reduced-order and surrogate methods used for comparison:
//! intrusive projection-based reduction and a Gaussian-process regression
//! surrogate over the parameter axis.

pub mod kriging;
pub mod pod;
