//! Axisymmetric solutions of the Helfrich shape equation.
//!
//! The profile `z(r)` of a closed vesicle is found by shooting from the axis
//! with slope `w'(0) = w0'`, following the graph until it turns vertical and
//! then continuing in inverse coordinates up to the equator.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod export;
pub mod ode;
pub mod params;

pub use error::{Error, Result};
pub use params::{analyze_cubic, derived_constants, CubicAnalysis, DerivedConstants, HelfrichParams};
