//! Temperature-aware secrecy phase design for liquid-crystal reconfigurable
//! intelligent surfaces (LC-RIS).
//!
//! The crate is organised bottom-up:
//!
//! - [`lc_model`]: liquid-crystal phase budget as a function of temperature.
//! - [`geometry`]: array geometries, near-field steering vectors, LOS and
//!   Rician channels, lifted quadratic forms.
//! - [`secrecy`]: SNR, secrecy rate, worst-case rate over position grids and
//!   the closed-form beamformer and ratio updates.
//! - [`sdp`]: a first-order (ADMM) solver for unit-diagonal complex SDPs.
//! - [`phase_opt`]: penalty continuation with spectral linearization, range
//!   constraints, phase extraction and the temperature-neglecting baseline.
//! - [`sim`]: scenario files, experiment drivers and CSV result tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod lc_model;
pub mod linalg;
pub mod phase_opt;
pub mod sdp;
pub mod secrecy;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
