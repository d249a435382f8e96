//! Simulation of two-photon Rydberg spectroscopy in ultracold 87Rb.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod cli;
pub mod dressed;
pub mod error;
pub mod format;
pub mod radial;
pub mod sequence;
pub mod spectra;
pub mod stark;
pub mod structure;
pub mod units;

pub use error::{Error, Result};
