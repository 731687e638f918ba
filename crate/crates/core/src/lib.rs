//! Convolution powers of measures on finite groups and on ℤ: classification
//! of measures, spectra of convolution operators, weighted Cesàro averages
//! and the limit theorems they satisfy.

pub mod ergodic;
pub mod error;
pub mod groups;
pub mod measures;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};

/// Version of this library, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
