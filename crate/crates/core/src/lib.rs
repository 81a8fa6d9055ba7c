//! Operationalised software-quality models.
//!
//! Load model modules ([`format`]), resolve and check them ([`model`]),
//! calibrate utility thresholds ([`calibration`]), derive weights from
//! rankings ([`weighting`]), assess measurement data ([`assessment`]), render
//! reports ([`report`]) and compare rankings ([`stats`]).

pub mod assessment;
pub mod calibration;
pub mod error;
pub mod format;
pub mod model;
pub mod report;
pub mod stats;
pub mod weighting;

pub use error::{Error, Result};
