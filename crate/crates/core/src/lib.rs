//! Import, clean and featurize continuous monitoring time series.
//!
//! The crate is organised along the processing chain:
//!
//! * [`ingest`] reads records from CSV files or WFDB (PhysioNet) headers and
//!   signal files, and cuts long records into rolling windows.
//! * [`preprocess`] holds the filter chain: threshold and quantile outlier
//!   masking, Butterworth filtering and gap interpolation.
//! * [`spectral`] estimates one-sided power spectral densities.
//! * [`features`] turns a signal (or its spectrum) into named scalars.
//! * [`pipeline`] binds an importer, a filter chain and feature sets and runs
//!   them over many records, sequentially or on a worker pool.
//! * [`config`] and [`commands`] are the declarative front end used by the
//!   `tsforge` binary.

// Validity checks are written `!(x > 0.0)` on purpose: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod preprocess;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
pub use signal::{FeatureMap, FeatureValue, Record, Signal};
pub use spectral::Spectrum;
