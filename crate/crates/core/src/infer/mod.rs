//! Resampling inference.

mod bootstrap;

pub use bootstrap::{bootstrap, percentile_interval, quantile, BootstrapConfig, BootstrapReport, InferError};
