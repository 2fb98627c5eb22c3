//! Temporal measures of viral vs. broadcast diffusion for petition signature data.
//!
//! The crate is split along the analysis pipeline:
//!
//! - [`timeline`] bins raw signature events into per-period adoption series.
//! - [`metrics`] computes exceed ratios, peaks, shape moments, first-day/second-day
//!   comparisons, threshold effects and the adjacent-pair Zipcode distance probe.
//! - [`simulate`] is the broadcast + viral chain-binomial generative model.
//! - [`stats`] holds OLS with inference, t and chi-square tests and the special
//!   functions behind their p-values.
//! - [`ingest`] loads archived CSV files into an assembled [`ingest::Dataset`].

pub mod error;
pub mod ingest;
pub mod metrics;
pub mod simulate;
pub mod stats;
pub mod timeline;

pub use error::{Error, Result};
pub use timeline::{AdoptionSeries, Period, PetitionRecord, SignatureEvent, Status, Zipcode};
