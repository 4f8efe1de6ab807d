//! Human nearness recognition from ambient phone-sensor windows: a seeded
//! signal generator, windowed feature extraction, information-gain feature
//! selection, three classifiers and a hold-out evaluation harness.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod eval;
pub mod exec;
pub mod features;
pub mod ingest;
pub mod learn;
pub mod pipeline;
pub mod select;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;
