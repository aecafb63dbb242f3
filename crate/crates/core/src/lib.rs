//! Core of the `loadnet` load forecaster.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds with `#![no_std]` plus `alloc`: smart-meter repair, calendar
//! helpers, multi-scale aggregation, lag/context design matrices, min-max
//! normalization, a single-hidden-layer backpropagation network and the
//! experiment harness (lag sweeps, factor ablation, hidden-layer search).
//!
//! File formats, the command line and thread pools live in the `loadnet`
//! crate.
//!
//! # Pipeline
//!
//! ```text
//! consumption + weather rows ──merge_sources──▶ records + ContinuityReport
//!        ──repair_local / repair_block / finalize_series──▶ CleanHourlySeries
//!        ──build_{hourly,daily,weekly,monthly}──▶ ScaleDataset
//!        ──build_design_matrix / split / NormParams──▶ train, val, test
//!        ──nn::train──▶ NetworkParameters ──▶ TrialMetrics
//! ```

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod aggregate;
pub mod calendar;
mod error;
pub mod experiments;
pub mod features;
pub mod ingest;
pub mod matrix;
pub mod nn;
mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
