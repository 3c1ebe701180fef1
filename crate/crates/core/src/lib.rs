//! Building blocks for predicting streaming-video QoE from network traces.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! - [`trace`]: packet records, session traces and fixed-width byte bucketing.
//! - [`features`]: the baseline network-measurement (BNM) feature vector and
//!   the temporal byte-count sequences.
//! - [`session`]: stall, resolution and bitrate descriptors from playback logs,
//!   plus a four-parameter logistic fit.
//! - [`subjective`]: Z-scoring, SUREAL score recovery, banded DTW, medcouple and
//!   the adjusted-boxplot subject screening.
//! - [`regression`]: linear, tree, forest and RBF-SVR regressors with a
//!   content-disjoint grid search.
//! - [`eval`]: correlation metrics, content-disjoint splits and the repeated
//!   80-20 benchmark.
//!
//! File formats, the command line and parallel drivers live in the `satqoe`
//! crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod features;
pub mod math;
pub mod regression;
pub mod rng;
pub mod session;
pub mod subjective;
pub mod trace;

pub use error::{Error, Result};
