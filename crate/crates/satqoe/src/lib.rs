//! Files, pipeline commands and the `satqoe` command line on top of
//! [`satqoe_core`].
//!
//! The pipeline runs `ingest` (captures to trace CSVs), `features`,
//! `subjective` (ratings to MOS) and `eval` (content-disjoint benchmark),
//! all driven by one TOML config. `predict` and `score-external` work on
//! standalone files.

pub mod catalog;
pub mod commands;
pub mod config;
pub mod error;
pub mod io_util;
pub mod model_io;
pub mod pcap;
pub mod playback;
pub mod provenance;
pub mod report;
pub mod study;
pub mod tables;
pub mod trace_csv;

pub use error::{Error, Result};
pub use satqoe_core as core;
