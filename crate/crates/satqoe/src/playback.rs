//! Playback event logs, one JSON object per video:
//!
//! ```json
//! {"duration_s": 32.0,
//!  "stalls": [{"start_s": 6.5, "len_s": 1.2}],
//!  "resolutions": [{"t_s": 0.0, "height": 720}],
//!  "bitrates": [{"t_s": 0.0, "kbps": 2400.0}]}
//! ```
//!
//! The video id is the file stem.

use std::path::Path;

use satqoe_core::session::{BitrateSample, PlaybackLog, ResolutionSwitch, Stall};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_util;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaybackFile {
    pub duration_s: f64,
    pub stalls: Vec<StallEntry>,
    pub resolutions: Vec<ResolutionEntry>,
    pub bitrates: Vec<BitrateEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StallEntry {
    pub start_s: f64,
    pub len_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionEntry {
    pub t_s: f64,
    pub height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitrateEntry {
    pub t_s: f64,
    pub kbps: f64,
}

impl PlaybackFile {
    pub fn into_log(self, video_id: &str) -> Result<PlaybackLog> {
        Ok(PlaybackLog::new(
            video_id,
            self.duration_s,
            self.stalls.iter().map(|s| Stall { start: s.start_s, length: s.len_s }).collect(),
            self.resolutions.iter().map(|r| ResolutionSwitch { time: r.t_s, height: r.height }).collect(),
            self.bitrates.iter().map(|b| BitrateSample { time: b.t_s, kbps: b.kbps }).collect(),
        )?)
    }
}

pub fn parse_playback(text: &str, video_id: &str) -> Result<PlaybackLog> {
    let file: PlaybackFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_log(video_id)
}

pub fn load_playback(path: &Path) -> Result<PlaybackLog> {
    let text = io_util::read_text(path)?;
    parse_playback(&text, &io_util::file_stem(path)).map_err(|e| match e {
        Error::Core(c) => Error::parse(path, c.to_string()),
        other => other.at(path),
    })
}

pub fn load_playback_dir(dir: &Path) -> Result<Vec<PlaybackLog>> {
    io_util::list_files(dir, "json")?.iter().map(|p| load_playback(p)).collect()
}
