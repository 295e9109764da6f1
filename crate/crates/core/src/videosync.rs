//! Video-to-trace alignment: filename epoch recovery, offsets and frame mapping.
//!
//! Offsets follow one convention throughout: `offset_ms` is how far into the
//! video trace time zero falls, i.e. climb start minus video start. A negative
//! offset means the video started after the climb.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::{ClimbRecord, ClimbStore, StoreError};

pub const EPOCH_DIGITS: usize = 13;

/// Frame rate assumed for links stored without one.
pub const DEFAULT_FPS: f64 = 30.0;

const FRAME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoLink {
    pub filename: String,
    pub offset_ms: i64,
    #[serde(default = "default_fps")]
    pub fps: f64,
}

fn default_fps() -> f64 {
    DEFAULT_FPS
}

#[derive(Debug, Error)]
pub enum VideoError {
    #[error("frame rate must be a positive finite number, got {0}")]
    InvalidFps(f64),
    #[error("video filename must be a bare file name, got {0:?}")]
    InvalidFilename(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// First maximal run of exactly 13 ASCII digits, read as epoch milliseconds.
pub fn parse_filename_epoch(filename: &str) -> Option<i64> {
    let bytes = filename.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i - start == EPOCH_DIGITS {
                return filename[start..i].parse().ok();
            }
        } else {
            i += 1;
        }
    }
    None
}

/// Offset placing trace time zero `climb - video` ms into the video.
pub fn auto_offset(video_epoch_ms: i64, climb_recorded_at_ms: i64) -> i64 {
    climb_recorded_at_ms - video_epoch_ms
}

/// Video frame showing trace time `t_s`. Negative positions clamp to frame 0
/// and, when the last frame is known, later ones clamp to it.
pub fn frame_for_time(t_s: f64, link: &VideoLink, last_frame: Option<u64>) -> u64 {
    let position = t_s + link.offset_ms as f64 / 1000.0;
    let raw = (position * link.fps + FRAME_EPS).floor();
    let frame = if raw.is_nan() || raw <= 0.0 {
        0
    } else {
        raw as u64
    };
    match last_frame {
        Some(last) => frame.min(last),
        None => frame,
    }
}

fn validate(filename: &str, fps: f64) -> Result<(), VideoError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(VideoError::InvalidFps(fps));
    }
    let bare = !filename.is_empty()
        && filename != "."
        && filename != ".."
        && !filename.contains(['/', '\\']);
    if !bare {
        return Err(VideoError::InvalidFilename(filename.to_string()));
    }
    Ok(())
}

/// Builds the link for a climb: an explicit offset wins, then an epoch found
/// in the filename, then zero.
pub fn link_for(
    climb_recorded_at_ms: i64,
    filename: &str,
    fps: f64,
    explicit_offset_ms: Option<i64>,
) -> Result<VideoLink, VideoError> {
    validate(filename, fps)?;
    let offset_ms = explicit_offset_ms
        .or_else(|| {
            parse_filename_epoch(filename).map(|e| auto_offset(e, climb_recorded_at_ms))
        })
        .unwrap_or(0);
    Ok(VideoLink {
        filename: filename.to_string(),
        offset_ms,
        fps,
    })
}

/// Links a video to a stored climb and persists the change.
pub fn attach_video(
    store: &ClimbStore,
    id: &str,
    filename: &str,
    fps: f64,
    explicit_offset_ms: Option<i64>,
) -> Result<ClimbRecord, VideoError> {
    validate(filename, fps)?;
    let updated = store.update(id, |record| {
        let link = link_for(record.recorded_at_ms(), filename, fps, explicit_offset_ms)
            .expect("validated above");
        record.video = Some(link);
        Ok(())
    })?;
    Ok(updated)
}
