//! Psychovisual demonstration stimuli. Every generator is deterministic in
//! its parameters (and seed, where noise is involved).

mod masking;
mod sweeps;
mod weber;

pub use masking::{masked_gratings, MaskingParams};
pub use sweeps::{csf_grating_sweep, csf_period_at, flicker_periods, flicker_sweep, SweepParams};
pub use weber::{gradient_dots, weber_grid, weber_visible, DotInfo, PatchInfo, WeberParams};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::video::{Rational, VideoClip};

pub(crate) fn frame_count(duration_s: f64, fps: Rational) -> Result<usize> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::param("duration", "must be positive"));
    }
    let n = (duration_s * fps.as_f64()).round() as usize;
    if n == 0 {
        return Err(Error::param("duration", "shorter than one frame"));
    }
    Ok(n)
}

pub(crate) fn clip_from_planes(planes: Vec<Plane>, fps: Rational) -> Result<VideoClip> {
    VideoClip::from_luma_planes(&planes, fps)
}
