use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::video::{Rational, VideoClip};

use super::{clip_from_planes, frame_count};

/// Shared sweep description. For the CSF sweep `start`/`end` are spatial
/// frequencies in cycles/pixel; for the flicker sweep `start` is the initial
/// half-period in frames and `end` is ignored (the sweep always ends at 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub duration: f64,
    pub fps: Rational,
    pub start: f64,
    pub end: f64,
    /// Michelson contrast in `[0, 1]`.
    pub contrast: f64,
}

impl SweepParams {
    pub fn csf_default() -> Self {
        SweepParams {
            duration: 10.0,
            fps: Rational::integer(30),
            start: 0.005,
            end: 0.25,
            contrast: 1.0,
        }
    }

    pub fn flicker_default() -> Self {
        SweepParams {
            duration: 10.0,
            fps: Rational::integer(60),
            start: 30.0,
            end: 1.0,
            contrast: 1.0,
        }
    }
}

/// Bar period in pixels at frame `t` of `n`: `round(1/f(t))` with `f`
/// log-linear from `start` to `end`.
pub fn csf_period_at(p: &SweepParams, t: usize, n: usize) -> usize {
    let s = if n > 1 { t as f64 / (n - 1) as f64 } else { 0.0 };
    let f = p.start * (p.end / p.start).powf(s);
    ((1.0 / f).round() as usize).max(2)
}

pub fn csf_grating_sweep(p: &SweepParams, width: usize, height: usize) -> Result<VideoClip> {
    if !(p.start > 0.0 && p.start <= p.end) {
        return Err(Error::param("f_start", "must be positive and not above f_end"));
    }
    if p.end > 0.5 {
        return Err(Error::param("f_end", format!("{} exceeds the 0.5 cycles/pixel Nyquist limit", p.end)));
    }
    if !(0.0..=1.0).contains(&p.contrast) {
        return Err(Error::param("contrast", "must lie in [0, 1]"));
    }
    let n = frame_count(p.duration, p.fps)?;
    let lo = 127.5 * (1.0 - p.contrast);
    let hi = 127.5 * (1.0 + p.contrast);
    let planes = (0..n)
        .map(|t| {
            let period = csf_period_at(p, t, n);
            let half = period as f64 / 2.0;
            Plane::from_fn(width, height, |x, _| if ((x % period) as f64) < half { lo } else { hi })
        })
        .collect();
    clip_from_planes(planes, p.fps)
}

/// Per-frame half-period schedule: log-spaced steps from `start` down to 1,
/// each step holding whole cycles, the remainder alternating every frame.
pub fn flicker_periods(p: &SweepParams) -> Result<Vec<usize>> {
    if p.fps != Rational::integer(60) {
        return Err(Error::param("fps", "the flicker fusion demo runs at exactly 60 fps"));
    }
    if !(p.start > 1.0) {
        return Err(Error::param("period_start", "must exceed one frame"));
    }
    let n = frame_count(p.duration, p.fps)?;
    const STEPS: usize = 6;
    let mut periods: Vec<usize> = (0..STEPS)
        .map(|k| p.start.powf(1.0 - k as f64 / (STEPS - 1) as f64).round().max(1.0) as usize)
        .collect();
    periods.dedup();
    let share = n / periods.len();
    let mut schedule = Vec::with_capacity(n);
    for &period in &periods[..periods.len() - 1] {
        let cycle = 2 * period;
        let len = (share / cycle).max(1) * cycle;
        if schedule.len() + len + 2 > n {
            break;
        }
        schedule.extend(std::iter::repeat_n(period, len));
    }
    let rest = n - schedule.len();
    schedule.extend(std::iter::repeat_n(1, rest));
    Ok(schedule)
}

/// Full-field white/black alternation with a shrinking half-period.
pub fn flicker_sweep(p: &SweepParams, width: usize, height: usize) -> Result<VideoClip> {
    let schedule = flicker_periods(p)?;
    let mut planes = Vec::with_capacity(schedule.len());
    let (mut white, mut run) = (true, 0usize);
    let lo = 127.5 * (1.0 - p.contrast);
    let hi = 127.5 * (1.0 + p.contrast);
    for (t, &period) in schedule.iter().enumerate() {
        if t > 0 && (run >= period || schedule[t - 1] != period) {
            white = !white;
            run = 0;
        }
        planes.push(Plane::filled(width, height, if white { hi } else { lo }));
        run += 1;
    }
    clip_from_planes(planes, p.fps)
}
