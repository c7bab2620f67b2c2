use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::video::{Rational, VideoClip};

use super::{clip_from_planes, frame_count};

/// Offset that centers `0.5·U[0,255]` on mid-gray.
const NOISE_OFFSET: f64 = 63.75;

/// Two side-by-side vertical gratings over one static noise field. Amplitudes
/// are peak-to-peak in luma steps, left panel first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskingParams {
    pub duration: f64,
    pub fps: Rational,
    pub amplitudes: [f64; 2],
    pub f_start: f64,
    pub f_end: f64,
    pub seed: u64,
}

impl MaskingParams {
    pub fn with_seed(seed: u64) -> Self {
        MaskingParams {
            duration: 6.0,
            fps: Rational::integer(30),
            amplitudes: [20.0, 100.0],
            f_start: 0.01,
            f_end: 0.12,
            seed,
        }
    }

    /// Grating frequency at frame `t` of `n`, log-linear in `t`.
    pub fn frequency_at(&self, t: usize, n: usize) -> f64 {
        let s = if n > 1 { t as f64 / (n - 1) as f64 } else { 0.0 };
        self.f_start * (self.f_end / self.f_start).powf(s)
    }
}

/// Per-pixel `U[0,255]` field, identical for every frame of a clip.
pub(crate) fn uniform_noise(width: usize, height: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Plane::from_fn(width, height, |_, _| rng.random_range(0.0..=255.0))
}

/// `clamp(0.5·noise + 63.75 + (A/2)·sin(2πf(t)x))`, with `A` taken from the
/// panel containing `x`.
pub fn masked_gratings(p: &MaskingParams, width: usize, height: usize) -> Result<VideoClip> {
    if p.amplitudes.iter().any(|a| !(*a >= 0.0)) {
        return Err(Error::param("amplitudes", "must be non-negative"));
    }
    if !(p.f_start > 0.0 && p.f_start <= p.f_end && p.f_end <= 0.5) {
        return Err(Error::param("f_start", "needs 0 < f_start ≤ f_end ≤ 0.5"));
    }
    let n = frame_count(p.duration, p.fps)?;
    let noise = uniform_noise(width, height, p.seed);
    let half = width / 2;
    let planes = (0..n)
        .map(|t| {
            let f = p.frequency_at(t, n);
            Plane::from_fn(width, height, |x, y| {
                let (a, local_x) = if x < half { (p.amplitudes[0], x) } else { (p.amplitudes[1], x - half) };
                let g = 0.5 * a * (TAU * f * local_x as f64).sin();
                (0.5 * noise.get(x, y) + NOISE_OFFSET + g).clamp(0.0, 255.0)
            })
        })
        .collect();
    clip_from_planes(planes, p.fps)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Projection of a panel onto its own unit-energy sinusoid.
    fn matched_response(frame: &Plane, x0: usize, w: usize, f: f64) -> f64 {
        let mut dot = 0.0;
        let mut energy = 0.0;
        for y in 0..frame.height() {
            for lx in 0..w {
                let s = (TAU * f * lx as f64).sin();
                dot += frame.get(x0 + lx, y) * s;
                energy += s * s;
            }
        }
        dot / energy
    }

    #[test]
    fn amplitude_ratio_recovered() {
        let p = MaskingParams { duration: 0.1, f_start: 0.0625, f_end: 0.0625, ..MaskingParams::with_seed(4) };
        let clip = masked_gratings(&p, 256, 128).unwrap();
        let frame = &clip.luma_planes()[0];
        let left = matched_response(frame, 0, 128, 0.0625);
        let right = matched_response(frame, 128, 128, 0.0625);
        assert!((left - 10.0).abs() < 1.0, "left {left}");
        assert!((right / left - 5.0).abs() < 0.5, "ratio {}", right / left);
    }

    #[test]
    fn zero_amplitude_is_scaled_noise() {
        let p = MaskingParams { amplitudes: [0.0, 0.0], duration: 0.2, ..MaskingParams::with_seed(9) };
        let clip = masked_gratings(&p, 32, 16).unwrap();
        let noise = uniform_noise(32, 16, 9);
        let expect = noise.map(|v| (0.5 * v + NOISE_OFFSET).round());
        for f in clip.luma_planes() {
            assert_eq!(f, expect);
        }
    }

    #[test]
    fn deterministic_and_in_gamut() {
        let p = MaskingParams { duration: 0.5, ..MaskingParams::with_seed(1) };
        let a = masked_gratings(&p, 64, 32).unwrap();
        let b = masked_gratings(&p, 64, 32).unwrap();
        assert_eq!(a.sample_checksum(), b.sample_checksum());
        let c = masked_gratings(&MaskingParams { seed: 2, ..p }, 64, 32).unwrap();
        assert_ne!(a.sample_checksum(), c.sample_checksum());
        let freqs: Vec<f64> = (0..15).map(|t| p.frequency_at(t, 15)).collect();
        assert!(freqs.windows(2).all(|w| w[1] > w[0]));
    }
}
