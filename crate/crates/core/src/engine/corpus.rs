//! Bundled synthetic test clips standing in for natural footage.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::synth::{dead_leaves, drifting_grating, power_law_field, BlobField};
use crate::video::{write_y4m_file, Frame, Rational, VideoClip, YuvFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusClip {
    /// Textured blobs translating diagonally, with coloured chroma.
    BlobMotion,
    /// A 1/f field seen through a panning window.
    FractalPan,
    /// Two superimposed drifting sinusoids.
    DriftingGratings,
    /// Occlusion texture under random camera shake.
    ShakyTexture,
}

impl CorpusClip {
    pub const ALL: [CorpusClip; 4] =
        [CorpusClip::BlobMotion, CorpusClip::FractalPan, CorpusClip::DriftingGratings, CorpusClip::ShakyTexture];

    pub fn name(self) -> &'static str {
        match self {
            CorpusClip::BlobMotion => "blob-motion",
            CorpusClip::FractalPan => "fractal-pan",
            CorpusClip::DriftingGratings => "drifting-gratings",
            CorpusClip::ShakyTexture => "shaky-texture",
        }
    }

    fn seed(self) -> u64 {
        match self {
            CorpusClip::BlobMotion => 11,
            CorpusClip::FractalPan => 23,
            CorpusClip::DriftingGratings => 37,
            CorpusClip::ShakyTexture => 41,
        }
    }
}

impl FromStr for CorpusClip {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CorpusClip::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown corpus clip {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusOptions {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub fps: Rational,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { width: 640, height: 360, frames: 48, fps: Rational::integer(24) }
    }
}

impl CorpusOptions {
    pub fn hd() -> Self {
        CorpusOptions { width: 1280, height: 720, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 || !self.width.is_multiple_of(2) || !self.height.is_multiple_of(2) {
            return Err(Error::InvalidGeometry(format!(
                "corpus clips need even sides >= 16, got {}x{}",
                self.width, self.height
            )));
        }
        if self.frames == 0 {
            return Err(Error::param("frames", "must be at least 1"));
        }
        Ok(())
    }
}

fn tinted(luma: &Plane, t: usize) -> Result<Frame> {
    let (w, h) = (luma.width(), luma.height());
    let (cw, ch) = (w.div_ceil(2), h.div_ceil(2));
    let phase = t as f64 * 0.05;
    let mut cb = Vec::with_capacity(cw * ch);
    let mut cr = Vec::with_capacity(cw * ch);
    for y in 0..ch {
        for x in 0..cw {
            let (u, v) = (x as f64 / cw as f64, y as f64 / ch as f64);
            cb.push(crate::plane::quantize_u8(128.0 + 40.0 * (std::f64::consts::TAU * u + phase).sin()));
            cr.push(crate::plane::quantize_u8(128.0 + 40.0 * (std::f64::consts::TAU * v - phase).cos()));
        }
    }
    Ok(Frame::Y420(YuvFrame::new(w, h, luma.to_u8(), cb, cr)?))
}

/// Deterministic rendering of one corpus clip.
pub fn generate_clip(clip: CorpusClip, opts: &CorpusOptions) -> Result<VideoClip> {
    opts.validate()?;
    let (w, h, n) = (opts.width, opts.height, opts.frames);
    let seed = clip.seed();
    match clip {
        CorpusClip::BlobMotion => {
            let field = BlobField::with_sigma(w, h, seed, 3.0, 9.0);
            let frames = (0..n)
                .map(|t| tinted(&field.render(w, h, 1.5 * t as f64, 0.5 * t as f64), t))
                .collect::<Result<Vec<_>>>()?;
            VideoClip::new(frames, opts.fps)
        }
        CorpusClip::FractalPan => {
            let pan = 2;
            let field = power_law_field(w + pan * n, h, 1.0, 40.0, seed);
            let planes: Vec<Plane> = (0..n).map(|t| field.crop(pan * t, 0, w, h)).collect();
            VideoClip::from_luma_planes(&planes, opts.fps)
        }
        CorpusClip::DriftingGratings => {
            let planes: Vec<Plane> = (0..n)
                .map(|t| {
                    let a = drifting_grating(w, h, t as f64, 0.05, 0.0, 1.0, 0.0, 40.0);
                    let b = drifting_grating(w, h, t as f64, 0.08, 120.0, 1.5, 0.0, 30.0);
                    a.zip_map(&b, |p, q| 128.0 + p + q).expect("same geometry")
                })
                .collect();
            VideoClip::from_luma_planes(&planes, opts.fps)
        }
        CorpusClip::ShakyTexture => {
            let m = 8usize;
            let texture = dead_leaves(w + 2 * m, h + 2 * m, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut dx, mut dy) = (0i64, 0i64);
            let planes: Vec<Plane> = (0..n)
                .map(|_| {
                    dx = (dx + rng.random_range(-2..=2)).clamp(-(m as i64), m as i64);
                    dy = (dy + rng.random_range(-2..=2)).clamp(-(m as i64), m as i64);
                    texture.crop((m as i64 + dx) as usize, (m as i64 + dy) as usize, w, h)
                })
                .collect();
            VideoClip::from_luma_planes(&planes, opts.fps)
        }
    }
}

/// Write every corpus clip as `<name>.y4m` under `dir`.
pub fn write_corpus(dir: impl AsRef<Path>, opts: &CorpusOptions) -> Result<Vec<(CorpusClip, PathBuf)>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    CorpusClip::ALL
        .into_iter()
        .map(|c| {
            let path = dir.join(format!("{}.y4m", c.name()));
            write_y4m_file(&generate_clip(c, opts)?, &path)?;
            Ok((c, path))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CorpusOptions {
        CorpusOptions { width: 64, height: 48, frames: 6, fps: Rational::integer(24) }
    }

    #[test]
    fn clips_are_deterministic_and_sized() {
        for c in CorpusClip::ALL {
            let a = generate_clip(c, &small()).unwrap();
            let b = generate_clip(c, &small()).unwrap();
            assert_eq!(a.sample_checksum(), b.sample_checksum(), "{}", c.name());
            assert_eq!((a.width(), a.height(), a.len()), (64, 48, 6));
            assert_eq!(c.name().parse::<CorpusClip>().unwrap(), c);
        }
    }

    #[test]
    fn clips_move() {
        for c in CorpusClip::ALL {
            let l = generate_clip(c, &small()).unwrap().luma_planes();
            assert!(l[0].max_abs_diff(&l[5]) > 1.0, "{} is static", c.name());
        }
    }

    #[test]
    fn odd_geometry_rejected() {
        let opts = CorpusOptions { width: 63, ..small() };
        assert!(generate_clip(CorpusClip::BlobMotion, &opts).is_err());
    }
}
