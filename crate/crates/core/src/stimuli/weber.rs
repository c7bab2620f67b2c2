use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::video::{Rational, VideoClip};

use super::{clip_from_planes, frame_count};

/// Weber grid layout. Row `r` (top to bottom) sits on `background_levels[r]`;
/// column `c` flickers its dots over `L_row ± ΔL/2` with
/// `ΔL = column_ratios[c] · L_row`, so every patch in a column has the same
/// Weber fraction. With increasing levels and ratios the lower-left and
/// upper-right patches share the same `ΔL` exactly when
/// `levels[2]·ratios[0] == levels[0]·ratios[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeberParams {
    pub tau: f64,
    pub background_levels: [f64; 3],
    pub column_ratios: [f64; 3],
    /// Pixels between neighbouring dot centers.
    pub dot_spacing: usize,
    /// Side of each square dot in pixels.
    pub dot_size: usize,
    pub flicker_hz: f64,
    pub fps: Rational,
}

impl Default for WeberParams {
    fn default() -> Self {
        WeberParams {
            tau: 0.2,
            background_levels: [50.0, 125.0, 200.0],
            column_ratios: [0.1, 0.2, 0.4],
            dot_spacing: 16,
            dot_size: 3,
            flicker_hz: 2.0,
            fps: Rational::integer(30),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchInfo {
    pub row: usize,
    pub col: usize,
    pub l_ave: f64,
    pub delta_l: f64,
    pub weber_ratio: f64,
    pub visible: bool,
    /// `(x, y, w, h)` in pixels.
    pub rect: (usize, usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotInfo {
    pub x: usize,
    pub y: usize,
    pub l_local: f64,
    pub delta_l: f64,
    pub visible: bool,
}

/// The Weber–Fechner visibility model: `ΔL > τ·L`.
pub fn weber_visible(tau: f64, l_ave: f64, delta_l: f64) -> bool {
    delta_l > tau * l_ave
}

impl WeberParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::param("tau", "must be positive"));
        }
        let increasing = |a: &[f64; 3]| a[0] < a[1] && a[1] < a[2];
        if !increasing(&self.background_levels) {
            return Err(Error::param("background_levels", "must be strictly increasing"));
        }
        if !increasing(&self.column_ratios) || self.column_ratios[0] < 0.0 {
            return Err(Error::param("column_ratios", "must be non-negative and strictly increasing"));
        }
        if self.dot_spacing < 2 || self.dot_size == 0 || self.dot_size >= self.dot_spacing {
            return Err(Error::param("dot_spacing", "needs 0 < dot_size < dot_spacing"));
        }
        if !(self.flicker_hz > 0.0) {
            return Err(Error::param("flicker_hz", "must be positive"));
        }
        for &l in &self.background_levels {
            for &r in &self.column_ratios {
                let d = r * l;
                if l - d / 2.0 < 0.0 || l + d / 2.0 > 255.0 {
                    return Err(Error::param(
                        "column_ratios",
                        format!("dots around L={l} with ΔL={d} leave [0, 255]"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn patches(&self, width: usize, height: usize) -> Vec<PatchInfo> {
        let (cw, ch) = (width / 3, height / 3);
        let mut out = Vec::with_capacity(9);
        for row in 0..3 {
            for col in 0..3 {
                let l_ave = self.background_levels[row];
                let delta_l = self.column_ratios[col] * l_ave;
                out.push(PatchInfo {
                    row,
                    col,
                    l_ave,
                    delta_l,
                    weber_ratio: delta_l / l_ave,
                    visible: weber_visible(self.tau, l_ave, delta_l),
                    rect: (col * cw, row * ch, cw, ch),
                });
            }
        }
        out
    }
}

fn flicker_phase(t: usize, hz: f64, fps: Rational) -> f64 {
    (TAU * hz * t as f64 / fps.as_f64()).sin()
}

/// Draws a dot lattice starting half a spacing into `rect`.
fn dot_centers(rect: (usize, usize, usize, usize), spacing: usize, size: usize) -> Vec<(usize, usize)> {
    let (x0, y0, w, h) = rect;
    let mut c = Vec::new();
    let mut y = y0 + spacing / 2;
    while y + size <= y0 + h {
        let mut x = x0 + spacing / 2;
        while x + size <= x0 + w {
            c.push((x, y));
            x += spacing;
        }
        y += spacing;
    }
    c
}

/// 3×3 patch grid. Returns the clip and one record per patch in row-major
/// order.
pub fn weber_grid(p: &WeberParams, width: usize, height: usize, duration: f64) -> Result<(VideoClip, Vec<PatchInfo>)> {
    p.validate()?;
    if width < 3 * p.dot_spacing || height < 3 * p.dot_spacing {
        return Err(Error::InvalidGeometry(format!(
            "{width}x{height} is too small for a 3x3 grid at dot spacing {}",
            p.dot_spacing
        )));
    }
    let n = frame_count(duration, p.fps)?;
    let patches = p.patches(width, height);
    let mut background = Plane::filled(width, height, p.background_levels[1]);
    for info in &patches {
        let (x0, y0, w, h) = info.rect;
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                background.set(x, y, info.l_ave);
            }
        }
    }
    let lattices: Vec<_> = patches.iter().map(|i| dot_centers(i.rect, p.dot_spacing, p.dot_size)).collect();
    let planes = (0..n)
        .map(|t| {
            let s = flicker_phase(t, p.flicker_hz, p.fps);
            let mut f = background.clone();
            for (info, dots) in patches.iter().zip(&lattices) {
                let v = info.l_ave + 0.5 * info.delta_l * s;
                for &(x, y) in dots {
                    for dy in 0..p.dot_size {
                        for dx in 0..p.dot_size {
                            f.set(x + dx, y + dy, v);
                        }
                    }
                }
            }
            f
        })
        .collect();
    Ok((clip_from_planes(planes, p.fps)?, patches))
}

/// Left-to-right luminance ramp `0 → 255` under a sparse flickering dot
/// lattice swinging `±amplitude/2`. Dot samples are clamped to `[0, 255]`.
pub fn gradient_dots(
    width: usize,
    height: usize,
    duration: f64,
    fps: Rational,
    amplitude: f64,
    dot_spacing: usize,
    tau: f64,
) -> Result<(VideoClip, Vec<DotInfo>)> {
    if width < 2 || dot_spacing < 2 || !(amplitude >= 0.0) || !(tau > 0.0) {
        return Err(Error::param("gradient_dots", "needs width ≥ 2, spacing ≥ 2, amplitude ≥ 0, tau > 0"));
    }
    let n = frame_count(duration, fps)?;
    let ramp = |x: usize| 255.0 * x as f64 / (width - 1) as f64;
    let background = Plane::from_fn(width, height, |x, _| ramp(x));
    let size = (dot_spacing / 4).max(1);
    let dots: Vec<DotInfo> = dot_centers((0, 0, width, height), dot_spacing, size)
        .into_iter()
        .map(|(x, y)| {
            let l_local = ramp(x + size / 2);
            DotInfo { x, y, l_local, delta_l: amplitude, visible: weber_visible(tau, l_local, amplitude) }
        })
        .collect();
    let planes = (0..n)
        .map(|t| {
            let s = flicker_phase(t, 2.0, fps);
            let mut f = background.clone();
            for d in &dots {
                let v = (d.l_local + 0.5 * amplitude * s).clamp(0.0, 255.0);
                for dy in 0..size {
                    for dx in 0..size {
                        f.set(d.x + dx, d.y + dy, v);
                    }
                }
            }
            f
        })
        .collect();
    Ok((clip_from_planes(planes, fps)?, dots))
}
