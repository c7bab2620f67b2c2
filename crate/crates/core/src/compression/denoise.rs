use crate::error::{Error, Result};
use crate::plane::{clamp_index, Plane};
use crate::video::VideoClip;

/// Box mean with edge clamping along both axes.
fn box_mean(p: &Plane, r: usize) -> Plane {
    let (w, h) = (p.width(), p.height());
    let ri = r as isize;
    let n = (2 * r + 1) as f64;
    let rows = Plane::from_fn(w, h, |x, y| {
        (-ri..=ri).map(|d| p.get(clamp_index(x as isize + d, w), y)).sum::<f64>() / n
    });
    Plane::from_fn(w, h, |x, y| {
        (-ri..=ri).map(|d| rows.get(x, clamp_index(y as isize + d, h))).sum::<f64>() / n
    })
}

/// Pointwise spatiotemporal Wiener filter: with local mean `m` and variance
/// `v` over a `(2rs+1)²×(2rt+1)` neighbourhood, `out = m + max(0, v−σ²)/v·(x−m)`.
/// Only luma is filtered.
pub fn st_wiener_denoise(
    clip: &VideoClip,
    sigma_assumed: f64,
    spatial_radius: usize,
    temporal_radius: usize,
) -> Result<VideoClip> {
    if !(sigma_assumed >= 0.0 && sigma_assumed.is_finite()) {
        return Err(Error::param("sigma_assumed", "must be non-negative"));
    }
    let required = 2 * temporal_radius + 1;
    if clip.len() < required {
        return Err(Error::ClipTooShort { frames: clip.len(), required });
    }
    let luma = clip.luma_planes();
    let means: Vec<Plane> = luma.iter().map(|p| box_mean(p, spatial_radius)).collect();
    let squares: Vec<Plane> = luma.iter().map(|p| box_mean(&p.map(|v| v * v), spatial_radius)).collect();
    let n = luma.len();
    let noise_var = sigma_assumed * sigma_assumed;
    let tr = temporal_radius as isize;
    let frames = (0..n)
        .map(|t| {
            let window: Vec<usize> = (-tr..=tr).map(|d| clamp_index(t as isize + d, n)).collect();
            let k = window.len() as f64;
            let x = &luma[t];
            let out = Plane::from_fn(x.width(), x.height(), |i, j| {
                let m = window.iter().map(|&s| means[s].get(i, j)).sum::<f64>() / k;
                let e2 = window.iter().map(|&s| squares[s].get(i, j)).sum::<f64>() / k;
                let v = (e2 - m * m).max(0.0);
                let gain = if v > 0.0 { (v - noise_var).max(0.0) / v } else { 0.0 };
                (m + gain * (x.get(i, j) - m)).clamp(0.0, 255.0)
            });
            clip.frames()[t].with_luma(&out)
        })
        .collect::<Result<Vec<_>>>()?;
    VideoClip::new(frames, clip.fps())
}
