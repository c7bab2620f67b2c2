use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{clamp_index, Plane};
use crate::video::{Frame, Rational, VideoClip, YuvFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleKernel {
    Bilinear,
    /// Keys cubic with `a = -0.5`.
    Bicubic,
    Lanczos3,
}

impl ResampleKernel {
    fn support(self) -> f64 {
        match self {
            ResampleKernel::Bilinear => 1.0,
            ResampleKernel::Bicubic => 2.0,
            ResampleKernel::Lanczos3 => 3.0,
        }
    }

    fn weight(self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            ResampleKernel::Bilinear => (1.0 - t).max(0.0),
            ResampleKernel::Bicubic => {
                let a = -0.5;
                if t <= 1.0 {
                    ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
                } else if t < 2.0 {
                    ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
                } else {
                    0.0
                }
            }
            ResampleKernel::Lanczos3 => {
                if t < 1e-12 {
                    1.0
                } else if t < 3.0 {
                    let pt = PI * t;
                    3.0 * pt.sin() * (pt / 3.0).sin() / (pt * pt)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ResampleKernel::Bilinear => "bilinear",
            ResampleKernel::Bicubic => "bicubic",
            ResampleKernel::Lanczos3 => "lanczos3",
        }
    }
}

/// Per output index: (first source index, normalized weights).
fn weight_table(n_in: usize, n_out: usize, kernel: ResampleKernel) -> Vec<(Vec<usize>, Vec<f64>)> {
    let scale = n_in as f64 / n_out as f64;
    let support = kernel.support();
    (0..n_out)
        .map(|o| {
            let s = (o as f64 + 0.5) * scale - 0.5;
            let lo = (s - support).floor() as isize + 1;
            let hi = (s + support).ceil() as isize - 1;
            let mut idx = Vec::new();
            let mut w = Vec::new();
            for i in lo..=hi {
                let wt = kernel.weight(s - i as f64);
                if wt != 0.0 {
                    idx.push(clamp_index(i, n_in));
                    w.push(wt);
                }
            }
            if w.is_empty() {
                idx.push(clamp_index(s.round() as isize, n_in));
                w.push(1.0);
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            (idx, w)
        })
        .collect()
}

/// Separable resize without prefiltering. Output is not clamped, so
/// ringing kernels may overshoot the input range.
pub fn resample_spatial(plane: &Plane, out_w: usize, out_h: usize, kernel: ResampleKernel) -> Result<Plane> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidGeometry(format!("output {out_w}x{out_h} is empty")));
    }
    let (w, h) = (plane.width(), plane.height());
    let xt = weight_table(w, out_w, kernel);
    let yt = weight_table(h, out_h, kernel);
    let mut tmp = vec![0.0; out_w * h];
    for y in 0..h {
        let row = plane.row(y);
        for (x, (idx, wt)) in xt.iter().enumerate() {
            tmp[y * out_w + x] = idx.iter().zip(wt).map(|(&i, &k)| k * row[i]).sum();
        }
    }
    let mut out = vec![0.0; out_w * out_h];
    for (y, (idx, wt)) in yt.iter().enumerate() {
        for (&sy, &k) in idx.iter().zip(wt) {
            let src = &tmp[sy * out_w..(sy + 1) * out_w];
            for (o, v) in out[y * out_w..(y + 1) * out_w].iter_mut().zip(src) {
                *o += k * v;
            }
        }
    }
    Plane::from_vec(out_w, out_h, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalMode {
    DropDup,
    LinearBlend,
}

fn blend_frames(a: &Frame, b: &Frame, t: f64) -> Result<Frame> {
    let mix = |p: &[u8], q: &[u8]| -> Vec<u8> {
        p.iter()
            .zip(q)
            .map(|(&x, &y)| crate::plane::quantize_u8((1.0 - t) * x as f64 + t * y as f64))
            .collect()
    };
    Ok(match (a, b) {
        (Frame::Y420(a), Frame::Y420(b)) => Frame::Y420(YuvFrame::new(
            a.width(),
            a.height(),
            mix(a.y(), b.y()),
            mix(a.cb(), b.cb()),
            mix(a.cr(), b.cr()),
        )?),
        (Frame::Gray(a), Frame::Gray(b)) => Frame::Gray(a.zip_map(b, |x, y| (1.0 - t) * x + t * y)?),
        (Frame::Rgb24(a), Frame::Rgb24(b)) => Frame::Rgb24(crate::video::RgbFrame::new(
            a.width(),
            a.height(),
            mix(a.data(), b.data()),
        )?),
        _ => return Err(Error::GeometryMismatch("mixed frame formats".into())),
    })
}

/// Frame-rate conversion. Output frame `j` samples source time
/// `(j + 0.5) / factor - 0.5`, clamped to the clip.
pub fn resample_temporal(clip: &VideoClip, factor: Rational, mode: TemporalMode) -> Result<VideoClip> {
    let f = factor.as_f64();
    let n_out = (clip.len() as f64 * f).round() as usize;
    if n_out == 0 {
        return Err(Error::param(
            "factor",
            format!("{factor} leaves no frames from a {}-frame clip", clip.len()),
        ));
    }
    let fps = clip
        .fps()
        .checked_mul(factor)
        .ok_or_else(|| Error::param("factor", "frame rate overflow"))?;
    let last = (clip.len() - 1) as f64;
    let frames = clip.frames();
    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let s = ((j as f64 + 0.5) / f - 0.5).clamp(0.0, last);
        match mode {
            TemporalMode::DropDup => out.push(frames[s.round() as usize].clone()),
            TemporalMode::LinearBlend => {
                let i0 = s.floor() as usize;
                let t = s - i0 as f64;
                if t < 1e-9 || i0 + 1 >= frames.len() {
                    out.push(frames[i0].clone());
                } else {
                    out.push(blend_frames(&frames[i0], &frames[i0 + 1], t)?);
                }
            }
        }
    }
    VideoClip::new(out, fps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KERNELS: [ResampleKernel; 3] = [ResampleKernel::Bilinear, ResampleKernel::Bicubic, ResampleKernel::Lanczos3];

    #[test]
    fn identity_bilinear_is_bit_exact() {
        let p = Plane::from_fn(13, 7, |x, y| (x * 31 + y * 17) as f64 % 255.0);
        assert_eq!(resample_spatial(&p, 13, 7, ResampleKernel::Bilinear).unwrap(), p);
    }

    #[test]
    fn constants_reproduced() {
        let p = Plane::filled(10, 6, 93.0);
        for k in KERNELS {
            for (w, h) in [(3, 2), (10, 6), (25, 17), (64, 1)] {
                let out = resample_spatial(&p, w, h, k).unwrap();
                assert!(out.data().iter().all(|v| (v - 93.0).abs() < 1e-6), "{k:?} {w}x{h}");
            }
        }
    }

    #[test]
    fn alternating_columns_upscale() {
        let p = Plane::from_fn(16, 4, |x, _| if x % 2 == 0 { 0.0 } else { 255.0 });
        let outs: Vec<Plane> = KERNELS
            .iter()
            .map(|&k| resample_spatial(&p, 32, 8, k).unwrap())
            .collect();
        assert!(outs[0].max_abs_diff(&outs[1]) > 1.0);
        assert!(outs[1].max_abs_diff(&outs[2]) > 1.0);
        let (lo, hi) = outs[2].min_max();
        assert!(lo < 0.0 && hi > 255.0, "lanczos range {lo}..{hi}");
        let (lo, hi) = outs[0].min_max();
        assert!(lo >= 0.0 && hi <= 255.0);
    }

    fn ramp_clip(n: usize) -> VideoClip {
        let planes: Vec<Plane> = (0..n).map(|i| Plane::filled(4, 4, i as f64)).collect();
        VideoClip::from_luma_planes(&planes, Rational::integer(30)).unwrap()
    }

    #[test]
    fn unit_factor_is_identity() {
        let c = ramp_clip(7);
        for mode in [TemporalMode::DropDup, TemporalMode::LinearBlend] {
            assert_eq!(resample_temporal(&c, Rational::integer(1), mode).unwrap(), c);
        }
    }

    #[test]
    fn third_rate_picks_every_third_frame() {
        let c = ramp_clip(30);
        let out = resample_temporal(&c, Rational::new(1, 3).unwrap(), TemporalMode::DropDup).unwrap();
        assert_eq!(out.len(), 10);
        assert_eq!(out.fps(), Rational::integer(10));
        let picks: Vec<f64> = out.luma_planes().iter().map(|p| p.get(0, 0)).collect();
        assert_eq!(picks, vec![1.0, 4.0, 7.0, 10.0, 13.0, 16.0, 19.0, 22.0, 25.0, 28.0]);
    }

    #[test]
    fn static_scene_blend() {
        let planes = vec![Plane::filled(4, 4, 120.0); 9];
        let c = VideoClip::from_luma_planes(&planes, Rational::integer(24)).unwrap();
        for factor in [Rational::new(5, 2).unwrap(), Rational::new(2, 3).unwrap()] {
            let out = resample_temporal(&c, factor, TemporalMode::LinearBlend).unwrap();
            assert!(out.frames().iter().all(|f| f == &c.frames()[0]));
        }
    }

    #[test]
    fn upsampling_blends_neighbours() {
        let c = ramp_clip(4);
        let out = resample_temporal(&c, Rational::integer(2), TemporalMode::LinearBlend).unwrap();
        assert_eq!(out.len(), 8);
        let v: Vec<f64> = out.luma_planes().iter().map(|p| p.get(0, 0)).collect();
        // Sources -0.25 (clamped), 0.25, 0.75, ... 3.25 (clamped).
        assert_eq!(v[0], 0.0);
        assert_eq!(v[7], 3.0);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn too_few_output_frames() {
        let c = ramp_clip(2);
        assert!(resample_temporal(&c, Rational::new(1, 5).unwrap(), TemporalMode::DropDup).is_err());
    }
}
