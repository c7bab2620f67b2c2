use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{convolve_any, gaussian_blur, make_spatial_kernel, Boundary, SpatialKind};
use crate::plane::Plane;
use crate::video::{Frame, RgbFrame, VideoClip};

pub fn psnr(a: &Plane, b: &Plane) -> Result<f64> {
    psnr_with_peak(a, b, 255.0)
}

/// `10·log10(peak²/MSE)`; identical inputs give `f64::INFINITY`.
pub fn psnr_with_peak(a: &Plane, b: &Plane, peak: f64) -> Result<f64> {
    a.check_same_geometry(b)?;
    let mse = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
    /// Gaussian window σ; the window spans `2·ceil(3σ) + 1` samples.
    pub window_sigma: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams { k1: 0.01, k2: 0.03, dynamic_range: 255.0, window_sigma: 1.5 }
    }
}

impl SsimParams {
    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }

    fn radius(&self) -> usize {
        (3.0 * self.window_sigma).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsimResult {
    pub map: Plane,
    /// Mean over pixels at least one window radius from every edge.
    pub mean: f64,
}

pub fn ssim_map(reference: &Plane, distorted: &Plane, p: &SsimParams) -> Result<SsimResult> {
    reference.check_same_geometry(distorted)?;
    if !(p.k1 > 0.0 && p.k2 > 0.0 && p.dynamic_range > 0.0 && p.window_sigma > 0.0) {
        return Err(Error::param("ssim", "constants and window sigma must be positive"));
    }
    let r = p.radius();
    let side = 2 * r + 1;
    let (w, h) = (reference.width(), reference.height());
    if w < side || h < side {
        return Err(Error::InvalidGeometry(format!("{w}x{h} is smaller than the {side}x{side} SSIM window")));
    }
    let blur = |q: &Plane| gaussian_blur(q, p.window_sigma, Boundary::Mirror);
    let (x, y) = (reference, distorted);
    let mx = blur(x);
    let my = blur(y);
    let exx = blur(&x.map(|v| v * v));
    let eyy = blur(&y.map(|v| v * v));
    let exy = blur(&x.zip_map(y, |a, b| a * b)?);
    let (c1, c2) = (p.c1(), p.c2());
    let map = Plane::from_fn(w, h, |i, j| {
        let (ux, uy) = (mx.get(i, j), my.get(i, j));
        let sxx = exx.get(i, j) - ux * ux;
        let syy = eyy.get(i, j) - uy * uy;
        let sxy = exy.get(i, j) - ux * uy;
        ((2.0 * ux * uy + c1) * (2.0 * sxy + c2)) / ((ux * ux + uy * uy + c1) * (sxx + syy + c2))
    });
    let interior = map.crop(r, r, w - 2 * r, h - 2 * r);
    let mean = if interior.is_empty() { map.mean() } else { interior.mean() };
    Ok(SsimResult { map, mean })
}

/// Block map of `|h_ref − h_dist|` with `h = ln(1 + var(LoG response))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrQuality {
    pub map: Plane,
    pub score: f64,
}

pub const RR_LOG_SIGMA: f64 = 1.5;

fn block_log_energy(plane: &Plane, block: usize) -> Result<Plane> {
    let k = make_spatial_kernel(SpatialKind::Log { sigma: RR_LOG_SIGMA })?;
    let resp = convolve_any(plane, &k, Boundary::Mirror);
    let (w, h) = (plane.width(), plane.height());
    Ok(Plane::from_fn(w.div_ceil(block), h.div_ceil(block), |bx, by| {
        let (x0, y0) = (bx * block, by * block);
        let (x1, y1) = ((x0 + block).min(w), (y0 + block).min(h));
        let n = ((x1 - x0) * (y1 - y0)) as f64;
        let (mut s, mut s2) = (0.0, 0.0);
        for y in y0..y1 {
            for &v in &resp.row(y)[x0..x1] {
                s += v;
                s2 += v * v;
            }
        }
        let var = (s2 / n - (s / n).powi(2)).max(0.0);
        var.ln_1p()
    }))
}

/// Reduced-reference comparison: each side is summarised by one scalar per
/// block, so only `⌈W/b⌉·⌈H/b⌉` numbers from the reference are needed.
pub fn rr_quality_map(reference: &Plane, distorted: &Plane, block: usize) -> Result<RrQuality> {
    reference.check_same_geometry(distorted)?;
    if block == 0 {
        return Err(Error::param("block", "must be positive"));
    }
    let hr = block_log_energy(reference, block)?;
    let hd = block_log_energy(distorted, block)?;
    let map = hr.zip_map(&hd, |a, b| (a - b).abs())?;
    let score = map.mean();
    Ok(RrQuality { map, score })
}

/// Additive white Gaussian noise on every sample, clamped to `[0, 255]`.
/// 4:2:0 frames receive noise on luma only.
pub fn awgn(clip: &VideoClip, sigma: f64, seed: u64) -> Result<VideoClip> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", "must be non-negative"));
    }
    if sigma == 0.0 {
        return Ok(clip.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = |v: f64| {
        let z: f64 = StandardNormal.sample(&mut rng);
        (v + sigma * z).clamp(0.0, 255.0)
    };
    let frames = clip
        .frames()
        .iter()
        .map(|f| match f {
            Frame::Rgb24(rgb) => {
                let data = rgb.data().iter().map(|&v| noisy(f64::from(v)).round() as u8).collect();
                RgbFrame::new(rgb.width(), rgb.height(), data).map(Frame::Rgb24)
            }
            _ => {
                let l = f.luma();
                let data = l.data().iter().map(|&v| noisy(v)).collect();
                f.with_luma(&Plane::from_vec(l.width(), l.height(), data)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    VideoClip::new(frames, clip.fps())
}

/// One row of a per-frame metric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub frame_index: usize,
    pub metric: String,
    pub value: f64,
}

/// PSNR, mean SSIM and the reduced-reference score for each frame pair.
pub fn frame_metrics(reference: &VideoClip, distorted: &VideoClip) -> Result<Vec<MetricRow>> {
    if reference.len() != distorted.len() {
        return Err(Error::GeometryMismatch(format!(
            "{} reference frames vs {} distorted",
            reference.len(),
            distorted.len()
        )));
    }
    let mut rows = Vec::with_capacity(3 * reference.len());
    for (i, (a, b)) in reference.luma_planes().iter().zip(distorted.luma_planes().iter()).enumerate() {
        let row = |metric: &str, value| MetricRow { frame_index: i, metric: metric.into(), value };
        rows.push(row("psnr", psnr(a, b)?));
        rows.push(row("ssim", ssim_map(a, b, &SsimParams::default())?.mean));
        rows.push(row("rr", rr_quality_map(a, b, 16)?.score));
    }
    Ok(rows)
}

pub fn metrics_to_csv(rows: &[MetricRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidData(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidData(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidData(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::dead_leaves;
    use crate::video::Rational;
    use proptest::prelude::*;

    fn natural() -> Plane {
        dead_leaves(128, 96, 21).map(f64::round)
    }

    fn noisy_plane(p: &Plane, sigma: f64, seed: u64) -> Plane {
        let clip = VideoClip::from_luma_planes(std::slice::from_ref(p), Rational::integer(30)).unwrap();
        awgn(&clip, sigma, seed).unwrap().luma_planes().remove(0)
    }

    #[test]
    fn psnr_examples() {
        let a = natural();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let b = Plane::filled(16, 16, 100.0);
        let c = Plane::filled(16, 16, 101.0);
        assert!((psnr(&b, &c).unwrap() - 48.13).abs() < 0.01);
        assert_eq!(psnr(&b, &c).unwrap(), psnr(&c, &b).unwrap());
        assert!(psnr(&b, &Plane::new(8, 8)).is_err());
    }

    #[test]
    fn ssim_identity_and_errors() {
        let a = natural();
        let s = ssim_map(&a, &a, &SsimParams::default()).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!(s.map.data().iter().all(|&v| v == 1.0));
        assert!(ssim_map(&Plane::new(10, 40), &Plane::new(10, 40), &SsimParams::default()).is_err());
    }

    #[test]
    fn ssim_falls_with_noise() {
        let a = natural();
        let means: Vec<f64> = [2.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&s| ssim_map(&a, &noisy_plane(&a, s, 5), &SsimParams::default()).unwrap().mean)
            .collect();
        assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
    }

    #[test]
    fn luminance_shift_beats_noise() {
        let a = natural();
        let shifted = a.map(|v| (v + 10.0).min(255.0));
        let s_shift = ssim_map(&a, &shifted, &SsimParams::default()).unwrap().mean;
        let s_noise = ssim_map(&a, &noisy_plane(&a, 10.0, 6), &SsimParams::default()).unwrap().mean;
        assert!(s_shift < 1.0 && s_shift > s_noise, "{s_shift} vs {s_noise}");
    }

    #[test]
    fn rr_examples() {
        let a = natural();
        let same = rr_quality_map(&a, &a, 16).unwrap();
        assert_eq!(same.score, 0.0);
        assert_eq!((same.map.width(), same.map.height()), (8, 6));
        let odd = rr_quality_map(&Plane::new(33, 17), &Plane::new(33, 17), 16).unwrap();
        assert_eq!((odd.map.width(), odd.map.height()), (3, 2));
        let scores: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&s| rr_quality_map(&a, &noisy_plane(&a, s, 8), 16).unwrap().score)
            .collect();
        assert!(scores.windows(2).all(|w| w[1] > w[0]), "{scores:?}");
        let d = noisy_plane(&a, 10.0, 8);
        let base = rr_quality_map(&a, &d, 16).unwrap();
        let lifted = rr_quality_map(&a.map(|v| v + 40.0), &d.map(|v| v + 40.0), 16).unwrap();
        assert!(base.map.max_abs_diff(&lifted.map) < 1e-9);
    }

    #[test]
    fn awgn_statistics_and_determinism() {
        let gray = Plane::filled(256, 256, 128.0);
        let clip = VideoClip::from_luma_planes(&[gray], Rational::integer(30)).unwrap();
        assert_eq!(awgn(&clip, 0.0, 1).unwrap(), clip);
        let n1 = awgn(&clip, 10.0, 1).unwrap();
        assert_eq!(n1, awgn(&clip, 10.0, 1).unwrap());
        let p = n1.luma_planes().remove(0);
        let mean = p.mean();
        let sd = (p.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
        assert!((9.5..=10.5).contains(&sd), "{sd}");
        assert!((mean - 128.0).abs() < 0.5);
        assert!(awgn(&clip, -1.0, 1).is_err());
    }

    #[test]
    fn metric_table_csv() {
        let a = natural();
        let clip = VideoClip::from_luma_planes(&[a.clone(), a], Rational::integer(30)).unwrap();
        let rows = frame_metrics(&clip, &awgn(&clip, 5.0, 2).unwrap()).unwrap();
        assert_eq!(rows.len(), 6);
        let csv = metrics_to_csv(&rows).unwrap();
        assert!(csv.starts_with("frame_index,metric,value\n0,psnr,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ssim_symmetric_and_bounded(seed in 0u64..1000, sigma in 1.0f64..40.0) {
            let a = dead_leaves(40, 32, seed);
            let b = noisy_plane(&a.map(f64::round), sigma, seed);
            let ab = ssim_map(&a, &b, &SsimParams::default()).unwrap();
            let ba = ssim_map(&b, &a, &SsimParams::default()).unwrap();
            prop_assert!((ab.mean - ba.mean).abs() < 1e-9);
            prop_assert!(ab.mean >= -1.0 && ab.mean <= 1.0);
            prop_assert!(ab.map.data().iter().all(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v)));
        }
    }
}
