use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::transforms::{dft2, fft_in_place, transpose};

pub const DEFAULT_SPECTRUM_BINS: usize = 24;
/// Fit band in cycles/pixel, clear of DC leakage and the Nyquist roll-off.
pub const DEFAULT_FIT_BAND: (f64, f64) = (0.02, 0.35);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumAxis {
    SpatialRadial,
    Temporal,
}

/// Mean power per log-spaced frequency bin; empty bins are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrumCurve {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// `P(f) ≈ exp(c) · f^(-gamma)`.
    pub gamma: f64,
    pub c: f64,
    pub r2: f64,
    pub bins_used: usize,
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

fn signed_freq(k: usize, n: usize) -> f64 {
    let k = if k > n / 2 { k as f64 - n as f64 } else { k as f64 };
    k / n as f64
}

/// Accumulates `(frequency, power)` samples into geometric bins on `[lo, hi]`.
struct LogBinner {
    lo: f64,
    ratio: f64,
    sum_f: Vec<f64>,
    sum_p: Vec<f64>,
    count: Vec<usize>,
}

impl LogBinner {
    fn new(lo: f64, hi: f64, bins: usize) -> Self {
        LogBinner {
            lo,
            ratio: (hi / lo).ln() / bins as f64,
            sum_f: vec![0.0; bins],
            sum_p: vec![0.0; bins],
            count: vec![0; bins],
        }
    }

    fn add(&mut self, f: f64, p: f64) {
        if f < self.lo * (1.0 - 1e-12) {
            return;
        }
        let b = ((f / self.lo).ln() / self.ratio).floor().max(0.0) as usize;
        if b >= self.count.len() {
            // Only the exact upper edge lands here; anything beyond is outside.
            if ((f / self.lo).ln() / self.ratio - self.count.len() as f64).abs() < 1e-9 {
                let last = self.count.len() - 1;
                self.push(last, f, p);
            }
            return;
        }
        self.push(b, f, p);
    }

    fn push(&mut self, b: usize, f: f64, p: f64) {
        self.sum_f[b] += f;
        self.sum_p[b] += p;
        self.count[b] += 1;
    }

    fn finish(self) -> PowerSpectrumCurve {
        let mut freqs = Vec::new();
        let mut power = Vec::new();
        for b in 0..self.count.len() {
            if self.count[b] > 0 {
                let n = self.count[b] as f64;
                freqs.push(self.sum_f[b] / n);
                power.push(self.sum_p[b] / n);
            }
        }
        PowerSpectrumCurve { freqs, power }
    }
}

fn spatial(frames: &[Plane], bins: usize) -> Result<PowerSpectrumCurve> {
    let first = &frames[0];
    let (w, h) = (first.width(), first.height());
    if w < 4 || h < 4 {
        return Err(Error::InvalidGeometry(format!("{w}x{h} is too small for a spectrum")));
    }
    let (hx, hy) = (hann(w), hann(h));
    let window_energy: f64 = hx.iter().map(|v| v * v).sum::<f64>() * hy.iter().map(|v| v * v).sum::<f64>();
    let mut binner = LogBinner::new(1.0 / w.max(h) as f64, 0.5, bins);
    let mut acc = vec![0.0; w * h];
    for f in frames {
        first.check_same_geometry(f)?;
        let mean = f.mean();
        let windowed = Plane::from_fn(w, h, |x, y| (f.get(x, y) - mean) * hx[x] * hy[y]);
        let spec = dft2(&windowed);
        for (a, c) in acc.iter_mut().zip(spec.complex().expect("dft")) {
            *a += c.norm_sqr() / window_energy;
        }
    }
    let n = frames.len() as f64;
    for ky in 0..h {
        let fy = signed_freq(ky, h);
        for kx in 0..w {
            let fx = signed_freq(kx, w);
            let f = fx.hypot(fy);
            if f > 0.0 && f <= 0.5 {
                binner.add(f, acc[ky * w + kx] / n);
            }
        }
    }
    Ok(binner.finish())
}

fn temporal(frames: &[Plane], bins: usize) -> Result<PowerSpectrumCurve> {
    let n = frames.len();
    if n < 2 {
        return Err(Error::ClipTooShort { frames: n, required: 2 });
    }
    let first = &frames[0];
    for f in frames {
        first.check_same_geometry(f)?;
    }
    let px = first.len();
    // Pixel-major series so each row is one pixel's history.
    let mut series: Vec<Complex64> = Vec::with_capacity(px * n);
    for f in frames {
        series.extend(f.data().iter().map(|&v| Complex64::new(v, 0.0)));
    }
    let mut series = transpose(&series, px, n);
    for row in series.chunks_mut(n) {
        let mean = row.iter().map(|c| c.re).sum::<f64>() / n as f64;
        row.iter_mut().for_each(|c| c.re -= mean);
    }
    fft_in_place(&mut series, n, FftDirection::Forward);
    let mut power = vec![0.0; n];
    for row in series.chunks(n) {
        for (p, c) in power.iter_mut().zip(row) {
            *p += c.norm_sqr() / n as f64;
        }
    }
    let bins = bins.min(n / 2).max(1);
    let mut binner = LogBinner::new(1.0 / n as f64, 0.5, bins);
    for (k, p) in power.iter().enumerate().take(n / 2 + 1).skip(1) {
        binner.add(k as f64 / n as f64, p / px as f64);
    }
    Ok(binner.finish())
}

/// Spatial: Hann-windowed 2D power averaged over frames and annuli.
/// Temporal: per-pixel power of the mean-removed time series.
pub fn power_spectrum(frames: &[Plane], axis: SpectrumAxis, bins: usize) -> Result<PowerSpectrumCurve> {
    if frames.is_empty() {
        return Err(Error::Degenerate("no frames".into()));
    }
    if bins < 1 {
        return Err(Error::param("bins", "must be at least 1"));
    }
    match axis {
        SpectrumAxis::SpatialRadial => spatial(frames, bins),
        SpectrumAxis::Temporal => temporal(frames, bins),
    }
}

/// Least squares on `ln P = -γ ln f + c` over bins inside `band` with
/// positive power.
pub fn fit_power_law(curve: &PowerSpectrumCurve, band: (f64, f64)) -> Result<PowerLawFit> {
    let mut skipped = 0;
    let pts: Vec<(f64, f64)> = curve
        .freqs
        .iter()
        .zip(&curve.power)
        .filter(|(f, _)| **f >= band.0 && **f <= band.1)
        .filter_map(|(&f, &p)| {
            if p > 0.0 {
                Some((f.ln(), p.ln()))
            } else {
                skipped += 1;
                None
            }
        })
        .collect();
    if skipped > 0 {
        log::debug!("power-law fit skipped {skipped} zero-power bins");
    }
    if pts.len() < 4 {
        return Err(Error::Degenerate(format!(
            "power-law fit needs at least 4 usable bins in [{}, {}], found {}",
            band.0,
            band.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (slope * p.0 + c)).powi(2)).sum();
    let r2 = if ss_tot <= f64::EPSILON * n * my.abs().max(1.0) {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        gamma: -slope,
        c,
        r2,
        bins_used: pts.len(),
    })
}

pub fn curve_to_csv(curve: &PowerSpectrumCurve) -> String {
    let mut s = String::from("freq,power\n");
    for (f, p) in curve.freqs.iter().zip(&curve.power) {
        let _ = writeln!(s, "{f},{p}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::power_law_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn exact_power_law_curve() {
        let freqs: Vec<f64> = (0..20).map(|i| 0.01 * 1.2f64.powi(i)).collect();
        let power = freqs.iter().map(|f| f.powf(-2.0)).collect();
        let fit = fit_power_law(&PowerSpectrumCurve { freqs, power }, (0.0, 1.0)).unwrap();
        assert!((fit.gamma - 2.0).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_curve_has_zero_slope_and_r2() {
        let freqs: Vec<f64> = (1..10).map(|i| i as f64 * 0.03).collect();
        let fit = fit_power_law(&PowerSpectrumCurve { power: vec![5.0; 9], freqs }, (0.0, 1.0)).unwrap();
        assert!(fit.gamma.abs() < 1e-12);
        assert_eq!(fit.r2, 0.0);
    }

    #[test]
    fn too_few_bins() {
        let c = PowerSpectrumCurve { freqs: vec![0.1, 0.2], power: vec![1.0, 0.5] };
        assert!(fit_power_law(&c, (0.0, 1.0)).is_err());
    }

    #[test]
    fn bins_are_increasing_and_positive() {
        let p = power_law_field(64, 48, 1.0, 20.0, 3);
        let c = power_spectrum(&[p], SpectrumAxis::SpatialRadial, 24).unwrap();
        assert!(c.freqs.len() >= 16);
        assert!(c.freqs[0] > 0.0 && c.freqs.windows(2).all(|w| w[0] < w[1]));
        assert!(c.power.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn constant_input_has_no_power() {
        let c = power_spectrum(&[Plane::filled(32, 32, 201.0)], SpectrumAxis::SpatialRadial, 24).unwrap();
        assert!(c.power.iter().all(|&p| p < 1e-20));
        let clip = vec![Plane::filled(4, 4, 9.0); 8];
        let t = power_spectrum(&clip, SpectrumAxis::Temporal, 24).unwrap();
        assert!(t.power.iter().all(|&p| p < 1e-20));
    }

    #[test]
    fn offset_invariance() {
        let p = power_law_field(64, 64, 1.0, 20.0, 9);
        let a = power_spectrum(std::slice::from_ref(&p), SpectrumAxis::SpatialRadial, 24).unwrap();
        let b = power_spectrum(&[p.map(|v| v + 40.0)], SpectrumAxis::SpatialRadial, 24).unwrap();
        for (x, y) in a.power.iter().zip(&b.power) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-12));
        }
    }

    #[test]
    fn white_noise_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = Normal::new(0.0, 20.0).unwrap();
        let p = Plane::from_fn(256, 256, |_, _| n.sample(&mut rng));
        let c = power_spectrum(&[p], SpectrumAxis::SpatialRadial, 24).unwrap();
        let fit = fit_power_law(&c, DEFAULT_FIT_BAND).unwrap();
        assert!(fit.gamma.abs() < 0.15, "gamma {}", fit.gamma);
    }

    #[test]
    fn one_over_f_field_recovers_two() {
        let p = power_law_field(256, 256, 1.0, 30.0, 12);
        let c = power_spectrum(&[p], SpectrumAxis::SpatialRadial, 24).unwrap();
        let fit = fit_power_law(&c, DEFAULT_FIT_BAND).unwrap();
        assert!((fit.gamma - 2.0).abs() < 0.1, "gamma {}", fit.gamma);
    }

    #[test]
    fn temporal_needs_two_frames() {
        assert!(power_spectrum(&[Plane::new(4, 4)], SpectrumAxis::Temporal, 8).is_err());
    }

    #[test]
    fn temporal_sinusoid_peaks_at_its_frequency() {
        let clip: Vec<Plane> = (0..64)
            .map(|t| Plane::filled(3, 3, 100.0 + 50.0 * (2.0 * PI * 0.25 * t as f64).sin()))
            .collect();
        let c = power_spectrum(&clip, SpectrumAxis::Temporal, 64).unwrap();
        let (imax, _) = c.power.iter().enumerate().fold((0, 0.0), |b, (i, &p)| if p > b.1 { (i, p) } else { b });
        // The peak bin averages at most its neighbouring DFT frequencies.
        assert!((c.freqs[imax] - 0.25).abs() <= 1.0 / 64.0);
    }

    #[test]
    fn csv_layout() {
        let c = PowerSpectrumCurve { freqs: vec![0.1], power: vec![2.5] };
        assert_eq!(curve_to_csv(&c), "freq,power\n0.1,2.5\n");
    }
}
