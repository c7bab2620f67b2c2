//! Seeded synthetic imagery used by the corpus, the demos and the tests.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftDirection;

use crate::filters::{gaussian_blur, Boundary};
use crate::plane::Plane;
use crate::transforms::{fft_in_place, transpose};

#[derive(Debug, Clone, Copy)]
struct Blob {
    cx: f64,
    cy: f64,
    sigma: f64,
    amp: f64,
}

/// A smooth field of overlapping Gaussian blobs. Sampling at a shifted origin
/// gives an exact sub-pixel translation with no interpolation.
#[derive(Debug, Clone)]
pub struct BlobField {
    blobs: Vec<Blob>,
    base: f64,
}

impl BlobField {
    /// Density scales with area so every neighbourhood carries gradient.
    pub fn new(width: usize, height: usize, seed: u64) -> Self {
        Self::with_sigma(width, height, seed, 1.5, 3.0)
    }

    pub fn with_sigma(width: usize, height: usize, seed: u64, sigma_lo: f64, sigma_hi: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let margin = 24.0;
        let (w, h) = (width as f64 + 2.0 * margin, height as f64 + 2.0 * margin);
        let count = ((w * h) / (2.5 * sigma_lo * sigma_hi)).ceil() as usize;
        let blobs = (0..count)
            .map(|_| Blob {
                cx: rng.random_range(0.0..w) - margin,
                cy: rng.random_range(0.0..h) - margin,
                sigma: rng.random_range(sigma_lo..sigma_hi),
                amp: rng.random_range(20.0..45.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            })
            .collect();
        BlobField { blobs, base: 128.0 }
    }

    /// Render `f(x - dx, y - dy)`, i.e. the field moved by `(dx, dy)`.
    pub fn render(&self, width: usize, height: usize, dx: f64, dy: f64) -> Plane {
        let mut p = Plane::filled(width, height, self.base);
        for b in &self.blobs {
            let (cx, cy) = (b.cx + dx, b.cy + dy);
            let reach = 4.0 * b.sigma;
            let x0 = (cx - reach).floor().max(0.0) as usize;
            let y0 = (cy - reach).floor().max(0.0) as usize;
            let x1 = ((cx + reach).ceil() as isize).min(width as isize - 1);
            let y1 = ((cy + reach).ceil() as isize).min(height as isize - 1);
            if x1 < x0 as isize || y1 < y0 as isize {
                continue;
            }
            let k = 1.0 / (2.0 * b.sigma * b.sigma);
            for y in y0..=y1 as usize {
                for x in x0..=x1 as usize {
                    let (ex, ey) = (x as f64 - cx, y as f64 - cy);
                    let v = p.get(x, y) + b.amp * (-(ex * ex + ey * ey) * k).exp();
                    p.set(x, y, v);
                }
            }
        }
        p.map(|v| v.clamp(0.0, 255.0))
    }
}

/// Occluding random discs with a power-law radius distribution, lightly
/// anti-aliased. Stands in for a natural photograph: edges, flat regions,
/// near-1/f² spectrum and heavy-tailed band-pass statistics.
pub fn dead_leaves(width: usize, height: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Plane::filled(width, height, 128.0);
    let r_min = 1.5f64;
    let r_max = (width.min(height) as f64 / 3.0).max(r_min + 1.0);
    let area = (width * height) as f64;
    let count = (area / 12.0) as usize + 200;
    for _ in 0..count {
        // Inverse-CDF sample of p(r) ∝ r^-3 on [r_min, r_max].
        let u: f64 = rng.random();
        let inv = 1.0 / (r_min * r_min) - u * (1.0 / (r_min * r_min) - 1.0 / (r_max * r_max));
        let r = 1.0 / inv.sqrt();
        let cx = rng.random_range(-r..width as f64 + r);
        let cy = rng.random_range(-r..height as f64 + r);
        let level: f64 = rng.random_range(10.0..245.0);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let y0 = (cy - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil() as isize).min(width as isize - 1);
        let y1 = ((cy + r).ceil() as isize).min(height as isize - 1);
        if x1 < 0 || y1 < 0 {
            continue;
        }
        for y in y0..=y1 as usize {
            for x in x0..=x1 as usize {
                let (ex, ey) = (x as f64 - cx, y as f64 - cy);
                if ex * ex + ey * ey <= r * r {
                    p.set(x, y, level);
                }
            }
        }
    }
    gaussian_blur(&p, 0.6, Boundary::Mirror)
}

/// Real field whose amplitude spectrum falls as `f^(-exponent)` (power as
/// `f^(-2·exponent)`), random phases, rescaled to mean 128 and std `std`.
pub fn power_law_field(width: usize, height: usize, exponent: f64, std: f64, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![Complex64::default(); width * height];
    for ky in 0..height {
        let fy = signed_freq(ky, height);
        for kx in 0..width {
            let fx = signed_freq(kx, width);
            let f = (fx * fx + fy * fy).sqrt();
            if f == 0.0 {
                continue;
            }
            let phase: f64 = rng.random_range(0.0..TAU);
            buf[ky * width + kx] = Complex64::from_polar(f.powf(-exponent), phase);
        }
    }
    fft_in_place(&mut buf, width, FftDirection::Inverse);
    let mut t = transpose(&buf, width, height);
    fft_in_place(&mut t, height, FftDirection::Inverse);
    let data: Vec<f64> = transpose(&t, height, width).iter().map(|c| c.re).collect();
    let plane = Plane::from_vec(width, height, data).expect("geometry");
    let mean = plane.mean();
    let sd = (plane.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / plane.len() as f64).sqrt();
    if sd == 0.0 {
        return Plane::filled(width, height, 128.0);
    }
    plane.map(|v| 128.0 + (v - mean) * std / sd)
}

fn signed_freq(k: usize, n: usize) -> f64 {
    let k = if k > n / 2 { k as f64 - n as f64 } else { k as f64 };
    k / n as f64
}

/// Sinusoid moving along `direction_deg` (0 = right, 90 = up) at `speed`
/// pixels/frame, sampled at frame `t`.
#[allow(clippy::too_many_arguments)]
pub fn drifting_grating(
    width: usize,
    height: usize,
    t: f64,
    freq: f64,
    direction_deg: f64,
    speed: f64,
    mean: f64,
    amplitude: f64,
) -> Plane {
    let phi = direction_deg.to_radians();
    let (dx, dy) = (phi.cos(), -phi.sin());
    Plane::from_fn(width, height, |x, y| {
        let u = x as f64 * dx + y as f64 * dy;
        mean + amplitude * (TAU * freq * (u - speed * t)).cos()
    })
}
