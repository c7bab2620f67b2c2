//! V1-style directional motion energy.
//!
//! Each tuning is a complex spatiotemporal Gabor: a spatial carrier along the
//! preferred motion direction (bars perpendicular to it) times a temporal
//! carrier at `f0·speed` cycles/frame. Both Gaussian envelopes have unit
//! sum and the temporal filter has zero DC, so static input gives no energy.
//! Energies `|R|²` are divisively normalized across the six tunings.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plane::{mirror_index, Plane};

/// Preferred directions in degrees; 0 is rightward, 90 is upward.
pub const V1_DIRECTIONS_DEG: [f64; 6] = [0.0, 60.0, 120.0, 180.0, 240.0, 300.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V1Params {
    /// Spatial carrier in cycles/pixel.
    pub f0: f64,
    pub sigma_s: f64,
    pub sigma_t: f64,
    /// Preferred speed in pixels/frame.
    pub speed: f64,
    /// Normalization constant in squared codes.
    pub c_n: f64,
}

impl Default for V1Params {
    fn default() -> Self {
        V1Params {
            f0: 0.1,
            sigma_s: 4.0,
            sigma_t: 3.0,
            speed: 1.0,
            c_n: 1.0,
        }
    }
}

impl V1Params {
    fn validate(&self) -> Result<()> {
        if !(self.f0 > 0.0 && self.f0 <= 0.5) {
            return Err(Error::param("f0", "must lie in (0, 0.5]"));
        }
        for (name, v) in [("sigma_s", self.sigma_s), ("sigma_t", self.sigma_t), ("speed", self.speed), ("c_n", self.c_n)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        Ok(())
    }

    pub fn temporal_radius(&self) -> usize {
        (3.0 * self.sigma_t).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct V1Response {
    /// Input index of the first output frame; outputs cover only frames with
    /// full temporal support.
    pub first_frame: usize,
    /// `responses[t][k]`: normalized energy of tuning `k`, each in `[0, 1)`.
    pub responses: Vec<Vec<Plane>>,
    /// Index into [`V1_DIRECTIONS_DEG`] of the strongest tuning per pixel.
    pub preferred: Vec<Plane>,
}

fn unit_gaussian(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let g: Vec<f64> = (-r..=r).map(|t| (-(t * t) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// Complex 1D taps `G(t)·exp(i·ω·t)` centered on index `r`.
fn modulated(gauss: &[f64], omega: f64) -> Vec<Complex64> {
    let r = (gauss.len() / 2) as f64;
    gauss
        .iter()
        .enumerate()
        .map(|(i, &g)| Complex64::from_polar(g, omega * (i as f64 - r)))
        .collect()
}

fn conv_rows(src: &[Complex64], w: usize, taps: &[Complex64]) -> Vec<Complex64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![Complex64::default(); src.len()];
    out.par_chunks_mut(w).zip(src.par_chunks(w)).for_each(|(o, s)| {
        for (x, ov) in o.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for (t, k) in taps.iter().enumerate() {
                acc += k * s[mirror_index(x as isize - (t as isize - r), w)];
            }
            *ov = acc;
        }
    });
    out
}

fn conv_cols(src: &[Complex64], w: usize, h: usize, taps: &[Complex64]) -> Vec<Complex64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![Complex64::default(); src.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(y, o)| {
        for (t, k) in taps.iter().enumerate() {
            let sy = mirror_index(y as isize - (t as isize - r), h);
            for (ov, sv) in o.iter_mut().zip(&src[sy * w..(sy + 1) * w]) {
                *ov += k * sv;
            }
        }
    });
    out
}

pub fn v1_energy(frames: &[Plane], p: &V1Params) -> Result<V1Response> {
    p.validate()?;
    let rt = p.temporal_radius();
    let need = 2 * rt + 1;
    if frames.len() < need {
        return Err(Error::ClipTooShort {
            frames: frames.len(),
            required: need,
        });
    }
    let first = &frames[0];
    for f in frames {
        first.check_same_geometry(f)?;
    }
    let (w, h) = (first.width(), first.height());

    // Temporal filter G(τ)·exp(-iωτ) with its real part made zero-mean.
    let omega_t = TAU * p.f0 * p.speed;
    let mut ht = modulated(&unit_gaussian(p.sigma_t), -omega_t);
    let mean_re = ht.iter().map(|c| c.re).sum::<f64>() / ht.len() as f64;
    ht.iter_mut().for_each(|c| c.re -= mean_re);

    let gs = unit_gaussian(p.sigma_s);
    let spatial: Vec<(Vec<Complex64>, Vec<Complex64>)> = V1_DIRECTIONS_DEG
        .iter()
        .map(|deg| {
            let phi = deg.to_radians();
            let (kx, ky) = (TAU * p.f0 * phi.cos(), -TAU * p.f0 * phi.sin());
            (modulated(&gs, kx), modulated(&gs, ky))
        })
        .collect();

    let mut responses = Vec::with_capacity(frames.len() - 2 * rt);
    let mut preferred = Vec::with_capacity(frames.len() - 2 * rt);
    for t in rt..frames.len() - rt {
        let mut temporal = vec![Complex64::default(); w * h];
        for (i, k) in ht.iter().enumerate() {
            let src = &frames[t + rt - i];
            for (acc, &v) in temporal.iter_mut().zip(src.data()) {
                *acc += k * v;
            }
        }
        let energies: Vec<Vec<f64>> = spatial
            .iter()
            .map(|(tx, ty)| {
                let rows = conv_rows(&temporal, w, tx);
                conv_cols(&rows, w, h, ty).iter().map(|c| c.norm_sqr()).collect()
            })
            .collect();
        let mut norm: Vec<Plane> = Vec::with_capacity(6);
        let total: Vec<f64> = (0..w * h)
            .map(|i| energies.iter().map(|e| e[i]).sum::<f64>() + p.c_n)
            .collect();
        for e in &energies {
            let data = e.iter().zip(&total).map(|(v, s)| v / s).collect();
            norm.push(Plane::from_vec(w, h, data)?);
        }
        let pref = Plane::from_fn(w, h, |x, y| {
            let i = y * w + x;
            let mut best = 0;
            for k in 1..energies.len() {
                if energies[k][i] > energies[best][i] {
                    best = k;
                }
            }
            best as f64
        });
        responses.push(norm);
        preferred.push(pref);
    }
    Ok(V1Response {
        first_frame: rt,
        responses,
        preferred,
    })
}
