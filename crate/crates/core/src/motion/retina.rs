use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{make_spatial_kernel, SpatialKind};
use crate::plane::{mirror_index, Plane};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalContrastParams {
    /// Scale of the Gaussian local mean.
    pub sigma: f64,
    /// Saturation constant added to the local mean, in codes.
    pub l0: f64,
}

impl Default for LocalContrastParams {
    fn default() -> Self {
        LocalContrastParams { sigma: 2.0, l0: 10.0 }
    }
}

/// `c = (p - μ) / (μ + L0)` per frame, with `μ` a Gaussian local mean.
///
/// `p - μ` is accumulated as `Σ k_i (p - p_i)` so a flat neighbourhood
/// yields exactly zero.
pub fn local_contrast(frames: &[Plane], p: &LocalContrastParams) -> Result<Vec<Plane>> {
    if !(p.l0 > 0.0) {
        return Err(Error::param("l0", "must be positive"));
    }
    let k = make_spatial_kernel(SpatialKind::Gaussian { sigma: p.sigma })?;
    let r = k.radius as isize;
    Ok(frames
        .par_iter()
        .map(|f| {
            let (w, h) = (f.width(), f.height());
            let mut out = vec![0.0; w * h];
            out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
                for (x, o) in row.iter_mut().enumerate() {
                    let c = f.get(x, y);
                    let mut diff = 0.0;
                    for j in -r..=r {
                        let sy = mirror_index(y as isize - j, h);
                        for i in -r..=r {
                            let sx = mirror_index(x as isize - i, w);
                            diff += k.at(i, j) * (c - f.get(sx, sy));
                        }
                    }
                    let mu = c - diff;
                    *o = diff / (mu + p.l0);
                }
            });
            Plane::from_vec(w, h, out).expect("geometry preserved")
        })
        .collect())
}

/// Shannon entropy in bits of a 256-bin histogram over `[lo, hi]`.
pub(crate) fn histogram_entropy(p: &Plane, lo: f64, hi: f64) -> f64 {
    let mut counts = [0usize; 256];
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    for &v in p.data() {
        let b = (((v - lo) / span) * 256.0).floor().clamp(0.0, 255.0) as usize;
        counts[b] += 1;
    }
    let n = p.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / n;
            -q * q.log2()
        })
        .sum()
}
