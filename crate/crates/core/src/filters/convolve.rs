use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plane::{clamp_index, mirror_index, Plane};

use super::kernel::{gaussian_taps, Kernel2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Reflect about the edge sample (`-1 -> 1`).
    #[default]
    Mirror,
    /// Repeat the edge sample.
    Clamp,
}

impl Boundary {
    #[inline]
    fn map(self, i: isize, n: usize) -> usize {
        match self {
            Boundary::Mirror => mirror_index(i, n),
            Boundary::Clamp => clamp_index(i, n),
        }
    }
}

/// For each output position, the source index of offset `t - r`
/// where `t` runs over `0..2r+1`, after flipping for convolution.
fn index_table(n: usize, r: usize, boundary: Boundary) -> Vec<usize> {
    let side = 2 * r + 1;
    let mut table = Vec::with_capacity(n * side);
    for x in 0..n {
        for t in 0..side {
            let offset = t as isize - r as isize;
            table.push(boundary.map(x as isize - offset, n));
        }
    }
    table
}

/// Exact split of a square tap matrix into `Σ row ⊗ col` terms by
/// Gaussian elimination with complete pivoting. Stops once the residual is
/// at round-off level; `None` if that takes more than `max_terms` terms.
fn low_rank_terms(taps: &[f64], side: usize, max_terms: usize) -> Option<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut res = taps.to_vec();
    let scale = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut terms = Vec::new();
    loop {
        let (idx, piv) = res
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &v)| if v.abs() > best.1.abs() { (i, v) } else { best });
        if piv.abs() <= 1e-14 * scale {
            return Some(terms);
        }
        if terms.len() == max_terms {
            return None;
        }
        let (pj, pi) = (idx / side, idx % side);
        let col: Vec<f64> = (0..side).map(|j| res[j * side + pi]).collect();
        let row: Vec<f64> = (0..side).map(|i| res[pj * side + i] / piv).collect();
        for (j, c) in col.iter().enumerate() {
            for (i, r) in row.iter().enumerate() {
                res[j * side + i] -= c * r;
            }
        }
        terms.push((row, col));
    }
}

/// 2D convolution with any kernel size; boundaries reflect repeatedly if needed.
pub(crate) fn convolve_any(plane: &Plane, k: &Kernel2D, boundary: Boundary) -> Plane {
    if let Some(g) = &k.separable {
        return separable(plane, g, g, boundary);
    }
    let side = k.side();
    if let Some(terms) = low_rank_terms(&k.taps, side, side / 3) {
        let (w, h) = (plane.width(), plane.height());
        let mut out = vec![0.0; w * h];
        for (row, col) in &terms {
            let part = separable(plane, row, col, boundary);
            out.iter_mut().zip(part.data()).for_each(|(o, p)| *o += p);
        }
        return Plane::from_vec(w, h, out).expect("geometry preserved");
    }
    let (w, h) = (plane.width(), plane.height());
    let r = k.radius;
    let xt = index_table(w, r, boundary);
    let yt = index_table(h, r, boundary);
    let src = plane.data();
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..side {
                let sy = yt[y * side + j] * w;
                let krow = &k.taps[j * side..(j + 1) * side];
                let xs = &xt[x * side..(x + 1) * side];
                for (kv, &sx) in krow.iter().zip(xs) {
                    acc += kv * src[sy + sx];
                }
            }
            *o = acc;
        }
    });
    Plane::from_vec(w, h, out).expect("geometry preserved")
}

/// Convolve rows with `kx` then columns with `ky` (both centered, odd length).
pub(crate) fn separable(plane: &Plane, kx: &[f64], ky: &[f64], boundary: Boundary) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    let rx = kx.len() / 2;
    let ry = ky.len() / 2;
    let xt = index_table(w, rx, boundary);
    let yt = index_table(h, ry, boundary);
    let src = plane.data();
    let mut tmp = vec![0.0; w * h];
    tmp.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let s = &src[y * w..(y + 1) * w];
        for (x, o) in row.iter_mut().enumerate() {
            let xs = &xt[x * kx.len()..(x + 1) * kx.len()];
            *o = kx.iter().zip(xs).map(|(kv, &sx)| kv * s[sx]).sum();
        }
    });
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let ys = &yt[y * ky.len()..(y + 1) * ky.len()];
        for (kv, &sy) in ky.iter().zip(ys) {
            let s = &tmp[sy * w..(sy + 1) * w];
            for (o, v) in row.iter_mut().zip(s) {
                *o += kv * v;
            }
        }
    });
    Plane::from_vec(w, h, out).expect("geometry preserved")
}

/// Linear convolution (correlation with the flipped kernel). Output has the
/// input geometry. The kernel radius must be below half the shorter side.
pub fn convolve2d(plane: &Plane, k: &Kernel2D, boundary: Boundary) -> Result<Plane> {
    let min_side = plane.width().min(plane.height());
    if 2 * k.radius >= min_side {
        return Err(Error::KernelTooLarge {
            radius: k.radius,
            width: plane.width(),
            height: plane.height(),
        });
    }
    Ok(convolve_any(plane, k, boundary))
}

/// Normalized Gaussian blur (`r = ceil(3σ)`), valid for any plane size.
pub fn gaussian_blur(plane: &Plane, sigma: f64, boundary: Boundary) -> Plane {
    let g = gaussian_taps(sigma);
    separable(plane, &g, &g, boundary)
}
