//! Horn–Schunck flow and the shared quadratic/IRLS solver machinery.
//!
//! The discrete energy is
//! `Σ_p w_p (Ix u + Iy v + a)² + (α²/4) Σ_edges (|Δu|² + |Δv|²)`
//! over 4-neighbour edges. Minimizing it at one pixel with its neighbours
//! fixed gives the classic update `u = ū - Ix(Ix ū + Iy v̄ + a)/(α² + Ix² + Iy²)`
//! in the interior. Sweeps update the two checkerboard colours in turn; no
//! two pixels of one colour share an edge, so each half-sweep is an exact
//! block minimization and the energy never increases.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::transforms::{gaussian_pyramid, resample_spatial, ResampleKernel, DEFAULT_PYRAMID_SIGMA};

use super::flow::FlowField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HSParams {
    pub alpha: f64,
    pub iterations: usize,
    /// 1 is the classic single-scale solver.
    pub pyramid_levels: usize,
}

impl Default for HSParams {
    fn default() -> Self {
        HSParams {
            alpha: 15.0,
            iterations: 200,
            pyramid_levels: 1,
        }
    }
}

impl HSParams {
    pub(super) fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "must be positive"));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        if self.pyramid_levels == 0 {
            return Err(Error::param("pyramid_levels", "must be at least 1"));
        }
        Ok(())
    }
}

/// Brightness-constancy linearization around an initial flow: the data
/// residual of a candidate flow `(u, v)` is `ix·u + iy·v + a`.
pub(super) struct Linearized {
    pub ix: Plane,
    pub iy: Plane,
    pub a: Plane,
}

/// Bilinear sample with edge clamping.
pub(super) fn sample_bilinear(p: &Plane, x: f64, y: f64) -> f64 {
    let x = x.clamp(0.0, (p.width() - 1) as f64);
    let y = y.clamp(0.0, (p.height() - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let x1 = (x0 + 1).min(p.width() - 1);
    let y1 = (y0 + 1).min(p.height() - 1);
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let top = p.get(x0, y0) * (1.0 - fx) + p.get(x1, y0) * fx;
    let bottom = p.get(x0, y1) * (1.0 - fx) + p.get(x1, y1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// `f1` sampled at `x + flow(x)`.
pub(super) fn warp(f1: &Plane, flow: &FlowField) -> Plane {
    Plane::from_fn(f1.width(), f1.height(), |x, y| {
        sample_bilinear(f1, x as f64 + flow.u.get(x, y), y as f64 + flow.v.get(x, y))
    })
}

pub(super) fn linearize(f0: &Plane, f1: &Plane, init: &FlowField) -> Linearized {
    let f1w = warp(f1, init);
    let avg = f0.zip_map(&f1w, |a, b| 0.5 * (a + b)).expect("same geometry");
    let ix = Plane::from_fn(avg.width(), avg.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        0.5 * (avg.get_clamped(x + 1, y) - avg.get_clamped(x - 1, y))
    });
    let iy = Plane::from_fn(avg.width(), avg.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        0.5 * (avg.get_clamped(x, y + 1) - avg.get_clamped(x, y - 1))
    });
    let a = Plane::from_fn(avg.width(), avg.height(), |x, y| {
        f1w.get(x, y) - f0.get(x, y) - ix.get(x, y) * init.u.get(x, y) - iy.get(x, y) * init.v.get(x, y)
    });
    Linearized { ix, iy, a }
}

/// Quadratic energy of `flow` under `lin` with per-pixel data weights.
pub(super) fn energy(lin: &Linearized, weights: Option<&[f64]>, alpha: f64, flow: &FlowField) -> f64 {
    let (w, h) = (flow.width(), flow.height());
    let lambda = alpha * alpha / 4.0;
    let (u, v) = (flow.u.data(), flow.v.data());
    let mut data = 0.0;
    for i in 0..w * h {
        let r = lin.ix.data()[i] * u[i] + lin.iy.data()[i] * v[i] + lin.a.data()[i];
        data += weights.map_or(1.0, |wt| wt[i]) * r * r;
    }
    let mut smooth = 0.0;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                smooth += (u[i + 1] - u[i]).powi(2) + (v[i + 1] - v[i]).powi(2);
            }
            if y + 1 < h {
                smooth += (u[i + w] - u[i]).powi(2) + (v[i + w] - v[i]).powi(2);
            }
        }
    }
    data + lambda * smooth
}

/// One red-black sweep over the whole field, in place: a pixel of one colour
/// reads only neighbours of the other colour.
pub(super) fn sweep(lin: &Linearized, weights: Option<&[f64]>, alpha: f64, flow: &mut FlowField) {
    let (w, h) = (flow.width(), flow.height());
    let lambda = alpha * alpha / 4.0;
    let (ixd, iyd, ad) = (lin.ix.data(), lin.iy.data(), lin.a.data());
    let (u, v) = (flow.u.data_mut(), flow.v.data_mut());
    for colour in 0..2 {
        for y in 0..h {
            for x in ((y + colour) % 2..w).step_by(2) {
                let i = y * w + x;
                let (mut su, mut sv, mut n) = (0.0, 0.0, 0.0);
                if x > 0 {
                    su += u[i - 1];
                    sv += v[i - 1];
                    n += 1.0;
                }
                if x + 1 < w {
                    su += u[i + 1];
                    sv += v[i + 1];
                    n += 1.0;
                }
                if y > 0 {
                    su += u[i - w];
                    sv += v[i - w];
                    n += 1.0;
                }
                if y + 1 < h {
                    su += u[i + w];
                    sv += v[i + w];
                    n += 1.0;
                }
                let (ub, vb) = if n > 0.0 { (su / n, sv / n) } else { (u[i], v[i]) };
                let (ix, iy) = (ixd[i], iyd[i]);
                let wt = weights.map_or(1.0, |wt| wt[i]);
                let denom = lambda * n + wt * (ix * ix + iy * iy);
                if denom <= 0.0 {
                    continue;
                }
                let t = wt * (ix * ub + iy * vb + ad[i]) / denom;
                u[i] = ub - ix * t;
                v[i] = vb - iy * t;
            }
        }
    }
}

pub(super) fn check_pair(f0: &Plane, f1: &Plane) -> Result<()> {
    f0.check_same_geometry(f1)
}

/// Upsample a flow field to `(w, h)`, rescaling vectors by the size ratio.
pub(super) fn upsample_flow(flow: &FlowField, w: usize, h: usize) -> FlowField {
    let sx = w as f64 / flow.width() as f64;
    let sy = h as f64 / flow.height() as f64;
    let u = resample_spatial(&flow.u, w, h, ResampleKernel::Bilinear).expect("non-empty");
    let v = resample_spatial(&flow.v, w, h, ResampleKernel::Bilinear).expect("non-empty");
    FlowField {
        u: u.map(|x| x * sx),
        v: v.map(|x| x * sy),
    }
}

/// Pyramid levels for coarse-to-fine estimation, finest first. Levels that
/// would drop below 8 pixels on a side are not built.
pub(super) fn flow_pyramids(f0: &Plane, f1: &Plane, levels: usize) -> Result<(Vec<Plane>, Vec<Plane>)> {
    let mut usable = 1;
    let (mut w, mut h) = (f0.width(), f0.height());
    while usable < levels && w.div_ceil(2) >= 8 && h.div_ceil(2) >= 8 {
        usable += 1;
        w = w.div_ceil(2);
        h = h.div_ceil(2);
    }
    Ok((
        gaussian_pyramid(f0, usable, DEFAULT_PYRAMID_SIGMA)?,
        gaussian_pyramid(f1, usable, DEFAULT_PYRAMID_SIGMA)?,
    ))
}

pub fn horn_schunck(f0: &Plane, f1: &Plane, p: &HSParams) -> Result<FlowField> {
    check_pair(f0, f1)?;
    p.validate()?;
    let (p0, p1) = flow_pyramids(f0, f1, p.pyramid_levels)?;
    let coarsest = p0.last().expect("non-empty");
    let mut flow = FlowField::zeros(coarsest.width(), coarsest.height());
    for level in (0..p0.len()).rev() {
        let (a, b) = (&p0[level], &p1[level]);
        if flow.width() != a.width() || flow.height() != a.height() {
            flow = upsample_flow(&flow, a.width(), a.height());
        }
        let lin = linearize(a, b, &flow);
        for _ in 0..p.iterations {
            sweep(&lin, None, p.alpha, &mut flow);
        }
    }
    Ok(flow)
}

/// Energy of `flow` for the single-scale problem on `(f0, f1)`.
pub fn hs_energy(f0: &Plane, f1: &Plane, flow: &FlowField, alpha: f64) -> Result<f64> {
    check_pair(f0, f1)?;
    f0.check_same_geometry(&flow.u)?;
    let lin = linearize(f0, f1, &FlowField::zeros(f0.width(), f0.height()));
    Ok(energy(&lin, None, alpha, flow))
}
