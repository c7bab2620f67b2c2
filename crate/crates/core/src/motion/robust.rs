//! Coarse-to-fine flow with a Charbonnier data penalty and median filtering.
//!
//! The penalty `sqrt(r² + ε²)` is minimized by iteratively reweighted least
//! squares: each reweighting solves the quadratic problem with data weights
//! `ε / sqrt(r² + ε²)` (1 for small residuals, decaying for outliers).

use crate::error::{Error, Result};
use crate::plane::{clamp_index, Plane};

use super::flow::FlowField;
use super::hs::{check_pair, flow_pyramids, linearize, sweep, upsample_flow, Linearized};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustFlowParams {
    pub pyramid_levels: usize,
    pub warp_steps: usize,
    /// Charbonnier ε in intensity codes.
    pub epsilon: f64,
    pub median_radius: usize,
    pub alpha: f64,
    /// Solver sweeps per warp step.
    pub iterations: usize,
    /// Sweeps between reweightings.
    pub reweight_every: usize,
}

impl Default for RobustFlowParams {
    fn default() -> Self {
        RobustFlowParams {
            pyramid_levels: 3,
            warp_steps: 3,
            epsilon: 2.0,
            median_radius: 1,
            alpha: 15.0,
            iterations: 60,
            reweight_every: 10,
        }
    }
}

impl RobustFlowParams {
    fn validate(&self) -> Result<()> {
        if self.pyramid_levels == 0 || self.warp_steps == 0 || self.iterations == 0 || self.reweight_every == 0 {
            return Err(Error::param("robust_flow", "level, warp and iteration counts must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "must be positive"));
        }
        if !matches!(self.median_radius, 1 | 2) {
            return Err(Error::param("median_radius", "must be 1 or 2"));
        }
        Ok(())
    }
}

fn charbonnier_weights(lin: &Linearized, flow: &FlowField, eps: f64) -> Vec<f64> {
    let (ix, iy, a) = (lin.ix.data(), lin.iy.data(), lin.a.data());
    flow.u
        .data()
        .iter()
        .zip(flow.v.data())
        .enumerate()
        .map(|(i, (u, v))| {
            let r = ix[i] * u + iy[i] * v + a[i];
            eps / (r * r + eps * eps).sqrt()
        })
        .collect()
}

/// Square-window median with clamped borders.
pub(crate) fn median_filter(p: &Plane, radius: usize) -> Plane {
    let r = radius as isize;
    let mut window = Vec::with_capacity((2 * radius + 1).pow(2));
    Plane::from_fn(p.width(), p.height(), |x, y| {
        window.clear();
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = clamp_index(x as isize + dx, p.width());
                let sy = clamp_index(y as isize + dy, p.height());
                window.push(p.get(sx, sy));
            }
        }
        let mid = window.len() / 2;
        *window.select_nth_unstable_by(mid, f64::total_cmp).1
    })
}

pub fn robust_flow(f0: &Plane, f1: &Plane, p: &RobustFlowParams) -> Result<FlowField> {
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
        for _ in 0..p.warp_steps {
            let lin = linearize(a, b, &flow);
            let mut weights = charbonnier_weights(&lin, &flow, p.epsilon);
            for it in 0..p.iterations {
                if it > 0 && it % p.reweight_every == 0 {
                    weights = charbonnier_weights(&lin, &flow, p.epsilon);
                }
                sweep(&lin, Some(&weights), p.alpha, &mut flow);
            }
            flow = FlowField {
                u: median_filter(&flow.u, p.median_radius),
                v: median_filter(&flow.v, p.median_radius),
            };
        }
    }
    Ok(flow)
}
