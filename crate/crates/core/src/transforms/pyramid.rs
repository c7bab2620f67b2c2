use crate::error::{Error, Result};
use crate::filters::{gaussian_blur, Boundary};
use crate::plane::Plane;

pub const DEFAULT_PYRAMID_SIGMA: f64 = 1.0;

/// `levels` planes: the input, then repeated blur + 2x decimation.
pub fn gaussian_pyramid(plane: &Plane, levels: usize, sigma: f64) -> Result<Vec<Plane>> {
    if levels == 0 {
        return Err(Error::param("levels", "must be at least 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    let mut out = Vec::with_capacity(levels);
    out.push(plane.clone());
    for _ in 1..levels {
        let prev = out.last().expect("non-empty");
        out.push(gaussian_blur(prev, sigma, Boundary::Mirror).decimate2());
    }
    Ok(out)
}
