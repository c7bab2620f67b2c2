//! Spatial-domain steerable pyramid on a first-derivative-of-Gaussian basis.
//!
//! Each scale holds the x and y derivative responses of one Gaussian pyramid
//! level. Because the basis is linear in `(cos θ, sin θ)` and its L2 norm is
//! rotation invariant on the square grid, `cos θ·Rx + sin θ·Ry` equals the
//! response of the directly sampled θ-oriented kernel.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::transforms::{gaussian_pyramid, resample_spatial, ResampleKernel, DEFAULT_PYRAMID_SIGMA};

use super::convolve::{convolve_any, gaussian_blur, Boundary};
use super::kernel::{make_spatial_kernel, SpatialKind};

/// Scale of the derivative basis at every pyramid level.
pub const BASIS_SIGMA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SteerableDecomposition {
    /// Gaussian pyramid levels feeding each scale, finest first.
    pub levels: Vec<Plane>,
    pub rx: Vec<Plane>,
    pub ry: Vec<Plane>,
    /// `levels[s] - expand(levels[s + 1])`; the last entry uses `lowpass`.
    pub bands: Vec<Plane>,
    /// Input minus its blurred copy.
    pub highpass: Plane,
    /// Blurred and decimated deepest level.
    pub lowpass: Plane,
}

fn expand(p: &Plane, w: usize, h: usize) -> Plane {
    resample_spatial(p, w, h, ResampleKernel::Bilinear).expect("non-empty target")
}

pub fn build_steerable(plane: &Plane, scales: usize) -> Result<SteerableDecomposition> {
    if scales == 0 {
        return Err(Error::param("scales", "must be at least 1"));
    }
    let need = 1usize << scales.min(30);
    if plane.width() < need || plane.height() < need {
        return Err(Error::InvalidGeometry(format!(
            "{}x{} plane is too small for {scales} scales",
            plane.width(),
            plane.height()
        )));
    }
    let levels = gaussian_pyramid(plane, scales, DEFAULT_PYRAMID_SIGMA)?;
    let kx = make_spatial_kernel(SpatialKind::GaussD1 { sigma: BASIS_SIGMA, theta: 0.0 })?;
    let ky = make_spatial_kernel(SpatialKind::GaussD1 {
        sigma: BASIS_SIGMA,
        theta: std::f64::consts::FRAC_PI_2,
    })?;
    let rx = levels.iter().map(|l| convolve_any(l, &kx, Boundary::Mirror)).collect();
    let ry = levels.iter().map(|l| convolve_any(l, &ky, Boundary::Mirror)).collect();
    let deepest = levels.last().expect("scales >= 1");
    let lowpass = gaussian_blur(deepest, DEFAULT_PYRAMID_SIGMA, Boundary::Mirror).decimate2();
    let mut bands = Vec::with_capacity(scales);
    for s in 0..scales {
        let cur = &levels[s];
        let coarser = levels.get(s + 1).unwrap_or(&lowpass);
        let up = expand(coarser, cur.width(), cur.height());
        bands.push(cur.zip_map(&up, |a, b| a - b)?);
    }
    let blurred = gaussian_blur(plane, DEFAULT_PYRAMID_SIGMA, Boundary::Mirror);
    let highpass = plane.zip_map(&blurred, |a, b| a - b)?;
    Ok(SteerableDecomposition {
        levels,
        rx,
        ry,
        bands,
        highpass,
        lowpass,
    })
}

impl SteerableDecomposition {
    pub fn scales(&self) -> usize {
        self.levels.len()
    }

    /// Collapse the band-pass stack onto the lowpass residual.
    pub fn reconstruct(&self) -> Plane {
        let mut cur = self.lowpass.clone();
        for band in self.bands.iter().rev() {
            let up = expand(&cur, band.width(), band.height());
            cur = band.zip_map(&up, |a, b| a + b).expect("same geometry");
        }
        cur
    }
}

/// Oriented first-derivative response at `scale` (0 = finest).
pub fn steer(dec: &SteerableDecomposition, scale: usize, theta: f64) -> Result<Plane> {
    if scale >= dec.scales() {
        return Err(Error::param(
            "scale",
            format!("{scale} is out of range for {} scales", dec.scales()),
        ));
    }
    let (c, s) = (theta.cos(), theta.sin());
    dec.rx[scale].zip_map(&dec.ry[scale], |x, y| c * x + s * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(w: usize, h: usize) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Plane::from_fn(w, h, |_, _| rng.random_range(0.0..255.0));
        gaussian_blur(&noise, 1.0, Boundary::Mirror)
    }

    #[test]
    fn zero_angle_is_rx() {
        let dec = build_steerable(&random_plane(64, 48), 4).unwrap();
        assert_eq!(steer(&dec, 2, 0.0).unwrap(), dec.rx[2]);
    }

    #[test]
    fn steering_matches_direct_convolution() {
        let dec = build_steerable(&random_plane(96, 96), 4).unwrap();
        for deg in [30.0f64, 75.0, 200.0] {
            let theta = deg.to_radians();
            let k = make_spatial_kernel(SpatialKind::GaussD1 { sigma: BASIS_SIGMA, theta }).unwrap();
            for s in 0..3 {
                let direct = convolve_any(&dec.levels[s], &k, Boundary::Mirror);
                let steered = steer(&dec, s, theta).unwrap();
                let r = k.radius;
                for y in r..direct.height() - r {
                    for x in r..direct.width() - r {
                        assert!((direct.get(x, y) - steered.get(x, y)).abs() < 1e-6, "{deg} deg scale {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn constant_plane() {
        let dec = build_steerable(&Plane::filled(64, 64, 90.0), 4).unwrap();
        for s in 0..4 {
            for theta in [0.0, 1.0, 4.0] {
                let band = steer(&dec, s, theta).unwrap();
                assert!(band.data().iter().all(|v| v.abs() < 1e-6));
            }
        }
        assert!(dec.lowpass.data().iter().all(|v| (v - 90.0).abs() < 1e-6));
        assert!(dec.highpass.data().iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn reassembly_within_energy_tolerance() {
        let p = random_plane(80, 60);
        let dec = build_steerable(&p, 4).unwrap();
        let err = dec.reconstruct().zip_map(&p, |a, b| a - b).unwrap().energy();
        assert!(err / p.energy() < 5e-2);
    }

    #[test]
    fn scale_out_of_range() {
        let dec = build_steerable(&random_plane(32, 32), 4).unwrap();
        assert!(steer(&dec, 4, 0.0).is_err());
        assert!(build_steerable(&Plane::new(8, 8), 4).is_err());
    }
}
