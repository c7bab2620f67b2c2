use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Spatial kernel family and its parameters. Angles are radians, `f0` is in
/// cycles/pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialKind {
    Gaussian { sigma: f64 },
    Dog { sigma1: f64, sigma2: f64 },
    Log { sigma: f64 },
    GaussD1 { sigma: f64, theta: f64 },
    GaussD2 { sigma: f64, theta: f64 },
    GaborEven { sigma: f64, theta: f64, f0: f64 },
    GaborOdd { sigma: f64, theta: f64, f0: f64 },
}

impl SpatialKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpatialKind::Gaussian { .. } => "gaussian",
            SpatialKind::Dog { .. } => "dog",
            SpatialKind::Log { .. } => "log",
            SpatialKind::GaussD1 { .. } => "gauss_d1",
            SpatialKind::GaussD2 { .. } => "gauss_d2",
            SpatialKind::GaborEven { .. } => "gabor_even",
            SpatialKind::GaborOdd { .. } => "gabor_odd",
        }
    }

    pub fn is_lowpass(&self) -> bool {
        matches!(self, SpatialKind::Gaussian { .. })
    }

    fn is_odd(&self) -> bool {
        matches!(self, SpatialKind::GaussD1 { .. } | SpatialKind::GaborOdd { .. })
    }

    fn support_sigma(&self) -> f64 {
        match *self {
            SpatialKind::Dog { sigma2, .. } => sigma2,
            SpatialKind::Gaussian { sigma }
            | SpatialKind::Log { sigma }
            | SpatialKind::GaussD1 { sigma, .. }
            | SpatialKind::GaussD2 { sigma, .. }
            | SpatialKind::GaborEven { sigma, .. }
            | SpatialKind::GaborOdd { sigma, .. } => sigma,
        }
    }
}

/// Square `(2r+1)²` kernel; `taps[(j + r)(2r + 1) + (i + r)]` is the weight
/// at offset `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    pub kind: SpatialKind,
    pub radius: usize,
    pub taps: Vec<f64>,
    /// 1D factor for kinds that are exactly separable.
    pub(crate) separable: Option<Vec<f64>>,
}

impl Kernel2D {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn at(&self, i: isize, j: isize) -> f64 {
        let r = self.radius as isize;
        let s = self.side();
        self.taps[((j + r) as usize) * s + (i + r) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// Single unit tap.
    pub fn identity() -> Self {
        Kernel2D {
            kind: SpatialKind::Gaussian { sigma: 0.0 },
            radius: 0,
            taps: vec![1.0],
            separable: Some(vec![1.0]),
        }
    }
}

fn check_sigma(name: &'static str, sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(name, format!("must be positive, got {sigma}")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::param("theta", "must be finite"));
    }
    Ok(theta.rem_euclid(TAU))
}

fn check_f0(f0: f64) -> Result<()> {
    if !(f0 > 0.0 && f0 <= 0.5) {
        return Err(Error::param("f0", format!("must lie in (0, 0.5], got {f0}")));
    }
    Ok(())
}

fn gauss2(x: f64, y: f64, sigma: f64) -> f64 {
    (-(x * x + y * y) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

/// Normalized 1D Gaussian taps over `[-r, r]`, `r = ceil(3σ)`.
pub(crate) fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|t| (-((t * t) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Sample the continuous kernel at integer offsets, then fix its DC:
/// lowpass kinds to unit sum, the rest to zero mean and unit L2 norm.
pub fn make_spatial_kernel(kind: SpatialKind) -> Result<Kernel2D> {
    let kind = match kind {
        SpatialKind::Gaussian { sigma } | SpatialKind::Log { sigma } => {
            check_sigma("sigma", sigma)?;
            kind
        }
        SpatialKind::Dog { sigma1, sigma2 } => {
            check_sigma("sigma1", sigma1)?;
            check_sigma("sigma2", sigma2)?;
            if sigma1 >= sigma2 {
                return Err(Error::param("sigma1", format!("must be below sigma2 ({sigma1} >= {sigma2})")));
            }
            kind
        }
        SpatialKind::GaussD1 { sigma, theta } => {
            check_sigma("sigma", sigma)?;
            SpatialKind::GaussD1 { sigma, theta: check_theta(theta)? }
        }
        SpatialKind::GaussD2 { sigma, theta } => {
            check_sigma("sigma", sigma)?;
            SpatialKind::GaussD2 { sigma, theta: check_theta(theta)? }
        }
        SpatialKind::GaborEven { sigma, theta, f0 } => {
            check_sigma("sigma", sigma)?;
            check_f0(f0)?;
            SpatialKind::GaborEven { sigma, theta: check_theta(theta)?, f0 }
        }
        SpatialKind::GaborOdd { sigma, theta, f0 } => {
            check_sigma("sigma", sigma)?;
            check_f0(f0)?;
            SpatialKind::GaborOdd { sigma, theta: check_theta(theta)?, f0 }
        }
    };

    let radius = (3.0 * kind.support_sigma()).ceil() as usize;
    let r = radius as isize;
    let side = 2 * radius + 1;

    if let SpatialKind::Gaussian { sigma } = kind {
        let g = gaussian_taps(sigma);
        let taps = g.iter().flat_map(|gy| g.iter().map(move |gx| gx * gy)).collect();
        return Ok(Kernel2D {
            kind,
            radius,
            taps,
            separable: Some(g),
        });
    }

    let sample = |x: f64, y: f64| -> f64 {
        match kind {
            SpatialKind::Dog { sigma1, sigma2 } => gauss2(x, y, sigma1) - gauss2(x, y, sigma2),
            SpatialKind::Log { sigma } => {
                let s2 = sigma * sigma;
                (x * x + y * y - 2.0 * s2) / (s2 * s2) * gauss2(x, y, sigma)
            }
            SpatialKind::GaussD1 { sigma, theta } => {
                let u = x * theta.cos() + y * theta.sin();
                -u / (sigma * sigma) * gauss2(x, y, sigma)
            }
            SpatialKind::GaussD2 { sigma, theta } => {
                let u = x * theta.cos() + y * theta.sin();
                let s2 = sigma * sigma;
                (u * u / (s2 * s2) - 1.0 / s2) * gauss2(x, y, sigma)
            }
            SpatialKind::GaborEven { sigma, theta, f0 } => {
                let u = x * theta.cos() + y * theta.sin();
                (TAU * f0 * u).cos() * gauss2(x, y, sigma)
            }
            SpatialKind::GaborOdd { sigma, theta, f0 } => {
                let u = x * theta.cos() + y * theta.sin();
                (TAU * f0 * u).sin() * gauss2(x, y, sigma)
            }
            SpatialKind::Gaussian { .. } => unreachable!(),
        }
    };

    let mut taps = Vec::with_capacity(side * side);
    for j in -r..=r {
        for i in -r..=r {
            taps.push(sample(i as f64, j as f64));
        }
    }
    if kind.is_odd() {
        // Mirror the first half so k(-i,-j) == -k(i,j) bit for bit.
        let n = taps.len();
        for idx in 0..n / 2 {
            taps[n - 1 - idx] = -taps[idx];
        }
        taps[n / 2] = 0.0;
    } else {
        let mean = taps.iter().sum::<f64>() / taps.len() as f64;
        taps.iter_mut().for_each(|t| *t -= mean);
    }
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    Ok(Kernel2D {
        kind,
        radius,
        taps,
        separable: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemporalKind {
    GaussD1T { sigma: f64 },
    GaussD2T { sigma: f64 },
    /// Gabor with carrier `f0` in cycles/frame; `odd` selects the sine phase.
    GaborT { sigma: f64, f0: f64, odd: bool },
    /// Causal gamma kernel `t^(n-1) e^(-t/τ)`.
    Gamma { order: u32, tau: f64 },
}

impl TemporalKind {
    pub fn is_causal(&self) -> bool {
        matches!(self, TemporalKind::Gamma { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TemporalKind::GaussD1T { .. } => "gauss_d1_t",
            TemporalKind::GaussD2T { .. } => "gauss_d2_t",
            TemporalKind::GaborT { .. } => "gabor_t",
            TemporalKind::Gamma { .. } => "gamma",
        }
    }
}

/// Temporal taps. Symmetric kinds are centered (`taps[r]` weights the
/// current frame); the causal gamma kernel has `taps[0]` = now.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalKernel {
    pub kind: TemporalKind,
    pub taps: Vec<f64>,
}

impl TemporalKernel {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn is_causal(&self) -> bool {
        self.kind.is_causal()
    }

    /// Half-width of a symmetric kernel.
    pub fn radius(&self) -> usize {
        self.taps.len() / 2
    }
}

pub fn make_temporal_kernel(kind: TemporalKind) -> Result<TemporalKernel> {
    let taps = match kind {
        TemporalKind::Gamma { order, tau } => {
            if order == 0 {
                return Err(Error::param("order", "gamma order must be >= 1"));
            }
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::param("tau", format!("must be positive, got {tau}")));
            }
            let len = (6.0 * f64::from(order) * tau).ceil().max(1.0) as usize;
            let raw: Vec<f64> = (0..len)
                .map(|t| {
                    let t = t as f64;
                    t.powi(order as i32 - 1) * (-t / tau).exp()
                })
                .collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        }
        TemporalKind::GaussD1T { sigma }
        | TemporalKind::GaussD2T { sigma }
        | TemporalKind::GaborT { sigma, .. } => {
            check_sigma("sigma", sigma)?;
            if let TemporalKind::GaborT { f0, .. } = kind {
                check_f0(f0)?;
            }
            let r = (3.0 * sigma).ceil() as isize;
            let g = |t: f64| (-t * t / (2.0 * sigma * sigma)).exp();
            let mut taps: Vec<f64> = (-r..=r)
                .map(|t| {
                    let t = t as f64;
                    match kind {
                        TemporalKind::GaussD1T { .. } => -t / (sigma * sigma) * g(t),
                        TemporalKind::GaussD2T { .. } => {
                            (t * t / sigma.powi(4) - 1.0 / (sigma * sigma)) * g(t)
                        }
                        TemporalKind::GaborT { f0, odd: false, .. } => (TAU * f0 * t).cos() * g(t),
                        TemporalKind::GaborT { f0, odd: true, .. } => (TAU * f0 * t).sin() * g(t),
                        TemporalKind::Gamma { .. } => unreachable!(),
                    }
                })
                .collect();
            let odd = matches!(
                kind,
                TemporalKind::GaussD1T { .. } | TemporalKind::GaborT { odd: true, .. }
            );
            let n = taps.len();
            if odd {
                for i in 0..n / 2 {
                    taps[n - 1 - i] = -taps[i];
                }
                taps[n / 2] = 0.0;
            } else {
                let mean = taps.iter().sum::<f64>() / n as f64;
                taps.iter_mut().for_each(|t| *t -= mean);
            }
            let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
            taps.into_iter().map(|t| t / norm).collect()
        }
    };
    Ok(TemporalKernel { kind, taps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<SpatialKind> {
        vec![
            SpatialKind::Gaussian { sigma: 1.0 },
            SpatialKind::Dog { sigma1: 1.0, sigma2: 1.6 },
            SpatialKind::Log { sigma: 1.5 },
            SpatialKind::GaussD1 { sigma: 1.2, theta: 0.7 },
            SpatialKind::GaussD2 { sigma: 1.2, theta: 2.0 },
            SpatialKind::GaborEven { sigma: 2.0, theta: 0.3, f0: 0.25 },
            SpatialKind::GaborOdd { sigma: 2.0, theta: 0.3, f0: 0.1 },
        ]
    }

    #[test]
    fn dc_rules_per_kind() {
        for kind in all_kinds() {
            let k = make_spatial_kernel(kind).unwrap();
            assert!(k.taps.iter().all(|t| t.is_finite()));
            if kind.is_lowpass() {
                assert!((k.sum() - 1.0).abs() < 1e-6, "{kind:?}");
            } else {
                assert!(k.sum().abs() < 1e-6, "{kind:?}");
                let l2: f64 = k.taps.iter().map(|t| t * t).sum();
                assert!((l2 - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_center_is_max_and_radius_rule() {
        let k = make_spatial_kernel(SpatialKind::Gaussian { sigma: 1.0 }).unwrap();
        assert_eq!(k.radius, 3);
        let max = k.taps.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(k.at(0, 0), max);
    }

    #[test]
    fn dog_center_surround_signs() {
        let k = make_spatial_kernel(SpatialKind::Dog { sigma1: 1.0, sigma2: 1.6 }).unwrap();
        assert_eq!(k.radius, 5);
        assert!(k.at(0, 0) > 0.0);
        assert!(k.at(3, 0) < 0.0 && k.at(0, -3) < 0.0 && k.at(2, 2) < 0.0);
    }

    #[test]
    fn odd_gabor_is_exactly_antisymmetric() {
        let k = make_spatial_kernel(SpatialKind::GaborOdd { sigma: 2.0, theta: 1.1, f0: 0.2 }).unwrap();
        let r = k.radius as isize;
        for j in -r..=r {
            for i in -r..=r {
                assert_eq!(k.at(i, j), -k.at(-i, -j));
            }
        }
        assert!(k.sum().abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_spatial_kernel(SpatialKind::Gaussian { sigma: 0.0 }).is_err());
        assert!(make_spatial_kernel(SpatialKind::Log { sigma: -1.0 }).is_err());
        assert!(make_spatial_kernel(SpatialKind::Dog { sigma1: 2.0, sigma2: 2.0 }).is_err());
        assert!(make_spatial_kernel(SpatialKind::GaborEven { sigma: 1.0, theta: 0.0, f0: 0.6 }).is_err());
        assert!(make_temporal_kernel(TemporalKind::Gamma { order: 1, tau: 0.0 }).is_err());
        assert!(make_temporal_kernel(TemporalKind::GaussD1T { sigma: 0.0 }).is_err());
    }

    #[test]
    fn theta_wraps_into_range() {
        let a = make_spatial_kernel(SpatialKind::GaussD1 { sigma: 1.0, theta: -0.5 }).unwrap();
        let b = make_spatial_kernel(SpatialKind::GaussD1 { sigma: 1.0, theta: TAU - 0.5 }).unwrap();
        for (x, y) in a.taps.iter().zip(&b.taps) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_first_order_decays_monotonically() {
        let k = make_temporal_kernel(TemporalKind::Gamma { order: 1, tau: 2.0 }).unwrap();
        assert_eq!(k.len(), 12);
        assert!((k.taps.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        assert!(k.taps.windows(2).all(|w| w[1] < w[0]));
        // Oracle: e^{-t/2} normalized.
        let raw: Vec<f64> = (0..12).map(|t| (-(t as f64) / 2.0).exp()).collect();
        let s: f64 = raw.iter().sum();
        for (a, b) in k.taps.iter().zip(raw.iter().map(|v| v / s)) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn higher_order_gamma_starts_at_zero() {
        let k = make_temporal_kernel(TemporalKind::Gamma { order: 3, tau: 1.5 }).unwrap();
        assert_eq!(k.len(), 27);
        assert_eq!(k.taps[0], 0.0);
        let peak = k.taps.iter().cloned().enumerate().fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        // Mode of t^(n-1) e^(-t/τ) is (n-1)τ = 3.
        assert_eq!(peak.0, 3);
    }

    #[test]
    fn symmetric_temporal_kernels_have_zero_dc() {
        for kind in [
            TemporalKind::GaussD1T { sigma: 1.0 },
            TemporalKind::GaussD2T { sigma: 1.5 },
            TemporalKind::GaborT { sigma: 2.0, f0: 0.2, odd: false },
            TemporalKind::GaborT { sigma: 2.0, f0: 0.2, odd: true },
        ] {
            let k = make_temporal_kernel(kind).unwrap();
            assert_eq!(k.len() % 2, 1);
            assert!(k.taps.iter().sum::<f64>().abs() < 1e-6, "{kind:?}");
        }
    }
}
