//! Orthonormal separable 2D discrete wavelet transform.
//!
//! Filters are periodized so every level is an orthogonal map: energy is
//! preserved and the inverse is the transpose. An odd side is padded by one
//! repeated edge sample before analysis and cropped after synthesis, which
//! keeps band sides at `ceil(n/2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::plane::Plane;

use super::dft::transpose;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavelet {
    Haar,
    /// Daubechies with four vanishing moments (8 taps).
    Db4,
}

const DB4: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

impl Wavelet {
    /// Scaling (lowpass) filter.
    pub fn lowpass(self) -> &'static [f64] {
        const HAAR: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db4 => &DB4,
        }
    }

    /// Quadrature mirror of the lowpass: `g[j] = (-1)^j h[L-1-j]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|j| if j % 2 == 0 { h[l - 1 - j] } else { -h[l - 1 - j] })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    /// Lowpass along x, highpass along y.
    pub lh: Plane,
    /// Highpass along x, lowpass along y.
    pub hl: Plane,
    pub hh: Plane,
}

/// Multi-level decomposition. `details[0]` is the finest level.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPyramid {
    pub wavelet: Wavelet,
    pub details: Vec<DetailBands>,
    pub approx: Plane,
    /// Geometry of the input to each level, finest first.
    pub level_dims: Vec<(usize, usize)>,
}

impl SubbandPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn energy(&self) -> f64 {
        self.approx.energy()
            + self
                .details
                .iter()
                .map(|d| d.lh.energy() + d.hl.energy() + d.hh.energy())
                .sum::<f64>()
    }
}

/// One analysis step over `rows` contiguous signals of even length `n`.
/// Output rows hold `[approx | detail]`.
fn analyze_rows(data: &[f64], n: usize, h: &[f64], g: &[f64]) -> Vec<f64> {
    debug_assert!(n.is_multiple_of(2));
    let half = n / 2;
    let mut out = vec![0.0; data.len()];
    for (src, dst) in data.chunks(n).zip(out.chunks_mut(n)) {
        for k in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (j, (&hj, &gj)) in h.iter().zip(g).enumerate() {
                let x = src[(2 * k + j) % n];
                a += hj * x;
                d += gj * x;
            }
            dst[k] = a;
            dst[half + k] = d;
        }
    }
    out
}

fn synthesize_rows(data: &[f64], n: usize, h: &[f64], g: &[f64]) -> Vec<f64> {
    let half = n / 2;
    let mut out = vec![0.0; data.len()];
    for (src, dst) in data.chunks(n).zip(out.chunks_mut(n)) {
        for k in 0..half {
            let (a, d) = (src[k], src[half + k]);
            for (j, (&hj, &gj)) in h.iter().zip(g).enumerate() {
                dst[(2 * k + j) % n] += hj * a + gj * d;
            }
        }
    }
    out
}

fn pad_even(p: &Plane) -> Plane {
    let w = p.width() + p.width() % 2;
    let h = p.height() + p.height() % 2;
    if (w, h) == (p.width(), p.height()) {
        return p.clone();
    }
    Plane::from_fn(w, h, |x, y| p.get(x.min(p.width() - 1), y.min(p.height() - 1)))
}

fn split_quadrants(data: &[f64], w: usize, h: usize) -> [Plane; 4] {
    let (hw, hh) = (w / 2, h / 2);
    let q = |x0: usize, y0: usize| Plane::from_fn(hw, hh, |x, y| data[(y0 + y) * w + x0 + x]);
    [q(0, 0), q(0, hh), q(hw, 0), q(hw, hh)]
}

pub fn dwt2(plane: &Plane, levels: usize, wavelet: Wavelet) -> Result<SubbandPyramid> {
    if levels == 0 {
        return Err(Error::param("levels", "must be at least 1"));
    }
    let need = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::param("levels", "too many levels"))?;
    if plane.width() < need || plane.height() < need {
        return Err(Error::InvalidGeometry(format!(
            "{}x{} plane is too small for {levels} levels (needs sides >= {need})",
            plane.width(),
            plane.height()
        )));
    }
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut current = plane.clone();
    let mut details = Vec::with_capacity(levels);
    let mut level_dims = Vec::with_capacity(levels);
    for _ in 0..levels {
        level_dims.push((current.width(), current.height()));
        let padded = pad_even(&current);
        let (w, ht) = (padded.width(), padded.height());
        let rows = analyze_rows(padded.data(), w, h, &g);
        let cols = analyze_rows(&transpose(&rows, w, ht), ht, h, &g);
        let full = transpose(&cols, ht, w);
        let [ll, lh, hl, hh] = split_quadrants(&full, w, ht);
        details.push(DetailBands { lh, hl, hh });
        current = ll;
    }
    Ok(SubbandPyramid {
        wavelet,
        details,
        approx: current,
        level_dims,
    })
}

pub fn idwt2(pyr: &SubbandPyramid) -> Result<Plane> {
    let h = pyr.wavelet.lowpass();
    let g = pyr.wavelet.highpass();
    let mut current = pyr.approx.clone();
    for (bands, &(ow, oh)) in pyr.details.iter().zip(&pyr.level_dims).rev() {
        let (hw, hh) = (current.width(), current.height());
        for b in [&bands.lh, &bands.hl, &bands.hh] {
            if (b.width(), b.height()) != (hw, hh) {
                return Err(Error::GeometryMismatch("subband sizes disagree".into()));
            }
        }
        let (w, ht) = (2 * hw, 2 * hh);
        let mut full = vec![0.0; w * ht];
        for (band, (x0, y0)) in [
            (&current, (0, 0)),
            (&bands.lh, (0, hh)),
            (&bands.hl, (hw, 0)),
            (&bands.hh, (hw, hh)),
        ] {
            for y in 0..hh {
                for x in 0..hw {
                    full[(y0 + y) * w + x0 + x] = band.get(x, y);
                }
            }
        }
        let cols = synthesize_rows(&transpose(&full, w, ht), ht, h, &g);
        let rows = synthesize_rows(&transpose(&cols, ht, w), w, h, &g);
        let padded = Plane::from_vec(w, ht, rows)?;
        current = if (w, ht) == (ow, oh) {
            padded
        } else {
            padded.crop(0, 0, ow, oh)
        };
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(w, h, |_, _| rng.random_range(0.0..255.0))
    }

    #[test]
    fn filters_are_orthonormal() {
        for wavelet in [Wavelet::Haar, Wavelet::Db4] {
            let h = wavelet.lowpass();
            let g = wavelet.highpass();
            let l = h.len();
            assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
            assert!(g.iter().sum::<f64>().abs() < 1e-12);
            for shift in (0..l).step_by(2) {
                let hh: f64 = (0..l - shift).map(|j| h[j] * h[j + shift]).sum();
                let hg: f64 = (0..l - shift).map(|j| h[j] * g[j + shift]).sum();
                let expect = if shift == 0 { 1.0 } else { 0.0 };
                assert!((hh - expect).abs() < 1e-12, "{wavelet:?} shift {shift}");
                assert!(hg.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_on_ones() {
        let p = Plane::filled(2, 2, 1.0);
        let pyr = dwt2(&p, 1, Wavelet::Haar).unwrap();
        assert!((pyr.approx.get(0, 0) - 2.0).abs() < 1e-12);
        let d = &pyr.details[0];
        for b in [&d.lh, &d.hl, &d.hh] {
            assert!(b.get(0, 0).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_reconstruction_and_energy() {
        for wavelet in [Wavelet::Haar, Wavelet::Db4] {
            let p = random_plane(64, 64, 7);
            let pyr = dwt2(&p, 3, wavelet).unwrap();
            let dims: Vec<_> = pyr.details.iter().map(|d| (d.hh.width(), d.hh.height())).collect();
            assert_eq!(dims, vec![(32, 32), (16, 16), (8, 8)]);
            assert!(idwt2(&pyr).unwrap().max_abs_diff(&p) < 1e-9);
            assert!((pyr.energy() - p.energy()).abs() / p.energy() < 1e-12);
        }
    }

    #[test]
    fn odd_sides_use_ceil_geometry() {
        let p = random_plane(45, 23, 8);
        let pyr = dwt2(&p, 3, Wavelet::Db4).unwrap();
        assert_eq!((pyr.approx.width(), pyr.approx.height()), (6, 3));
        assert_eq!((pyr.details[0].lh.width(), pyr.details[0].lh.height()), (23, 12));
        assert!(idwt2(&pyr).unwrap().max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn too_small_for_levels() {
        assert!(matches!(
            dwt2(&Plane::new(4, 4), 3, Wavelet::Haar),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(dwt2(&Plane::new(4, 4), 0, Wavelet::Haar).is_err());
    }
}
