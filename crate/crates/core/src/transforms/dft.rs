use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::plane::Plane;

use super::dct::{dct2, idct2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Dft,
    Dct,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

/// 2D transform coefficients in row-major order.
///
/// The DFT is unnormalized in the forward direction (the DC term is the
/// sample sum); the DCT is the orthonormal DCT-II. When `centered` is set,
/// quadrants are swapped so that DC sits at `(W/2, H/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub width: usize,
    pub height: usize,
    pub coeffs: Coefficients,
    pub centered: bool,
}

impl Spectrum {
    pub fn kind(&self) -> TransformKind {
        match self.coeffs {
            Coefficients::Complex(_) => TransformKind::Dft,
            Coefficients::Real(_) => TransformKind::Dct,
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Complex(c) => c.iter().map(|z| z.norm()).collect(),
            Coefficients::Real(r) => r.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn complex(&self) -> Option<&[Complex64]> {
        match &self.coeffs {
            Coefficients::Complex(c) => Some(c),
            Coefficients::Real(_) => None,
        }
    }

    pub fn real(&self) -> Option<&[f64]> {
        match &self.coeffs {
            Coefficients::Real(r) => Some(r),
            Coefficients::Complex(_) => None,
        }
    }

    /// Toggle between natural and centered quadrant order.
    pub fn shifted(&self) -> Spectrum {
        let (w, h) = (self.width, self.height);
        let (fwd, inv) = (
            |i: usize, n: usize| (i + n / 2) % n,
            |i: usize, n: usize| (i + n - n / 2) % n,
        );
        let map = |x: usize, y: usize| -> usize {
            if self.centered {
                inv(y, h) * w + inv(x, w)
            } else {
                fwd(y, h) * w + fwd(x, w)
            }
        };
        let coeffs = match &self.coeffs {
            Coefficients::Complex(c) => Coefficients::Complex(scatter(c, w, h, map)),
            Coefficients::Real(r) => Coefficients::Real(scatter(r, w, h, map)),
        };
        Spectrum {
            width: w,
            height: h,
            coeffs,
            centered: !self.centered,
        }
    }
}

fn scatter<T: Copy + Default>(src: &[T], w: usize, h: usize, map: impl Fn(usize, usize) -> usize) -> Vec<T> {
    let mut out = vec![T::default(); src.len()];
    for y in 0..h {
        for x in 0..w {
            out[map(x, y)] = src[y * w + x];
        }
    }
    out
}

/// Run `data.len() / n` contiguous length-`n` FFTs in place.
pub(crate) fn fft_in_place(data: &mut [Complex64], n: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    fft.process(data);
}

pub(crate) fn transpose<T: Copy + Default>(src: &[T], w: usize, h: usize) -> Vec<T> {
    let mut out = vec![T::default(); src.len()];
    for y in 0..h {
        for x in 0..w {
            out[x * h + y] = src[y * w + x];
        }
    }
    out
}

fn fft2(mut data: Vec<Complex64>, w: usize, h: usize, direction: FftDirection) -> Vec<Complex64> {
    fft_in_place(&mut data, w, direction);
    let mut cols = transpose(&data, w, h);
    fft_in_place(&mut cols, h, direction);
    transpose(&cols, h, w)
}

pub fn dft2(plane: &Plane) -> Spectrum {
    let (w, h) = (plane.width(), plane.height());
    let data = plane.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Spectrum {
        width: w,
        height: h,
        coeffs: Coefficients::Complex(fft2(data, w, h, FftDirection::Forward)),
        centered: false,
    }
}

/// Inverse DFT; the real part is returned.
pub fn idft2(spectrum: &Spectrum) -> Result<Plane> {
    let natural;
    let spec = if spectrum.centered {
        natural = spectrum.shifted();
        &natural
    } else {
        spectrum
    };
    let c = spec
        .complex()
        .ok_or_else(|| Error::UnsupportedFormat("idft2 needs DFT coefficients".into()))?;
    let (w, h) = (spec.width, spec.height);
    let out = fft2(c.to_vec(), w, h, FftDirection::Inverse);
    let scale = 1.0 / (w * h) as f64;
    Plane::from_vec(w, h, out.iter().map(|z| z.re * scale).collect())
}

pub fn forward(plane: &Plane, kind: TransformKind) -> Spectrum {
    match kind {
        TransformKind::Dft => dft2(plane),
        TransformKind::Dct => dct2(plane),
    }
}

pub fn inverse(spectrum: &Spectrum) -> Result<Plane> {
    match spectrum.kind() {
        TransformKind::Dft => idft2(spectrum),
        TransformKind::Dct => idct2(spectrum),
    }
}

/// `log(1 + |X|)` rescaled to `[0, 255]`. An all-zero spectrum yields zeros.
pub fn log_magnitude_view(spectrum: &Spectrum, center: bool) -> Plane {
    let shifted;
    let spec = if center != spectrum.centered {
        shifted = spectrum.shifted();
        &shifted
    } else {
        spectrum
    };
    let logs: Vec<f64> = spec.magnitudes().iter().map(|m| m.ln_1p()).collect();
    Plane::from_vec(spec.width, spec.height, logs)
        .expect("spectrum geometry is consistent")
        .normalized_to_display()
}
