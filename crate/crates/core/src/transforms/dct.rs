//! Orthonormal DCT-II and its inverse, computed through a length-N FFT of
//! the even/odd-reordered sequence.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::plane::Plane;

use super::dft::{fft_in_place, transpose, Coefficients, Spectrum};

fn scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

/// Batched forward DCT over `data.len() / n` contiguous rows.
fn dct_rows(data: &[f64], n: usize) -> Vec<f64> {
    let rows = data.len() / n;
    let mut buf = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        let src = &data[r * n..(r + 1) * n];
        let dst = &mut buf[r * n..(r + 1) * n];
        for i in 0..n.div_ceil(2) {
            dst[i] = Complex64::new(src[2 * i], 0.0);
        }
        for i in 0..n / 2 {
            dst[n - 1 - i] = Complex64::new(src[2 * i + 1], 0.0);
        }
    }
    fft_in_place(&mut buf, n, FftDirection::Forward);
    let twiddle: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(scale(k, n), -PI * k as f64 / (2 * n) as f64))
        .collect();
    buf.chunks(n)
        .flat_map(|row| row.iter().zip(&twiddle).map(|(v, t)| (v * t).re))
        .collect()
}

fn idct_rows(data: &[f64], n: usize) -> Vec<f64> {
    let rows = data.len() / n;
    let mut buf = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        let src = &data[r * n..(r + 1) * n];
        let dst = &mut buf[r * n..(r + 1) * n];
        for k in 0..n {
            let yk = src[k] / scale(k, n);
            let ynk = if k == 0 { 0.0 } else { src[n - k] / scale(n - k, n) };
            dst[k] = Complex64::new(yk, -ynk) * Complex64::from_polar(1.0, PI * k as f64 / (2 * n) as f64);
        }
    }
    fft_in_place(&mut buf, n, FftDirection::Inverse);
    let mut out = vec![0.0; data.len()];
    for r in 0..rows {
        let v = &buf[r * n..(r + 1) * n];
        let dst = &mut out[r * n..(r + 1) * n];
        for i in 0..n.div_ceil(2) {
            dst[2 * i] = v[i].re / n as f64;
        }
        for i in 0..n / 2 {
            dst[2 * i + 1] = v[n - 1 - i].re / n as f64;
        }
    }
    out
}

pub fn dct1(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    dct_rows(x, x.len())
}

pub fn idct1(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    idct_rows(x, x.len())
}

/// Separable orthonormal 2D DCT-II.
pub fn dct2(plane: &Plane) -> Spectrum {
    let (w, h) = (plane.width(), plane.height());
    let rows = dct_rows(plane.data(), w);
    let cols = dct_rows(&transpose(&rows, w, h), h);
    Spectrum {
        width: w,
        height: h,
        coeffs: Coefficients::Real(transpose(&cols, h, w)),
        centered: false,
    }
}

pub fn idct2(spectrum: &Spectrum) -> Result<Plane> {
    let natural;
    let spec = if spectrum.centered {
        natural = spectrum.shifted();
        &natural
    } else {
        spectrum
    };
    let c = spec
        .real()
        .ok_or_else(|| Error::UnsupportedFormat("idct2 needs DCT coefficients".into()))?;
    let (w, h) = (spec.width, spec.height);
    let cols = idct_rows(&transpose(c, w, h), h);
    let rows = idct_rows(&transpose(&cols, h, w), w);
    Plane::from_vec(w, h, rows)
}
