//! Single-channel floating point raster used by every processing stage.

use crate::error::{Error, Result};

/// A grayscale plane stored row-major in `f64`.
///
/// Luma is converted into a `Plane` on entry to any algorithm; values are
/// nominally in code units `[0, 255]` but intermediate results (filter
/// responses, residuals) may take any finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "plane must be non-empty, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidGeometry(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    pub fn from_u8(width: usize, height: usize, samples: &[u8]) -> Result<Self> {
        Self::from_vec(width, height, samples.iter().map(|&v| f64::from(v)).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_geometry(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_geometry(&self, other: &Plane) -> Result<()> {
        if self.same_geometry(other) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    /// Sample with coordinates clamped to the plane edge.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        self.check_same_geometry(other)?;
        Ok(Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        assert!(self.same_geometry(other), "geometry mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copy of the sub-rectangle `[x0, x0+w) × [y0, y0+h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Plane {
        assert!(x0 + w <= self.width && y0 + h <= self.height, "crop out of bounds");
        Plane::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))
    }

    /// Keep every other sample starting at (0, 0); output sides are `ceil(n/2)`.
    pub fn decimate2(&self) -> Plane {
        let w = self.width.div_ceil(2);
        let h = self.height.div_ceil(2);
        Plane::from_fn(w, h, |x, y| self.get(2 * x, 2 * y))
    }

    /// Values clamped to `[0, 255]` and rounded half-up to 8-bit codes.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_u8(v)).collect()
    }

    /// Linear rescale of `[min, max]` onto `[0, 255]`; a flat plane maps to zeros.
    pub fn normalized_to_display(&self) -> Plane {
        let (lo, hi) = self.min_max();
        if !(hi > lo) {
            return Plane::new(self.width, self.height);
        }
        let scale = 255.0 / (hi - lo);
        self.map(|v| (v - lo) * scale)
    }
}

/// Round half-up and clamp into an 8-bit code.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Reflect an index into `[0, n)` without repeating the edge sample
/// (`-1 -> 1`, `n -> n-2`). Works for arbitrarily distant indices.
#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as isize;
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

#[inline]
pub fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}
