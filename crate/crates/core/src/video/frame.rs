use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::plane::{quantize_u8, Plane};

use super::color::ColorMatrix;

/// Frames per second as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: u32,
    pub den: u32,
}

impl Rational {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::param("fps", format!("{num}:{den} must be positive")));
        }
        Ok(Rational { num, den }.reduced())
    }

    pub const fn integer(num: u32) -> Self {
        Rational { num, den: 1 }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    fn reduced(self) -> Self {
        let g = gcd(u64::from(self.num), u64::from(self.den)) as u32;
        Rational {
            num: self.num / g,
            den: self.den / g,
        }
    }

    /// Product of two ratios, reduced. Returns `None` on overflow.
    pub fn checked_mul(self, other: Rational) -> Option<Rational> {
        let num = u64::from(self.num) * u64::from(other.num);
        let den = u64::from(self.den) * u64::from(other.den);
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        Some(Rational {
            num: u32::try_from(num).ok()?,
            den: u32::try_from(den).ok()?,
        })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameFormat {
    /// Planar 8-bit YCbCr with 2×2 subsampled chroma.
    Y420,
    /// Single floating point luma plane.
    Gray,
    /// Interleaved 8-bit RGB.
    Rgb24,
}

/// Planar 4:2:0 frame. Chroma planes are `ceil(W/2) × ceil(H/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YuvFrame {
    width: usize,
    height: usize,
    y: Vec<u8>,
    cb: Vec<u8>,
    cr: Vec<u8>,
}

impl YuvFrame {
    pub fn new(width: usize, height: usize, y: Vec<u8>, cb: Vec<u8>, cr: Vec<u8>) -> Result<Self> {
        check_y420_geometry(width, height)?;
        let (cw, ch) = chroma_dims(width, height);
        if y.len() != width * height || cb.len() != cw * ch || cr.len() != cw * ch {
            return Err(Error::InvalidGeometry(format!(
                "plane sizes {}/{}/{} do not match {width}x{height} 4:2:0",
                y.len(),
                cb.len(),
                cr.len()
            )));
        }
        Ok(YuvFrame {
            width,
            height,
            y,
            cb,
            cr,
        })
    }

    /// Uniform frame with neutral chroma.
    pub fn gray(width: usize, height: usize, luma: u8) -> Result<Self> {
        check_y420_geometry(width, height)?;
        let (cw, ch) = chroma_dims(width, height);
        Ok(YuvFrame {
            width,
            height,
            y: vec![luma; width * height],
            cb: vec![128; cw * ch],
            cr: vec![128; cw * ch],
        })
    }

    /// Quantize a luma plane and pair it with neutral chroma.
    pub fn from_luma(luma: &Plane) -> Result<Self> {
        let (w, h) = (luma.width(), luma.height());
        check_y420_geometry(w, h)?;
        let (cw, ch) = chroma_dims(w, h);
        Ok(YuvFrame {
            width: w,
            height: h,
            y: luma.to_u8(),
            cb: vec![128; cw * ch],
            cr: vec![128; cw * ch],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn cb(&self) -> &[u8] {
        &self.cb
    }

    pub fn cr(&self) -> &[u8] {
        &self.cr
    }

    pub fn y_mut(&mut self) -> &mut [u8] {
        &mut self.y
    }

    pub fn luma(&self) -> Plane {
        Plane::from_u8(self.width, self.height, &self.y).expect("geometry checked at construction")
    }

    /// Size of one frame payload in bytes (`1.5·W·H` for even sides).
    pub fn payload_len(&self) -> usize {
        payload_len(self.width, self.height)
    }

    pub fn planes(&self) -> [&[u8]; 3] {
        [&self.y, &self.cb, &self.cr]
    }
}

/// Interleaved RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbFrame {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height * 3 {
            return Err(Error::InvalidGeometry(format!(
                "rgb frame {width}x{height} needs {} bytes, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(RgbFrame {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        RgbFrame {
            width,
            height,
            data: rgb.iter().copied().cycle().take(width * height * 3).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn from_gray(plane: &Plane) -> Self {
        let mut data = Vec::with_capacity(plane.len() * 3);
        for &v in plane.data() {
            let c = quantize_u8(v);
            data.extend_from_slice(&[c, c, c]);
        }
        RgbFrame {
            width: plane.width(),
            height: plane.height(),
            data,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Y420(YuvFrame),
    Gray(Plane),
    Rgb24(RgbFrame),
}

impl Frame {
    pub fn format(&self) -> FrameFormat {
        match self {
            Frame::Y420(_) => FrameFormat::Y420,
            Frame::Gray(_) => FrameFormat::Gray,
            Frame::Rgb24(_) => FrameFormat::Rgb24,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Frame::Y420(f) => f.width(),
            Frame::Gray(p) => p.width(),
            Frame::Rgb24(f) => f.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Frame::Y420(f) => f.height(),
            Frame::Gray(p) => p.height(),
            Frame::Rgb24(f) => f.height(),
        }
    }

    /// Luma as a float plane. RGB input uses the full-range BT.601 weights.
    pub fn luma(&self) -> Plane {
        match self {
            Frame::Y420(f) => f.luma(),
            Frame::Gray(p) => p.clone(),
            Frame::Rgb24(f) => {
                let m = ColorMatrix::BT601_FULL;
                Plane::from_fn(f.width(), f.height(), |x, y| {
                    let [r, g, b] = f.pixel(x, y);
                    m.rgb_to_ycbcr(r, g, b)[0]
                })
            }
        }
    }

    pub fn as_y420(&self) -> Option<&YuvFrame> {
        match self {
            Frame::Y420(f) => Some(f),
            _ => None,
        }
    }

    /// Same frame with its luma replaced; 4:2:0 chroma is kept as is.
    pub fn with_luma(&self, luma: &Plane) -> Result<Frame> {
        if luma.width() != self.width() || luma.height() != self.height() {
            return Err(Error::GeometryMismatch(format!(
                "luma {}x{} vs frame {}x{}",
                luma.width(),
                luma.height(),
                self.width(),
                self.height()
            )));
        }
        match self {
            Frame::Y420(f) => {
                let mut f = f.clone();
                f.y = luma.to_u8();
                Ok(Frame::Y420(f))
            }
            Frame::Gray(_) => Ok(Frame::Gray(luma.clone())),
            Frame::Rgb24(_) => Err(Error::UnsupportedFormat("RGB frames have no separate luma".into())),
        }
    }
}

/// An ordered run of frames sharing geometry and format.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoClip {
    frames: Vec<Frame>,
    fps: Rational,
}

impl VideoClip {
    pub fn new(frames: Vec<Frame>, fps: Rational) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidGeometry("a clip needs at least one frame".into()))?;
        let (w, h, fmt) = (first.width(), first.height(), first.format());
        if let Some((i, _)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.width() != w || f.height() != h || f.format() != fmt)
        {
            return Err(Error::GeometryMismatch(format!(
                "frame {i} differs from frame 0 ({w}x{h} {fmt:?})"
            )));
        }
        if fps.num == 0 || fps.den == 0 {
            return Err(Error::param("fps", "numerator and denominator must be positive"));
        }
        Ok(VideoClip { frames, fps })
    }

    pub fn from_luma_planes(planes: &[Plane], fps: Rational) -> Result<Self> {
        let frames = planes
            .iter()
            .map(|p| YuvFrame::from_luma(p).map(Frame::Y420))
            .collect::<Result<Vec<_>>>()?;
        VideoClip::new(frames, fps)
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> Rational {
        self.fps
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn format(&self) -> FrameFormat {
        self.frames[0].format()
    }

    pub fn luma_planes(&self) -> Vec<Plane> {
        self.frames.iter().map(Frame::luma).collect()
    }

    /// SHA-256 over the raw samples of every frame in order (hex encoded).
    ///
    /// For 4:2:0 clips this covers exactly the plane bytes of the `.y4m`
    /// payload, without the `FRAME` markers.
    pub fn sample_checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for frame in &self.frames {
            match frame {
                Frame::Y420(f) => {
                    for p in f.planes() {
                        hasher.update(p);
                    }
                }
                Frame::Rgb24(f) => hasher.update(f.data()),
                Frame::Gray(p) => {
                    for v in p.data() {
                        hasher.update(v.to_le_bytes());
                    }
                }
            }
        }
        hex::encode(hasher.finalize())
    }
}

pub(crate) fn check_y420_geometry(width: usize, height: usize) -> Result<()> {
    if width < 2 || height < 2 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::InvalidGeometry(format!(
            "4:2:0 frames need even sides >= 2, got {width}x{height}"
        )));
    }
    Ok(())
}

pub(crate) fn chroma_dims(width: usize, height: usize) -> (usize, usize) {
    (width.div_ceil(2), height.div_ceil(2))
}

pub(crate) fn payload_len(width: usize, height: usize) -> usize {
    let (cw, ch) = chroma_dims(width, height);
    width * height + 2 * cw * ch
}
