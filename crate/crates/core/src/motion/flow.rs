use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{quantize_u8, Plane};
use crate::video::{Frame, RgbFrame};

/// Dense displacement field in pixels/frame; `u` points right, `v` down.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub u: Plane,
    pub v: Plane,
}

impl FlowField {
    pub fn new(u: Plane, v: Plane) -> Result<Self> {
        u.check_same_geometry(&v)?;
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::InvalidData("flow contains non-finite values".into()));
        }
        Ok(FlowField { u, v })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        FlowField {
            u: Plane::new(width, height),
            v: Plane::new(width, height),
        }
    }

    pub fn uniform(width: usize, height: usize, u: f64, v: f64) -> Self {
        FlowField {
            u: Plane::filled(width, height, u),
            v: Plane::filled(width, height, v),
        }
    }

    pub fn width(&self) -> usize {
        self.u.width()
    }

    pub fn height(&self) -> usize {
        self.u.height()
    }

    pub fn magnitude(&self) -> Plane {
        self.u.zip_map(&self.v, |a, b| a.hypot(b)).expect("same geometry")
    }

    /// Mean endpoint error against a constant ground truth, ignoring a
    /// `margin`-pixel border.
    pub fn mean_epe(&self, gu: f64, gv: f64, margin: usize) -> f64 {
        let (w, h) = (self.width(), self.height());
        let mut acc = 0.0;
        let mut n = 0usize;
        for y in margin..h.saturating_sub(margin) {
            for x in margin..w.saturating_sub(margin) {
                acc += (self.u.get(x, y) - gu).hypot(self.v.get(x, y) - gv);
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            acc / n as f64
        }
    }

    /// Mean endpoint distance between two fields over the interior.
    pub fn mean_distance(&self, other: &FlowField, margin: usize) -> f64 {
        let (w, h) = (self.width(), self.height());
        let mut acc = 0.0;
        let mut n = 0usize;
        for y in margin..h.saturating_sub(margin) {
            for x in margin..w.saturating_sub(margin) {
                acc += (self.u.get(x, y) - other.u.get(x, y)).hypot(self.v.get(x, y) - other.v.get(x, y));
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            acc / n as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowView {
    Magnitude,
    ColorWheel,
}

fn hsv_to_rgb(h_deg: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h_deg.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        quantize_u8(255.0 * (r + m)),
        quantize_u8(255.0 * (g + m)),
        quantize_u8(255.0 * (b + m)),
    ]
}

/// Magnitude view scales by the maximum speed so that zero stays black and a
/// uniform field renders uniformly bright. The wheel maps direction
/// `atan2(v, u)` to hue and relative speed to saturation.
pub fn flow_visualize(flow: &FlowField, mode: FlowView) -> Frame {
    let mag = flow.magnitude();
    let max = mag.min_max().1;
    let (w, h) = (flow.width(), flow.height());
    let mut out = RgbFrame::filled(w, h, [0, 0, 0]);
    for y in 0..h {
        for x in 0..w {
            let rel = if max > 0.0 { mag.get(x, y) / max } else { 0.0 };
            let px = match mode {
                FlowView::Magnitude => {
                    let g = quantize_u8(255.0 * rel);
                    [g, g, g]
                }
                FlowView::ColorWheel => {
                    let hue = flow.v.get(x, y).atan2(flow.u.get(x, y)).to_degrees();
                    hsv_to_rgb(hue, rel, 1.0)
                }
            };
            out.put(x, y, px);
        }
    }
    Frame::Rgb24(out)
}

const FLO_MAGIC: &[u8; 4] = b"PIEH";

/// Middlebury `.flo`: magic, little-endian i32 width and height, then
/// row-major interleaved f32 `(u, v)`.
pub fn write_flo<W: Write>(flow: &FlowField, mut sink: W) -> Result<()> {
    sink.write_all(FLO_MAGIC)?;
    sink.write_all(&(flow.width() as i32).to_le_bytes())?;
    sink.write_all(&(flow.height() as i32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(flow.u.len() * 8);
    for (u, v) in flow.u.data().iter().zip(flow.v.data()) {
        buf.extend_from_slice(&(*u as f32).to_le_bytes());
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    sink.write_all(&buf)?;
    Ok(())
}

pub fn read_flo<R: Read>(mut source: R) -> Result<FlowField> {
    let mut head = [0u8; 12];
    source.read_exact(&mut head)?;
    if &head[..4] != FLO_MAGIC {
        return Err(Error::InvalidData("missing PIEH magic".into()));
    }
    let w = i32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    let h = i32::from_le_bytes(head[8..12].try_into().expect("4 bytes"));
    if w <= 0 || h <= 0 {
        return Err(Error::InvalidGeometry(format!("{w}x{h}")));
    }
    let (w, h) = (w as usize, h as usize);
    let mut body = vec![0u8; w * h * 8];
    source.read_exact(&mut body)?;
    let mut u = Vec::with_capacity(w * h);
    let mut v = Vec::with_capacity(w * h);
    for px in body.chunks_exact(8) {
        u.push(f32::from_le_bytes(px[..4].try_into().expect("4 bytes")) as f64);
        v.push(f32::from_le_bytes(px[4..].try_into().expect("4 bytes")) as f64);
    }
    FlowField::new(Plane::from_vec(w, h, u)?, Plane::from_vec(w, h, v)?)
}
