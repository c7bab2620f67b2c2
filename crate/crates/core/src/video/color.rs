use crate::error::{Error, Result};
use crate::plane::quantize_u8;

use super::frame::{chroma_dims, check_y420_geometry, Frame, FrameFormat, RgbFrame, YuvFrame};

/// Linear RGB ↔ YCbCr transform with chroma offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorMatrix {
    pub forward: [[f64; 3]; 3],
    pub offsets: [f64; 3],
    pub inverse: [[f64; 3]; 3],
}

impl ColorMatrix {
    /// Full-range (JFIF) BT.601.
    pub const BT601_FULL: ColorMatrix = ColorMatrix {
        forward: [
            [0.299, 0.587, 0.114],
            [-0.168736, -0.331264, 0.5],
            [0.5, -0.418688, -0.081312],
        ],
        offsets: [0.0, 128.0, 128.0],
        inverse: [
            [1.0, 0.0, 1.402],
            [1.0, -0.344136, -0.714136],
            [1.0, 1.772, 0.0],
        ],
    };

    /// Unrounded (Y, Cb, Cr).
    pub fn rgb_to_ycbcr(&self, r: u8, g: u8, b: u8) -> [f64; 3] {
        let rgb = [f64::from(r), f64::from(g), f64::from(b)];
        let mut out = [0.0; 3];
        for (o, (row, off)) in out.iter_mut().zip(self.forward.iter().zip(self.offsets)) {
            *o = off + row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2];
        }
        out
    }

    pub fn rgb_to_ycbcr_u8(&self, r: u8, g: u8, b: u8) -> [u8; 3] {
        self.rgb_to_ycbcr(r, g, b).map(quantize_u8)
    }

    pub fn ycbcr_to_rgb_u8(&self, y: u8, cb: u8, cr: u8) -> [u8; 3] {
        let v = [
            f64::from(y) - self.offsets[0],
            f64::from(cb) - self.offsets[1],
            f64::from(cr) - self.offsets[2],
        ];
        self.inverse
            .map(|row| quantize_u8(row[0] * v[0] + row[1] * v[1] + row[2] * v[2]))
    }
}

/// Convert between RGB24 and 4:2:0.
///
/// Chroma is sited top-left: downsampling averages each 2×2 block of
/// unrounded chroma, upsampling duplicates the sample to its 2×2 block.
pub fn convert_color(frame: &Frame, target: FrameFormat) -> Result<Frame> {
    let m = ColorMatrix::BT601_FULL;
    match (frame, target) {
        (Frame::Rgb24(_), FrameFormat::Rgb24) | (Frame::Y420(_), FrameFormat::Y420) => {
            Ok(frame.clone())
        }
        (Frame::Rgb24(rgb), FrameFormat::Y420) => {
            let (w, h) = (rgb.width(), rgb.height());
            check_y420_geometry(w, h)?;
            let (cw, ch) = chroma_dims(w, h);
            let mut y = vec![0u8; w * h];
            let mut cb_acc = vec![0.0f64; cw * ch];
            let mut cr_acc = vec![0.0f64; cw * ch];
            for py in 0..h {
                for px in 0..w {
                    let [r, g, b] = rgb.pixel(px, py);
                    let [yy, cb, cr] = m.rgb_to_ycbcr(r, g, b);
                    y[py * w + px] = quantize_u8(yy);
                    let ci = (py / 2) * cw + px / 2;
                    cb_acc[ci] += cb;
                    cr_acc[ci] += cr;
                }
            }
            let cb = cb_acc.iter().map(|&v| quantize_u8(v / 4.0)).collect();
            let cr = cr_acc.iter().map(|&v| quantize_u8(v / 4.0)).collect();
            Ok(Frame::Y420(YuvFrame::new(w, h, y, cb, cr)?))
        }
        (Frame::Y420(yuv), FrameFormat::Rgb24) => {
            let (w, h) = (yuv.width(), yuv.height());
            let (cw, _) = chroma_dims(w, h);
            let mut data = Vec::with_capacity(w * h * 3);
            for py in 0..h {
                for px in 0..w {
                    let ci = (py / 2) * cw + px / 2;
                    let rgb = m.ycbcr_to_rgb_u8(yuv.y()[py * w + px], yuv.cb()[ci], yuv.cr()[ci]);
                    data.extend_from_slice(&rgb);
                }
            }
            Ok(Frame::Rgb24(RgbFrame::new(w, h, data)?))
        }
        (src, dst) => Err(Error::UnsupportedFormat(format!(
            "color conversion {:?} -> {dst:?}",
            src.format()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Plane;

    const M: ColorMatrix = ColorMatrix::BT601_FULL;

    #[test]
    fn reference_colors() {
        assert_eq!(M.rgb_to_ycbcr_u8(0, 0, 0), [0, 128, 128]);
        assert_eq!(M.rgb_to_ycbcr_u8(255, 255, 255), [255, 128, 128]);
        // Y = 76.245, Cb = 84.97, Cr = 255.5 clamps to 255.
        assert_eq!(M.rgb_to_ycbcr_u8(255, 0, 0), [76, 85, 255]);
    }

    #[test]
    fn gray_has_neutral_chroma() {
        for v in 0..=255u8 {
            let [y, cb, cr] = M.rgb_to_ycbcr_u8(v, v, v);
            assert_eq!((y, cb, cr), (v, 128, 128));
        }
    }

    #[test]
    fn round_trip_within_two_codes() {
        let mut worst = 0i32;
        for r in (0..=255u8).step_by(4) {
            for g in (0..=255u8).step_by(4) {
                for b in (0..=255u8).step_by(4) {
                    let [y, cb, cr] = M.rgb_to_ycbcr_u8(r, g, b);
                    let back = M.ycbcr_to_rgb_u8(y, cb, cr);
                    for (a, b) in [r, g, b].iter().zip(back) {
                        worst = worst.max((i32::from(*a) - i32::from(b)).abs());
                    }
                }
            }
        }
        assert!(worst <= 2, "worst round-trip error {worst}");
    }

    #[test]
    fn frame_conversion_on_flat_color() {
        let rgb = Frame::Rgb24(RgbFrame::filled(4, 2, [255, 0, 0]));
        let yuv = convert_color(&rgb, FrameFormat::Y420).unwrap();
        let f = yuv.as_y420().unwrap();
        assert!(f.y().iter().all(|&v| v == 76));
        assert_eq!(f.cb(), &[85, 85]);
        assert_eq!(f.cr(), &[255, 255]);
        let back = convert_color(&yuv, FrameFormat::Rgb24).unwrap();
        if let Frame::Rgb24(b) = back {
            let [r, g, bb] = b.pixel(3, 1);
            assert!(r >= 253 && g <= 2 && bb <= 2, "{r} {g} {bb}");
        } else {
            panic!("expected rgb");
        }
    }

    #[test]
    fn gray_to_y420_is_unsupported() {
        let g = Frame::Gray(Plane::new(4, 4));
        assert!(matches!(
            convert_color(&g, FrameFormat::Y420),
            Err(Error::UnsupportedFormat(_))
        ));
    }
}
