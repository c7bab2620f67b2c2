use crate::error::Result;
use crate::engine::compose::{FrameSources, PanelSource};
use crate::engine::params::ParamSpec;
use crate::filters::{gaussian_blur, Boundary};
use crate::plane::Plane;
use crate::video::{convert_color, Frame, FrameFormat, YuvFrame};

use super::{caption_y, compose_all, frames_param, grid, Ctx, Output};
use crate::engine::compose::Annotation;

fn subsample(p: &Plane, k: usize) -> Plane {
    Plane::from_fn(p.width().div_ceil(k), p.height().div_ceil(k), |x, y| p.get(x * k, y * k))
}

pub(super) fn aliasing_schema() -> Vec<ParamSpec> {
    vec![ParamSpec::int("factor", 2, 8, 4, "Decimation factor"), frames_param(24)]
}

pub(super) fn aliasing(ctx: &Ctx) -> Result<Output> {
    let k = ctx.p.u("factor");
    let luma = ctx.luma();
    let layout = grid(
        3,
        1,
        ctx.dims(),
        &[("original", "original"), ("naive", "pixel dropping"), ("prefiltered", "Gaussian prefilter")],
    );
    let sigma = 0.5 * k as f64;
    let ann = vec![Annotation::new(
        format!("decimation x{k}, prefilter sigma={sigma:.1}"),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let f = &luma[t];
        Ok(FrameSources::default()
            .with_panel("original", f.clone())
            .with_panel("naive", subsample(f, k))
            .with_panel("prefiltered", subsample(&gaussian_blur(f, sigma, Boundary::Mirror), k)))
    })
}

pub(super) fn color_schema() -> Vec<ParamSpec> {
    vec![frames_param(24)]
}

pub(super) fn color(ctx: &Ctx) -> Result<Output> {
    let clip = ctx.clip();
    let n = ctx.p.u("frames").min(clip.len());
    let layout = grid(
        2,
        2,
        ctx.dims(),
        &[("rgb", "RGB"), ("y", "Y (luma)"), ("cb", "Cb (4:2:0)"), ("cr", "Cr (4:2:0)")],
    );
    compose_all(ctx, &layout, n, clip.fps(), Vec::new(), |t| {
        let yuv = match &clip.frames()[t] {
            Frame::Gray(p) => Frame::Y420(YuvFrame::from_luma(p)?),
            other => convert_color(other, FrameFormat::Y420)?,
        };
        let rgb = match convert_color(&yuv, FrameFormat::Rgb24)? {
            Frame::Rgb24(f) => f,
            _ => unreachable!("conversion target is RGB"),
        };
        let f = yuv.as_y420().expect("converted to 4:2:0");
        let (cw, ch) = (f.width().div_ceil(2), f.height().div_ceil(2));
        Ok(FrameSources::default()
            .with_panel("rgb", PanelSource::Rgb(rgb))
            .with_panel("y", f.luma())
            .with_panel("cb", Plane::from_u8(cw, ch, f.cb())?)
            .with_panel("cr", Plane::from_u8(cw, ch, f.cr())?))
    })
}
