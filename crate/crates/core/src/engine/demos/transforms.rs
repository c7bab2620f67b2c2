use crate::error::{Error, Result};
use crate::engine::compose::{Annotation, FrameSources, PanelLayout, Rect};
use crate::engine::params::ParamSpec;
use crate::plane::Plane;
use crate::transforms::{
    dct2, dft2, dwt2, gaussian_pyramid, idct2, log_magnitude_view, resample_spatial, resample_temporal, Coefficients,
    TemporalMode, Wavelet, DEFAULT_PYRAMID_SIGMA,
};
use crate::video::{Rational, VideoClip};
use crate::compression::psnr;

use super::{
    caption_y, compose_all, display_source, even, frames_param, grid, kernel_param, per_frame, resample_kernel,
    signed_view, Ctx, Output,
};

pub(super) fn downup_schema() -> Vec<ParamSpec> {
    vec![ParamSpec::int("factor", 2, 8, 2, "Downsampling factor"), kernel_param(), frames_param(24)]
}

pub(super) fn downup(ctx: &Ctx) -> Result<Output> {
    let k = ctx.p.u("factor");
    let kernel = resample_kernel(ctx.p.s("kernel"));
    let luma = ctx.luma();
    let (w, h) = ctx.dims();
    let restored = luma
        .iter()
        .map(|f| resample_spatial(&resample_spatial(f, (w / k).max(1), (h / k).max(1), kernel)?, w, h, kernel))
        .collect::<Result<Vec<_>>>()?;
    let layout = grid(
        3,
        1,
        (w, h),
        &[("original", "original"), ("restored", "down + up"), ("error", "|error| x4")],
    );
    let texts = luma
        .iter()
        .zip(&restored)
        .map(|(a, b)| Ok(format!("x{k} {}  PSNR {:.2} dB", kernel.name(), psnr(a, b)?)))
        .collect::<Result<Vec<_>>>()?;
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("restored", restored[t].clone())
            .with_panel("error", luma[t].zip_map(&restored[t], |a, b| 4.0 * (a - b).abs())?))
    })
}

pub(super) fn temporal_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("factor", &["1/2", "2/3", "3/2", "2/1"], "2/1", "Frame-rate conversion factor"),
        ParamSpec::choice("mode", &["drop_dup", "linear_blend"], "linear_blend", "Interpolation mode"),
        frames_param(24),
    ]
}

pub(super) fn temporal(ctx: &Ctx) -> Result<Output> {
    let (num, den) = ctx.p.s("factor").split_once('/').expect("choices are fractions");
    let factor = Rational::new(num.parse().expect("numeric"), den.parse().expect("numeric"))?;
    let (mode, mode_name) = match ctx.p.s("mode") {
        "drop_dup" => (TemporalMode::DropDup, "drop/duplicate"),
        _ => (TemporalMode::LinearBlend, "linear blend"),
    };
    let clip = ctx.clip();
    let n = ctx.p.u("frames").min(clip.len());
    let sub = VideoClip::new(clip.frames()[..n].to_vec(), clip.fps())?;
    let out = resample_temporal(&sub, factor, mode)?;
    let fps = clip
        .fps()
        .checked_mul(factor)
        .ok_or_else(|| Error::InvalidData("output frame rate overflows".into()))?;
    let (w, h) = (even(out.width()), even(out.height()));
    let layout = PanelLayout::new(w, h).panel("video", Rect::new(0, 0, w, h), None);
    let ann = vec![Annotation::new(
        format!("{} -> {} fps, {mode_name}", clip.fps(), fps),
        4,
        caption_y(h, 0),
        0..=out.len() - 1,
    )];
    compose_all(ctx, &layout, out.len(), fps, ann, |t| {
        Ok(FrameSources::default().with_panel("video", display_source(&out.frames()[t])?))
    })
}

pub(super) fn pyramid_schema() -> Vec<ParamSpec> {
    vec![ParamSpec::int("levels", 2, 6, 4, "Pyramid levels including the input"), frames_param(24)]
}

pub(super) fn pyramid(ctx: &Ctx) -> Result<Output> {
    let levels = ctx.p.u("levels");
    let (w, h) = ctx.dims();
    let mut layout = PanelLayout::new(even(w + w / 2), even(h));
    layout = layout.panel("L0", Rect::new(0, 0, w, h), Some("L0"));
    let mut y = 0;
    for l in 1..levels {
        let (lw, lh) = ((w >> l).max(1), (h >> l).max(1));
        if y + lh > layout.height {
            break;
        }
        layout = layout.panel(&format!("L{l}"), Rect::new(w, y, lw, lh), Some(&format!("L{l}")));
        y += lh;
    }
    let shown = layout.panels.len();
    let luma = ctx.luma();
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), Vec::new(), |t| {
        let pyr = gaussian_pyramid(&luma[t], shown, DEFAULT_PYRAMID_SIGMA)?;
        Ok(pyr
            .into_iter()
            .enumerate()
            .fold(FrameSources::default(), |s, (l, p)| s.with_panel(&format!("L{l}"), p)))
    })
}

pub(super) fn dft_schema() -> Vec<ParamSpec> {
    vec![frames_param(24)]
}

pub(super) fn dft(ctx: &Ctx) -> Result<Output> {
    let luma = ctx.luma();
    let layout = grid(2, 1, ctx.dims(), &[("original", "original"), ("spectrum", "log|DFT| (centered)")]);
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), Vec::new(), |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("spectrum", log_magnitude_view(&dft2(&luma[t]), true)))
    })
}

pub(super) fn dct_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("keep_fraction", 0.001, 1.0, 0.05, "Fraction of largest coefficients kept").non_canonical(),
        frames_param(24),
    ]
}

/// Zero all but the `keep` largest-magnitude coefficients and invert.
fn dct_truncate(p: &Plane, keep: f64) -> Result<Plane> {
    let mut spec = dct2(p);
    if let Coefficients::Real(c) = &mut spec.coeffs {
        let k = ((c.len() as f64 * keep).ceil() as usize).clamp(1, c.len());
        let mut mags: Vec<f64> = c.iter().map(|v| v.abs()).collect();
        let (_, kth, _) = mags.select_nth_unstable_by(c.len() - k, |a, b| a.total_cmp(b));
        let threshold = *kth;
        let mut kept = 0;
        for v in c.iter_mut() {
            if v.abs() < threshold || kept >= k {
                *v = 0.0;
            } else {
                kept += 1;
            }
        }
    }
    idct2(&spec)
}

pub(super) fn dct(ctx: &Ctx) -> Result<Output> {
    let keep = ctx.p.f("keep_fraction");
    let luma = ctx.luma();
    let layout = grid(
        3,
        1,
        ctx.dims(),
        &[("original", "original"), ("spectrum", "log|DCT|"), ("recon", "largest coefficients")],
    );
    let ann = vec![Annotation::new(
        format!("reconstruction keeps {:.1}% of coefficients", 100.0 * keep),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("spectrum", log_magnitude_view(&dct2(&luma[t]), false))
            .with_panel("recon", dct_truncate(&luma[t], keep)?))
    })
}

pub(super) fn dwt_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("levels", 1, 5, 3, "Decomposition levels"),
        ParamSpec::choice("wavelet", &["db4", "haar"], "db4", "Wavelet family"),
        ParamSpec::float("detail_gain", 0.1, 20.0, 2.0, "Display gain for detail bands").non_canonical(),
        frames_param(24),
    ]
}

fn paste(dst: &mut Plane, src: &Plane, x0: usize, y0: usize) {
    for y in 0..src.height().min(dst.height().saturating_sub(y0)) {
        for x in 0..src.width().min(dst.width().saturating_sub(x0)) {
            dst.set(x0 + x, y0 + y, src.get(x, y));
        }
    }
}

/// Classic subband mosaic: approximation top-left, then HL, LH and HH
/// quadrants per level.
fn dwt_mosaic(p: &Plane, levels: usize, wavelet: Wavelet, gain: f64) -> Result<Plane> {
    let pyr = dwt2(p, levels, wavelet)?;
    let d0 = &pyr.details[0];
    let mut m = Plane::filled(2 * d0.hh.width(), 2 * d0.hh.height(), 128.0);
    for d in &pyr.details {
        let (bw, bh) = (d.hh.width(), d.hh.height());
        paste(&mut m, &signed_view(&d.hl, gain), bw, 0);
        paste(&mut m, &signed_view(&d.lh, gain), 0, bh);
        paste(&mut m, &signed_view(&d.hh, gain), bw, bh);
    }
    let scale = 0.5f64.powi(levels as i32);
    paste(&mut m, &pyr.approx.map(|v| v * scale), 0, 0);
    Ok(m)
}

pub(super) fn dwt(ctx: &Ctx) -> Result<Output> {
    let levels = ctx.p.u("levels");
    let wavelet = if ctx.p.s("wavelet") == "haar" { Wavelet::Haar } else { Wavelet::Db4 };
    let gain = ctx.p.f("detail_gain");
    let luma = ctx.luma();
    let layout = grid(2, 1, ctx.dims(), &[("original", "original"), ("mosaic", "subbands")]);
    let ann = vec![Annotation::new(
        format!("{} levels, {}", levels, ctx.p.s("wavelet")),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("mosaic", dwt_mosaic(&luma[t], levels, wavelet, gain)?))
    })
}
