use crate::error::Result;
use crate::engine::compose::{Annotation, AxesKind, FrameSources, PanelLayout, Rect, Series};
use crate::engine::params::ParamSpec;
use crate::filters::{convolve2d, make_spatial_kernel, Boundary, SpatialKind};
use crate::plane::Plane;
use crate::statistics::{curve_to_csv, epdf_stats, epdf_to_csv, fit_power_law, power_spectrum, SpectrumAxis};
use crate::stimuli::{gradient_dots, masked_gratings, weber_grid, MaskingParams, WeberParams};
use crate::transforms::{dwt2, Wavelet};
use crate::video::{Rational, VideoClip};

use super::{caption_y, compose_all, even, frames_param, per_frame, signed_view, Ctx, Output};

/// `cell` shrunk by a margin that leaves room for a title and tick labels.
fn inset_in(cell: Rect) -> Rect {
    let (mx, my) = ((cell.w / 10).max(4), (cell.h / 8).max(20));
    Rect::new(cell.x + mx, cell.y + my, cell.w.saturating_sub(2 * mx).max(8), cell.h.saturating_sub(2 * my).max(8))
}

fn panel_and_plot(cell: (usize, usize), title: &str) -> PanelLayout {
    let (w, h) = (even(2 * cell.0), even(cell.1));
    let left = Rect::new(0, 0, w / 2, h);
    let right = Rect::new(w / 2, 0, w - w / 2, h);
    PanelLayout::new(w, h).panel("frame", left, Some("frame")).inset("plot", AxesKind::Lin, inset_in(right), Some(title))
}

pub(super) fn spectrum_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("axis", &["spatial_radial", "temporal"], "spatial_radial", "Frequency axis"),
        ParamSpec::int("bins", 4, 64, 24, "Log-spaced frequency bins"),
        frames_param(32),
    ]
}

pub(super) fn spectrum(ctx: &Ctx) -> Result<Output> {
    let axis = if ctx.p.s("axis") == "temporal" { SpectrumAxis::Temporal } else { SpectrumAxis::SpatialRadial };
    let luma = ctx.luma();
    let curve = power_spectrum(&luma, axis, ctx.p.u("bins"))?;
    let lo = curve.freqs.first().copied().unwrap_or(0.0);
    let hi = curve.freqs.last().copied().unwrap_or(0.5);
    let fit = fit_power_law(&curve, (lo, hi))?;
    ctx.analysis(1, 1);
    let mut series = Series::from_csv(&curve_to_csv(&curve))?;
    series.points.retain(|&(f, p)| f > 0.0 && p > 0.0);
    let mut layout = panel_and_plot(ctx.dims(), "power vs frequency (log-log)");
    layout.insets[0].axes = AxesKind::LogLog;
    let ann = vec![Annotation::new(
        format!("{}: P(f) ~ 1/f^{:.2}  (r2={:.3})", ctx.p.s("axis"), fit.gamma, fit.r2),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default().with_panel("frame", luma[t].clone()).with_series("plot", series.clone()))
    })
}

pub(super) fn epdf_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("filter", &["dwt", "gabor", "gauss_d1", "gauss_d2", "log"], "log", "Band-pass family"),
        ParamSpec::float("sigma", 0.5, 8.0, 2.0, "Filter scale in pixels"),
        ParamSpec::int("bins", 11, 201, 51, "Histogram bins (odd)"),
        frames_param(12),
    ]
}

fn bandpass(p: &Plane, filter: &str, sigma: f64) -> Result<Plane> {
    let kind = match filter {
        "dwt" => return Ok(dwt2(p, 1, Wavelet::Db4)?.details.swap_remove(0).hl),
        "gabor" => SpatialKind::GaborEven { sigma, theta: 0.0, f0: 0.25 / sigma.max(1.0) },
        "gauss_d1" => SpatialKind::GaussD1 { sigma, theta: 0.0 },
        "gauss_d2" => SpatialKind::GaussD2 { sigma, theta: 0.0 },
        _ => SpatialKind::Log { sigma },
    };
    convolve2d(p, &make_spatial_kernel(kind)?, Boundary::Mirror)
}

pub(super) fn epdf(ctx: &Ctx) -> Result<Output> {
    let filter = ctx.p.s("filter").to_string();
    let sigma = ctx.p.f("sigma");
    let bins = ctx.p.u("bins") | 1;
    let luma = ctx.luma();
    let responses = luma.iter().map(|p| bandpass(p, &filter, sigma)).collect::<Result<Vec<_>>>()?;
    let mut series = Vec::with_capacity(responses.len());
    let mut texts = Vec::with_capacity(responses.len());
    for r in &responses {
        let m = r.mean();
        let sd = (r.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / r.len() as f64).sqrt();
        let half = (4.0 * sd).max(1.0);
        let st = epdf_stats(r.data(), bins, (-half, half))?;
        let mut s = Series::from_csv(&epdf_to_csv(&st.epdf))?;
        for pt in &mut s.points {
            pt.1 = pt.1.max(1e-6).log10();
        }
        series.push(s);
        texts.push(match st.kurtosis {
            Some(k) => format!("{filter}: kurtosis {k:.2} (Gaussian = 3)"),
            None => format!("{filter}: flat response"),
        });
    }
    ctx.analysis(1, 1);
    let layout = panel_and_plot(ctx.dims(), "log10 p(response)");
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("frame", signed_view(&responses[t], 4.0))
            .with_series("plot", series[t].clone()))
    })
}

fn stimulus_params(duration: f64, w: i64, h: i64) -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("duration", 0.5, 20.0, duration, "Duration in seconds").non_canonical(),
        ParamSpec::int("fps", 1, 120, 30, "Frame rate").non_canonical(),
        ParamSpec::int("width", 64, 1920, w, "Output width").non_canonical(),
        ParamSpec::int("height", 64, 1080, h, "Output height").non_canonical(),
    ]
}

fn clip_output(ctx: &Ctx, clip: &VideoClip, ann: Vec<Annotation>) -> Result<Output> {
    let (w, h) = (clip.width(), clip.height());
    let layout = PanelLayout::new(w, h).panel("stimulus", Rect::new(0, 0, w, h), None);
    let luma = clip.luma_planes();
    compose_all(ctx, &layout, luma.len(), clip.fps(), ann, |t| {
        Ok(FrameSources::default().with_panel("stimulus", luma[t].clone()))
    })
}

pub(super) fn weber_schema() -> Vec<ParamSpec> {
    let d = WeberParams::default();
    let mut v = vec![
        ParamSpec::float("tau", 0.01, 1.0, d.tau, "Weber fraction"),
        ParamSpec::float("flicker_hz", 0.1, 15.0, d.flicker_hz, "Dot flicker frequency").non_canonical(),
        ParamSpec::int("dot_spacing", 4, 64, d.dot_spacing as i64, "Pixels between dot centers").non_canonical(),
        ParamSpec::int("dot_size", 1, 32, d.dot_size as i64, "Dot side in pixels").non_canonical(),
    ];
    v.extend(stimulus_params(4.0, 640, 360));
    v
}

pub(super) fn weber(ctx: &Ctx) -> Result<Output> {
    let p = WeberParams {
        tau: ctx.p.f("tau"),
        flicker_hz: ctx.p.f("flicker_hz"),
        dot_spacing: ctx.p.u("dot_spacing"),
        dot_size: ctx.p.u("dot_size"),
        fps: Rational::integer(ctx.p.u("fps") as u32),
        ..WeberParams::default()
    };
    let (w, h) = (even(ctx.p.u("width")), even(ctx.p.u("height")));
    let (clip, patches) = weber_grid(&p, w, h, ctx.p.f("duration"))?;
    let last = clip.len() - 1;
    let mut ann: Vec<Annotation> = patches
        .iter()
        .map(|pi| {
            let mark = if pi.visible { "visible" } else { "invisible" };
            Annotation::new(
                format!("L={:.0} dL={:.0} {mark}", pi.l_ave, pi.delta_l),
                pi.rect.0 + 2,
                pi.rect.1 + 2,
                0..=last,
            )
        })
        .collect();
    ann.push(Annotation::new(format!("visible when dL > {} * L", p.tau), 4, caption_y(h, 0), 0..=last));
    clip_output(ctx, &clip, ann)
}

pub(super) fn gradient_schema() -> Vec<ParamSpec> {
    let mut v = vec![
        ParamSpec::float("amplitude", 0.0, 100.0, 10.0, "Peak-to-peak dot flicker in codes").non_canonical(),
        ParamSpec::int("dot_spacing", 4, 128, 32, "Pixels between dot centers").non_canonical(),
        ParamSpec::float("tau", 0.01, 1.0, 0.2, "Weber fraction"),
    ];
    v.extend(stimulus_params(4.0, 640, 360));
    v
}

pub(super) fn gradient(ctx: &Ctx) -> Result<Output> {
    let (amp, tau) = (ctx.p.f("amplitude"), ctx.p.f("tau"));
    let (w, h) = (even(ctx.p.u("width")), even(ctx.p.u("height")));
    let fps = Rational::integer(ctx.p.u("fps") as u32);
    let (clip, dots) = gradient_dots(w, h, ctx.p.f("duration"), fps, amp, ctx.p.u("dot_spacing"), tau)?;
    let visible = dots.iter().filter(|d| d.visible).count();
    let last = clip.len() - 1;
    let ann = vec![
        Annotation::new(format!("dL={amp:.0} codes, visible when dL > {tau} * L"), 4, caption_y(h, 1), 0..=last),
        Annotation::new(format!("{visible} of {} dots above threshold", dots.len()), 4, caption_y(h, 0), 0..=last),
    ];
    clip_output(ctx, &clip, ann)
}

pub(super) fn masking_schema() -> Vec<ParamSpec> {
    let d = MaskingParams::with_seed(0);
    let mut v = vec![
        ParamSpec::float("amplitude_left", 0.0, 255.0, d.amplitudes[0], "Left grating amplitude (peak-to-peak)"),
        ParamSpec::float("amplitude_right", 0.0, 255.0, d.amplitudes[1], "Right grating amplitude (peak-to-peak)"),
        ParamSpec::float("f_start", 0.001, 0.5, d.f_start, "Start frequency in cycles/pixel").non_canonical(),
        ParamSpec::float("f_end", 0.001, 0.5, d.f_end, "End frequency in cycles/pixel").non_canonical(),
    ];
    v.extend(stimulus_params(d.duration, 640, 360));
    v
}

pub(super) fn masking(ctx: &Ctx) -> Result<Output> {
    let p = MaskingParams {
        duration: ctx.p.f("duration"),
        fps: Rational::integer(ctx.p.u("fps") as u32),
        amplitudes: [ctx.p.f("amplitude_left"), ctx.p.f("amplitude_right")],
        f_start: ctx.p.f("f_start"),
        f_end: ctx.p.f("f_end"),
        seed: ctx.seed,
    };
    let (w, h) = (even(ctx.p.u("width")), even(ctx.p.u("height")));
    let clip = masked_gratings(&p, w, h)?;
    let n = clip.len();
    let texts: Vec<String> = (0..n).map(|t| format!("f={:.4} c/px", p.frequency_at(t, n))).collect();
    let mut ann = per_frame(&texts, 4, caption_y(h, 0));
    ann.push(Annotation::new(format!("A={:.0}", p.amplitudes[0]), 4, 4, 0..=n - 1));
    ann.push(Annotation::new(format!("A={:.0}", p.amplitudes[1]), w / 2 + 4, 4, 0..=n - 1));
    clip_output(ctx, &clip, ann)
}
