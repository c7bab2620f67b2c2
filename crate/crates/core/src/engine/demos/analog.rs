use crate::error::Result;
use crate::engine::compose::{FrameSources, PanelLayout, Rect};
use crate::engine::params::ParamSpec;
use crate::stimuli::{csf_grating_sweep, csf_period_at, flicker_sweep, SweepParams};
use crate::video::{Rational, VideoClip};

use super::{caption_y, compose_all, even, per_frame, Ctx, Output};

fn size_params(w: i64, h: i64) -> [ParamSpec; 2] {
    [
        ParamSpec::int("width", 16, 1920, w, "Output width in pixels").non_canonical(),
        ParamSpec::int("height", 16, 1080, h, "Output height in pixels").non_canonical(),
    ]
}

fn single_panel(ctx: &Ctx, clip: &VideoClip, texts: &[String]) -> Result<Output> {
    let (w, h) = (clip.width(), clip.height());
    let layout = PanelLayout::new(w, h).panel("stimulus", Rect::new(0, 0, w, h), None);
    let luma = clip.luma_planes();
    let ann = per_frame(texts, 4, caption_y(h, 0));
    compose_all(ctx, &layout, luma.len(), clip.fps(), ann, |t| {
        Ok(FrameSources::default().with_panel("stimulus", luma[t].clone()))
    })
}

pub(super) fn csf_schema() -> Vec<ParamSpec> {
    let mut v = vec![
        ParamSpec::float("duration", 0.5, 20.0, 10.0, "Sweep duration in seconds"),
        ParamSpec::int("fps", 1, 120, 30, "Frame rate"),
        ParamSpec::float("f_start", 0.001, 0.5, 0.005, "Start frequency in cycles/pixel"),
        ParamSpec::float("f_end", 0.001, 0.5, 0.25, "End frequency in cycles/pixel"),
        ParamSpec::float("contrast", 0.0, 1.0, 1.0, "Michelson contrast"),
    ];
    v.extend(size_params(640, 360));
    v
}

pub(super) fn csf(ctx: &Ctx) -> Result<Output> {
    let p = &ctx.p;
    let sp = SweepParams {
        duration: p.f("duration"),
        fps: Rational::integer(p.u("fps") as u32),
        start: p.f("f_start"),
        end: p.f("f_end"),
        contrast: p.f("contrast"),
    };
    let clip = csf_grating_sweep(&sp, even(p.u("width")), even(p.u("height")))?;
    let n = clip.len();
    let texts: Vec<String> = (0..n)
        .map(|t| {
            let period = csf_period_at(&sp, t, n);
            format!("period {period} px  f={:.4} c/px", 1.0 / period as f64)
        })
        .collect();
    single_panel(ctx, &clip, &texts)
}

pub(super) fn flicker_schema() -> Vec<ParamSpec> {
    let mut v = vec![
        ParamSpec::float("duration", 1.0, 20.0, 10.0, "Sweep duration in seconds"),
        ParamSpec::int("fps", 60, 60, 60, "Frame rate (the sweep assumes a 60 Hz display)"),
        ParamSpec::float("period_start", 2.0, 120.0, 30.0, "Initial half-period in frames"),
    ];
    v.extend(size_params(320, 180));
    v
}

pub(super) fn flicker(ctx: &Ctx) -> Result<Output> {
    let p = &ctx.p;
    let sp = SweepParams {
        duration: p.f("duration"),
        fps: Rational::integer(p.u("fps") as u32),
        start: p.f("period_start"),
        end: 1.0,
        contrast: 1.0,
    };
    let clip = flicker_sweep(&sp, even(p.u("width")), even(p.u("height")))?;
    let means: Vec<f64> = clip.luma_planes().iter().map(|l| l.mean()).collect();
    let mut run_len = vec![0usize; means.len()];
    let mut start = 0;
    for t in 1..=means.len() {
        if t == means.len() || means[t] != means[start] {
            run_len[start..t].fill(t - start);
            start = t;
        }
    }
    let fps = sp.fps.as_f64();
    let texts: Vec<String> = run_len
        .iter()
        .map(|&r| format!("half-period {r} frames  {:.1} Hz", fps / (2.0 * r as f64)))
        .collect();
    single_panel(ctx, &clip, &texts)
}
