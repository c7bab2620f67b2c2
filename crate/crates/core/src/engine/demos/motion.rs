use rayon::prelude::*;

use crate::error::Result;
use crate::engine::compose::{Annotation, FrameSources, PanelSource};
use crate::engine::params::ParamSpec;
use crate::motion::retina::histogram_entropy;
use crate::motion::{
    flow_visualize, horn_schunck, local_contrast, robust_flow, v1_energy, FlowField, FlowView, HSParams,
    LocalContrastParams, RobustFlowParams, V1Params, V1_DIRECTIONS_DEG,
};
use crate::plane::Plane;
use crate::synth::drifting_grating;
use crate::video::{Frame, Rational, RgbFrame};

use super::{caption_y, compose_all, display_source, even, frames_param, grid, per_frame, scaled_view, Ctx, Output};

fn view_param() -> ParamSpec {
    ParamSpec::choice("view", &["color_wheel", "magnitude"], "color_wheel", "Flow visualization")
}

/// Flow for every consecutive pair, pairs solved in parallel.
fn pairwise<T, F>(ctx: &Ctx, luma: &[Plane], solve: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Plane, &Plane) -> Result<T> + Sync,
{
    let done = std::sync::atomic::AtomicUsize::new(0);
    let total = luma.len().saturating_sub(1);
    luma.par_windows(2)
        .map(|w| {
            let f = solve(&w[0], &w[1]);
            ctx.analysis(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1, total);
            f
        })
        .collect()
}

fn flow_output(ctx: &Ctx, flows: &[FlowField], title: &str, solver: String) -> Result<Output> {
    let view = if ctx.p.s("view") == "magnitude" { FlowView::Magnitude } else { FlowView::ColorWheel };
    let layout = grid(2, 1, ctx.dims(), &[("frame", "frame"), ("flow", title)]);
    let texts: Vec<String> = flows
        .iter()
        .map(|f| format!("mean speed {:.2} px/frame", f.magnitude().mean()))
        .collect();
    let mut ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    if !flows.is_empty() {
        ann.push(Annotation::new(solver, 4, caption_y(layout.height, 1), 0..=flows.len() - 1));
    }
    let clip = ctx.clip();
    compose_all(ctx, &layout, flows.len(), clip.fps(), ann, |t| {
        let rgb = match flow_visualize(&flows[t], view) {
            Frame::Rgb24(f) => f,
            _ => unreachable!("flow views are RGB"),
        };
        Ok(FrameSources::default()
            .with_panel("frame", display_source(&clip.frames()[t])?)
            .with_panel("flow", PanelSource::Rgb(rgb)))
    })
}

fn two_frames(luma: &[Plane]) -> Result<()> {
    if luma.len() < 2 {
        return Err(crate::Error::ClipTooShort { frames: luma.len(), required: 2 });
    }
    Ok(())
}

pub(super) fn hs_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("alpha", 0.1, 200.0, 15.0, "Smoothness weight"),
        ParamSpec::int("iterations", 1, 2000, 200, "Solver sweeps per level"),
        ParamSpec::int("levels", 1, 5, 1, "Pyramid levels (1 = single scale)"),
        view_param(),
        frames_param(8),
    ]
}

pub(super) fn hs(ctx: &Ctx) -> Result<Output> {
    let p = HSParams {
        alpha: ctx.p.f("alpha"),
        iterations: ctx.p.u("iterations"),
        pyramid_levels: ctx.p.u("levels"),
    };
    let luma = ctx.luma();
    two_frames(&luma)?;
    let flows = pairwise(ctx, &luma, |a, b| horn_schunck(a, b, &p))?;
    let solver = format!(
        "Horn-Schunck: alpha={} iterations={} levels={}",
        p.alpha, p.iterations, p.pyramid_levels
    );
    flow_output(ctx, &flows, "Horn-Schunck", solver)
}

pub(super) fn robust_schema() -> Vec<ParamSpec> {
    let d = RobustFlowParams::default();
    vec![
        ParamSpec::int("levels", 1, 6, d.pyramid_levels as i64, "Pyramid levels"),
        ParamSpec::int("warp_steps", 1, 10, d.warp_steps as i64, "Warps per level"),
        ParamSpec::float("epsilon", 0.01, 50.0, d.epsilon, "Charbonnier epsilon in codes"),
        ParamSpec::float("alpha", 0.1, 200.0, d.alpha, "Smoothness weight"),
        ParamSpec::int("median_radius", 0, 5, d.median_radius as i64, "Median filter radius"),
        ParamSpec::int("iterations", 1, 1000, d.iterations as i64, "Solver sweeps per warp"),
        view_param(),
        frames_param(8),
    ]
}

fn robust_params(ctx: &Ctx) -> RobustFlowParams {
    RobustFlowParams {
        pyramid_levels: ctx.p.u("levels"),
        warp_steps: ctx.p.u("warp_steps"),
        epsilon: ctx.p.f("epsilon"),
        alpha: ctx.p.f("alpha"),
        median_radius: ctx.p.u("median_radius"),
        iterations: ctx.p.u("iterations"),
        ..RobustFlowParams::default()
    }
}

pub(super) fn robust(ctx: &Ctx) -> Result<Output> {
    let p = robust_params(ctx);
    let luma = ctx.luma();
    two_frames(&luma)?;
    let flows = pairwise(ctx, &luma, |a, b| robust_flow(a, b, &p))?;
    let solver = format!(
        "Charbonnier eps={} alpha={} levels={} warps={} median r={}",
        p.epsilon, p.alpha, p.pyramid_levels, p.warp_steps, p.median_radius
    );
    flow_output(ctx, &flows, "robust flow", solver)
}

pub(super) fn compare_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("alpha", 0.1, 200.0, 15.0, "Smoothness weight shared by all solvers"),
        ParamSpec::int("levels", 2, 6, 3, "Pyramid levels of the multiscale solvers"),
        frames_param(6),
    ]
}

pub(super) fn compare(ctx: &Ctx) -> Result<Output> {
    let alpha = ctx.p.f("alpha");
    let levels = ctx.p.u("levels");
    let single = HSParams { alpha, ..HSParams::default() };
    let multi = HSParams { alpha, pyramid_levels: levels, ..HSParams::default() };
    let robust = RobustFlowParams { alpha, pyramid_levels: levels, ..RobustFlowParams::default() };
    let luma = ctx.luma();
    two_frames(&luma)?;
    let mags: Vec<[Plane; 3]> = pairwise(ctx, &luma, |a, b| {
        Ok([
            horn_schunck(a, b, &single)?.magnitude(),
            horn_schunck(a, b, &multi)?.magnitude(),
            robust_flow(a, b, &robust)?.magnitude(),
        ])
    })?;
    let scale: Vec<f64> = mags.iter().map(|m| m.iter().map(|p| p.min_max().1).fold(0.0, f64::max)).collect();
    let layout = grid(
        2,
        2,
        ctx.dims(),
        &[
            ("frame", "frame"),
            ("hs", "Horn-Schunck"),
            ("multiscale", "multiscale Horn-Schunck"),
            ("robust", "robust (Charbonnier)"),
        ],
    );
    let texts: Vec<String> = scale.iter().map(|s| format!("shared scale: white = {s:.2} px/frame")).collect();
    let mut ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    ann.push(Annotation::new(
        format!("alpha={alpha}, multiscale solvers use {levels} levels"),
        4,
        caption_y(layout.height, 1),
        0..=mags.len() - 1,
    ));
    let clip = ctx.clip();
    compose_all(ctx, &layout, mags.len(), clip.fps(), ann, |t| {
        let [s, m, r] = &mags[t];
        Ok(FrameSources::default()
            .with_panel("frame", display_source(&clip.frames()[t])?)
            .with_panel("hs", scaled_view(s, scale[t]))
            .with_panel("multiscale", scaled_view(m, scale[t]))
            .with_panel("robust", scaled_view(r, scale[t])))
    })
}

pub(super) fn retina_schema() -> Vec<ParamSpec> {
    let d = LocalContrastParams::default();
    vec![
        ParamSpec::float("sigma", 0.5, 16.0, d.sigma, "Scale of the local mean"),
        ParamSpec::float("l0", 0.0, 100.0, d.l0, "Saturation constant in codes"),
        ParamSpec::float("gain", 0.1, 20.0, 1.0, "Display gain").non_canonical(),
        frames_param(24),
    ]
}

pub(super) fn retina(ctx: &Ctx) -> Result<Output> {
    let p = LocalContrastParams { sigma: ctx.p.f("sigma"), l0: ctx.p.f("l0") };
    let gain = ctx.p.f("gain");
    let luma = ctx.luma();
    let contrast = local_contrast(&luma, &p)?;
    ctx.analysis(1, 1);
    let layout = grid(2, 1, ctx.dims(), &[("original", "luminance"), ("contrast", "local contrast")]);
    let texts: Vec<String> = luma
        .iter()
        .zip(&contrast)
        .map(|(l, c)| {
            format!(
                "entropy: luminance {:.2}, contrast {:.2} bits/px",
                histogram_entropy(l, 0.0, 256.0),
                histogram_entropy(c, -1.0, 1.0)
            )
        })
        .collect();
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("contrast", contrast[t].map(|c| 128.0 + 127.0 * gain * c)))
    })
}

const DIRECTION_COLORS: [[u8; 3]; 6] =
    [[255, 0, 0], [255, 255, 0], [0, 255, 0], [0, 255, 255], [0, 0, 255], [255, 0, 255]];

pub(super) fn v1_schema() -> Vec<ParamSpec> {
    let d = V1Params::default();
    vec![
        ParamSpec::choice("direction", &["0", "60", "120", "180", "240", "300"], "0", "Drift direction in degrees"),
        ParamSpec::float("f0", 0.02, 0.5, d.f0, "Spatial frequency in cycles/pixel"),
        ParamSpec::float("speed", 0.1, 4.0, d.speed, "Speed in pixels/frame"),
        ParamSpec::float("sigma_s", 1.0, 12.0, d.sigma_s, "Spatial envelope scale"),
        ParamSpec::float("sigma_t", 1.0, 8.0, d.sigma_t, "Temporal envelope scale"),
        ParamSpec::float("c_n", 0.0001, 1000.0, d.c_n, "Normalization constant"),
        ParamSpec::int("width", 32, 640, 192, "Stimulus width").non_canonical(),
        ParamSpec::int("height", 32, 480, 128, "Stimulus height").non_canonical(),
        ParamSpec::int("frames", 8, 300, 32, "Stimulus frames").non_canonical(),
    ]
}

pub(super) fn v1(ctx: &Ctx) -> Result<Output> {
    let dir: f64 = ctx.p.s("direction").parse().expect("choices are numeric");
    let p = V1Params {
        f0: ctx.p.f("f0"),
        sigma_s: ctx.p.f("sigma_s"),
        sigma_t: ctx.p.f("sigma_t"),
        speed: ctx.p.f("speed"),
        c_n: ctx.p.f("c_n"),
    };
    let (w, h) = (even(ctx.p.u("width")), even(ctx.p.u("height")));
    let n = ctx.p.u("frames");
    let stim: Vec<Plane> =
        (0..n).map(|t| drifting_grating(w, h, t as f64, p.f0, dir, p.speed, 128.0, 100.0)).collect();
    let resp = v1_energy(&stim, &p)?;
    ctx.analysis(1, 1);
    let roles: Vec<(String, String)> = [("stimulus".to_string(), format!("stimulus {dir} deg")), ("preferred".into(), "preferred".into())]
        .into_iter()
        .chain(V1_DIRECTIONS_DEG.iter().enumerate().map(|(k, d)| (format!("d{k}"), format!("{d} deg"))))
        .collect();
    let cells: Vec<(&str, &str)> = roles.iter().map(|(r, l)| (r.as_str(), l.as_str())).collect();
    let layout = grid(4, 2, (w, h), &cells);
    let margin = 3 * p.sigma_s.ceil() as usize;
    let texts: Vec<String> = resp
        .preferred
        .iter()
        .map(|pref| {
            let target = V1_DIRECTIONS_DEG.iter().position(|&d| d == dir).expect("direction is a tuning") as f64;
            let (mut hit, mut total) = (0usize, 0usize);
            for y in margin..h.saturating_sub(margin) {
                for x in margin..w.saturating_sub(margin) {
                    total += 1;
                    hit += usize::from(pref.get(x, y) == target);
                }
            }
            format!("interior pixels preferring {dir} deg: {:.1}%", 100.0 * hit as f64 / total.max(1) as f64)
        })
        .collect();
    let mut ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    ann.push(Annotation::new(
        "colors: 0 red, 60 yellow, 120 green, 180 cyan, 240 blue, 300 magenta",
        4,
        caption_y(layout.height, 1),
        0..=resp.preferred.len() - 1,
    ));
    compose_all(ctx, &layout, resp.preferred.len(), Rational::integer(30), ann, |t| {
        let pref = &resp.preferred[t];
        let mut map = RgbFrame::filled(w, h, [0, 0, 0]);
        for y in 0..h {
            for x in 0..w {
                map.put(x, y, DIRECTION_COLORS[pref.get(x, y) as usize]);
            }
        }
        let mut src = FrameSources::default()
            .with_panel("stimulus", stim[resp.first_frame + t].clone())
            .with_panel("preferred", PanelSource::Rgb(map));
        for (k, r) in resp.responses[t].iter().enumerate() {
            src = src.with_panel(&format!("d{k}"), r.map(|v| 255.0 * v));
        }
        Ok(src)
    })
}
