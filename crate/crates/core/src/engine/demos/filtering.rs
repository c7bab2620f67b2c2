use crate::error::Result;
use crate::engine::compose::{Annotation, FrameSources};
use crate::engine::params::ParamSpec;
use crate::filters::{
    build_steerable, convolve2d, convolve_t, make_spatial_kernel, make_temporal_kernel, predictive_inverse,
    predictive_residual, steer, Boundary, SpatialKind, TemporalKind,
};
use crate::motion::retina::histogram_entropy;
use crate::plane::Plane;

use super::{caption_y, compose_all, frames_param, grid, per_frame, signed_view, Ctx, Output};

fn gain_param(default: f64) -> ParamSpec {
    ParamSpec::float("gain", 0.1, 50.0, default, "Display gain for signed responses").non_canonical()
}

fn theta_param(default: f64) -> ParamSpec {
    ParamSpec::float("theta_deg", 0.0, 360.0, default, "Orientation in degrees")
}

pub(super) fn spatial_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("kind", &["gaussian", "dog", "log", "gauss_d1", "gauss_d2"], "log", "Filter family"),
        ParamSpec::float("sigma", 0.5, 8.0, 2.0, "Gaussian scale in pixels"),
        theta_param(0.0),
        gain_param(4.0),
        frames_param(24),
    ]
}

pub(super) fn spatial(ctx: &Ctx) -> Result<Output> {
    let sigma = ctx.p.f("sigma");
    let theta = ctx.p.f("theta_deg").to_radians();
    let kind = match ctx.p.s("kind") {
        "gaussian" => SpatialKind::Gaussian { sigma },
        "dog" => SpatialKind::Dog { sigma1: sigma, sigma2: 1.6 * sigma },
        "gauss_d1" => SpatialKind::GaussD1 { sigma, theta },
        "gauss_d2" => SpatialKind::GaussD2 { sigma, theta },
        _ => SpatialKind::Log { sigma },
    };
    let kernel = make_spatial_kernel(kind)?;
    let gain = ctx.p.f("gain");
    let luma = ctx.luma();
    let layout = grid(2, 1, ctx.dims(), &[("original", "original"), ("filtered", kind.name())]);
    let ann = vec![Annotation::new(
        format!("{} sigma={sigma} theta={}deg", kind.name(), ctx.p.f("theta_deg")),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let r = convolve2d(&luma[t], &kernel, Boundary::Mirror)?;
        let view = if kind.is_lowpass() { r } else { signed_view(&r, gain) };
        Ok(FrameSources::default().with_panel("original", luma[t].clone()).with_panel("filtered", view))
    })
}

pub(super) fn gabor_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("sigma", 1.0, 16.0, 4.0, "Envelope scale in pixels"),
        ParamSpec::float("f0_a", 0.02, 0.5, 0.1, "First carrier frequency in cycles/pixel").non_canonical(),
        ParamSpec::float("f0_b", 0.02, 0.5, 0.25, "Second carrier frequency in cycles/pixel").non_canonical(),
        theta_param(0.0),
        gain_param(2.0),
        frames_param(24),
    ]
}

/// Magnitude of the even/odd quadrature pair at one tuning.
fn gabor_energy(p: &Plane, sigma: f64, theta: f64, f0: f64) -> Result<Plane> {
    let even = convolve2d(p, &make_spatial_kernel(SpatialKind::GaborEven { sigma, theta, f0 })?, Boundary::Mirror)?;
    let odd = convolve2d(p, &make_spatial_kernel(SpatialKind::GaborOdd { sigma, theta, f0 })?, Boundary::Mirror)?;
    even.zip_map(&odd, f64::hypot)
}

pub(super) fn gabor(ctx: &Ctx) -> Result<Output> {
    let sigma = ctx.p.f("sigma");
    let (fa, fb) = (ctx.p.f("f0_a"), ctx.p.f("f0_b"));
    let theta = ctx.p.f("theta_deg").to_radians();
    let gain = ctx.p.f("gain");
    let luma = ctx.luma();
    let label_a = format!("energy f0={fa}");
    let label_b = format!("energy f0={fb}");
    let layout = grid(3, 1, ctx.dims(), &[("original", "original"), ("a", &label_a), ("b", &label_b)]);
    let ann = vec![Annotation::new(
        format!("sigma={sigma} theta={}deg f0 in c/px", ctx.p.f("theta_deg")),
        4,
        caption_y(layout.height, 0),
        0..=luma.len() - 1,
    )];
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let a = gabor_energy(&luma[t], sigma, theta, fa)?;
        let b = gabor_energy(&luma[t], sigma, theta, fb)?;
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("a", a.map(|v| gain * v))
            .with_panel("b", b.map(|v| gain * v)))
    })
}

pub(super) fn steerable_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("scales", 1, 4, 3, "Pyramid scales"),
        theta_param(30.0),
        ParamSpec::float("spin_deg", -45.0, 45.0, 6.0, "Orientation change per frame in degrees").non_canonical(),
        gain_param(4.0),
        frames_param(24),
    ]
}

pub(super) fn steerable(ctx: &Ctx) -> Result<Output> {
    let scales = ctx.p.u("scales");
    let (theta0, spin, gain) = (ctx.p.f("theta_deg"), ctx.p.f("spin_deg"), ctx.p.f("gain"));
    let luma = ctx.luma();
    let roles: Vec<(String, String)> = std::iter::once(("original".to_string(), "original".to_string()))
        .chain((0..scales).map(|s| (format!("s{s}"), format!("scale {s}"))))
        .collect();
    let cells: Vec<(&str, &str)> = roles.iter().map(|(r, l)| (r.as_str(), l.as_str())).collect();
    let cols = if cells.len() <= 4 { 2 } else { 3 };
    let layout = grid(cols, cells.len().div_ceil(cols), ctx.dims(), &cells);
    let angle = |t: usize| (theta0 + spin * t as f64).rem_euclid(360.0);
    let texts: Vec<String> = (0..luma.len()).map(|t| format!("steered to {:.0} deg", angle(t))).collect();
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let dec = build_steerable(&luma[t], scales)?;
        let mut src = FrameSources::default().with_panel("original", luma[t].clone());
        for s in 0..scales {
            let r = steer(&dec, s, angle(t).to_radians())?;
            src = src.with_panel(&format!("s{s}"), signed_view(&r, gain));
        }
        Ok(src)
    })
}

pub(super) fn temporal_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("kind", &["gauss_d1_t", "gauss_d2_t", "gabor_t", "gamma"], "gauss_d1_t", "Filter family"),
        ParamSpec::float("sigma", 0.5, 8.0, 2.0, "Temporal scale in frames"),
        ParamSpec::float("f0", 0.01, 0.5, 0.125, "Gabor carrier in cycles/frame").non_canonical(),
        ParamSpec::int("order", 1, 8, 3, "Gamma kernel order").non_canonical(),
        ParamSpec::float("tau", 0.2, 8.0, 2.0, "Gamma time constant in frames").non_canonical(),
        gain_param(4.0),
        frames_param(24),
    ]
}

pub(super) fn temporal(ctx: &Ctx) -> Result<Output> {
    let sigma = ctx.p.f("sigma");
    let kind = match ctx.p.s("kind") {
        "gauss_d2_t" => TemporalKind::GaussD2T { sigma },
        "gabor_t" => TemporalKind::GaborT { sigma, f0: ctx.p.f("f0"), odd: false },
        "gamma" => TemporalKind::Gamma { order: ctx.p.u("order") as u32, tau: ctx.p.f("tau") },
        _ => TemporalKind::GaussD1T { sigma },
    };
    let kernel = make_temporal_kernel(kind)?;
    let gain = ctx.p.f("gain");
    let luma = ctx.luma();
    let resp = convolve_t(&luma, &kernel)?;
    ctx.analysis(1, 1);
    let layout = grid(2, 1, ctx.dims(), &[("original", "original"), ("filtered", kind.name())]);
    let texts: Vec<String> = (0..luma.len())
        .map(|t| {
            if t < resp.warmup {
                format!("{} ({} taps) warming up", kind.name(), kernel.len())
            } else {
                format!("{} ({} taps)", kind.name(), kernel.len())
            }
        })
        .collect();
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let view = if matches!(kind, TemporalKind::Gamma { .. }) {
            resp.frames[t].clone()
        } else {
            signed_view(&resp.frames[t], gain)
        };
        Ok(FrameSources::default().with_panel("original", luma[t].clone()).with_panel("filtered", view))
    })
}

pub(super) fn predictive_schema() -> Vec<ParamSpec> {
    vec![frames_param(24)]
}

pub(super) fn predictive(ctx: &Ctx) -> Result<Output> {
    let luma = ctx.luma();
    let residuals = luma.iter().map(predictive_residual).collect::<Result<Vec<_>>>()?;
    let layout = grid(
        3,
        1,
        ctx.dims(),
        &[("original", "original"), ("residual", "prediction residual"), ("recon", "decoded")],
    );
    let texts: Vec<String> = luma
        .iter()
        .zip(&residuals)
        .map(|(f, r)| {
            format!(
                "entropy: frame {:.2} bits/px, residual {:.2} bits/px",
                histogram_entropy(f, 0.0, 256.0),
                histogram_entropy(r, -128.0, 128.0)
            )
        })
        .collect();
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("residual", signed_view(&residuals[t], 1.0))
            .with_panel("recon", predictive_inverse(&residuals[t])?))
    })
}
