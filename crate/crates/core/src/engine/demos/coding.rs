use crate::compression::{
    awgn, intra_codec, psnr, rr_quality_map, ssim_map, st_wiener_denoise, QuantSpec, SsimParams,
};
use crate::error::{Error, Result};
use crate::engine::compose::{AxesKind, FrameSources, PanelLayout, Series};
use crate::engine::params::ParamSpec;
use crate::filters::{gaussian_blur, Boundary};
use crate::plane::Plane;
use crate::video::{Rational, VideoClip};

use super::{caption_y, canvas, compose_all, frames_param, grid, per_frame, scaled_view, Ctx, Output};

fn matrix_param() -> ParamSpec {
    ParamSpec::choice("matrix", &["mpeg1", "flat"], "mpeg1", "Quantization weighting matrix")
}

fn quant(ctx: &Ctx, q: usize) -> Result<QuantSpec> {
    if ctx.p.s("matrix") == "flat" {
        QuantSpec::flat(q as u32, 16)
    } else {
        QuantSpec::mpeg1(q as u32)
    }
}

fn error_view(a: &Plane, b: &Plane) -> Result<Plane> {
    a.zip_map(b, |x, y| 4.0 * (x - y).abs())
}

/// First `frames` input frames as a clip of their own.
fn head(ctx: &Ctx) -> Result<VideoClip> {
    let clip = ctx.clip();
    let n = ctx.p.u("frames").min(clip.len());
    VideoClip::new(clip.frames()[..n].to_vec(), clip.fps())
}

pub(super) fn sweep_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("q_start", 1, 31, 1, "First quantizer scale"),
        ParamSpec::int("q_end", 1, 31, 31, "Last quantizer scale"),
        matrix_param(),
        ParamSpec::int("frame_index", 0, 899, 0, "Input frame to code").non_canonical(),
    ]
}

pub(super) fn sweep(ctx: &Ctx) -> Result<Output> {
    let (q0, q1) = (ctx.p.u("q_start"), ctx.p.u("q_end"));
    if q0 > q1 {
        return Err(Error::Schema { field: "q_end".into(), reason: format!("{q1} is below q_start {q0}") });
    }
    let clip = ctx.clip();
    let frame = clip.frames()[ctx.p.u("frame_index").min(clip.len() - 1)].luma();
    let coded = (q0..=q1)
        .map(|q| {
            let r = intra_codec(&frame, &quant(ctx, q)?);
            let db = psnr(&frame, &r.recon)?;
            Ok((q, r, db))
        })
        .collect::<Result<Vec<_>>>()?;
    ctx.analysis(1, 1);
    let (w, h) = canvas(2, 2, ctx.dims());
    let cells = grid(2, 2, ctx.dims(), &[("original", "original"), ("recon", "decoded"), ("error", "|error| x4")]);
    let plot_cell = PanelLayout::cell(w, h, 2, 2, 3);
    let mut layout = cells;
    layout = layout.inset("psnr", AxesKind::Lin, shrink(plot_cell), Some("PSNR (dB) vs qscale"));
    let series = Series {
        points: coded.iter().map(|(q, _, db)| (*q as f64, db.min(99.0))).collect(),
    };
    let texts: Vec<String> = coded
        .iter()
        .map(|(q, r, db)| format!("qscale {q} ({}): PSNR {db:.2} dB, {} nonzero", ctx.p.s("matrix"), r.nonzero))
        .collect();
    let ann = per_frame(&texts, 4, caption_y(h, 0));
    compose_all(ctx, &layout, coded.len(), Rational::integer(4), ann, |t| {
        let recon = &coded[t].1.recon;
        Ok(FrameSources::default()
            .with_panel("original", frame.clone())
            .with_panel("recon", recon.clone())
            .with_panel("error", error_view(&frame, recon)?)
            .with_series("psnr", series.clone()))
    })
}

fn shrink(r: crate::engine::compose::Rect) -> crate::engine::compose::Rect {
    let (mx, my) = ((r.w / 10).max(4), (r.h / 8).max(20));
    crate::engine::compose::Rect::new(r.x + mx, r.y + my, r.w.saturating_sub(2 * mx).max(8), r.h.saturating_sub(2 * my).max(8))
}

pub(super) fn intra_schema() -> Vec<ParamSpec> {
    vec![ParamSpec::int("qscale", 1, 31, 8, "Quantizer scale"), matrix_param(), frames_param(24)]
}

pub(super) fn intra(ctx: &Ctx) -> Result<Output> {
    let q = quant(ctx, ctx.p.u("qscale"))?;
    let luma = ctx.luma();
    let coded: Vec<_> = luma.iter().map(|f| intra_codec(f, &q)).collect();
    let layout = grid(3, 1, ctx.dims(), &[("original", "original"), ("recon", "decoded"), ("error", "|error| x4")]);
    let texts = luma
        .iter()
        .zip(&coded)
        .map(|(f, r)| Ok(format!("qscale {}: PSNR {:.2} dB", q.qscale, psnr(f, &r.recon)?)))
        .collect::<Result<Vec<_>>>()?;
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("original", luma[t].clone())
            .with_panel("recon", coded[t].recon.clone())
            .with_panel("error", error_view(&luma[t], &coded[t].recon)?))
    })
}

pub(super) fn ssim_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::choice("distortion", &["intra", "blur", "awgn"], "intra", "Distortion applied to the reference"),
        ParamSpec::int("qscale", 1, 31, 8, "Quantizer scale for intra coding"),
        ParamSpec::float("blur_sigma", 0.3, 10.0, 2.0, "Gaussian blur scale"),
        ParamSpec::float("noise_sigma", 0.0, 100.0, 10.0, "Noise standard deviation in codes"),
        ParamSpec::int("noise_seed", 0, i64::from(u32::MAX), 1, "Noise generator seed").non_canonical(),
        frames_param(24),
    ]
}

pub(super) fn ssim(ctx: &Ctx) -> Result<Output> {
    let clip = head(ctx)?;
    let luma = clip.luma_planes();
    let distorted: Vec<Plane> = match ctx.p.s("distortion") {
        "blur" => luma.iter().map(|f| gaussian_blur(f, ctx.p.f("blur_sigma"), Boundary::Mirror)).collect(),
        "awgn" => awgn(&clip, ctx.p.f("noise_sigma"), ctx.p.u("noise_seed") as u64)?.luma_planes(),
        _ => {
            let q = QuantSpec::mpeg1(ctx.p.u("qscale") as u32)?;
            luma.iter().map(|f| intra_codec(f, &q).recon).collect()
        }
    };
    let sp = SsimParams::default();
    let maps = luma.iter().zip(&distorted).map(|(a, b)| ssim_map(a, b, &sp)).collect::<Result<Vec<_>>>()?;
    ctx.analysis(1, 1);
    let (w, h) = canvas(2, 2, ctx.dims());
    let layout = grid(2, 2, ctx.dims(), &[("reference", "reference"), ("distorted", "distorted"), ("map", "SSIM map")])
        .inset("ssim", AxesKind::Lin, shrink(PanelLayout::cell(w, h, 2, 2, 3)), Some("mean SSIM per frame"));
    let texts = luma
        .iter()
        .zip(&distorted)
        .zip(&maps)
        .map(|((a, b), m)| Ok(format!("SSIM={:.3}  PSNR={:.2} dB", m.mean, psnr(a, b)?.min(99.0))))
        .collect::<Result<Vec<_>>>()?;
    let ann = per_frame(&texts, 4, caption_y(h, 0));
    compose_all(ctx, &layout, luma.len(), clip.fps(), ann, |t| {
        let series = Series { points: maps[..=t].iter().enumerate().map(|(i, m)| (i as f64, m.mean)).collect() };
        Ok(FrameSources::default()
            .with_panel("reference", luma[t].clone())
            .with_panel("distorted", distorted[t].clone())
            .with_panel("map", maps[t].map.map(|v| 255.0 * v.clamp(0.0, 1.0)))
            .with_series("ssim", series))
    })
}

pub(super) fn rr_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("noise_sigma", 0.0, 100.0, 10.0, "Noise standard deviation in codes"),
        ParamSpec::int("block", 4, 64, 16, "Block side for the log-energy features"),
        frames_param(24),
    ]
}

pub(super) fn rr(ctx: &Ctx) -> Result<Output> {
    let clip = head(ctx)?;
    let luma = clip.luma_planes();
    let noisy = awgn(&clip, ctx.p.f("noise_sigma"), ctx.seed)?.luma_planes();
    let block = ctx.p.u("block");
    let rr = luma
        .iter()
        .zip(&noisy)
        .map(|(a, b)| rr_quality_map(a, b, block))
        .collect::<Result<Vec<_>>>()?;
    ctx.analysis(1, 1);
    let layout = grid(3, 1, ctx.dims(), &[("reference", "reference"), ("distorted", "distorted"), ("map", "RR map")]);
    let texts: Vec<String> = rr.iter().map(|q| format!("RR score {:.4} (block {block}, white = 2)", q.score)).collect();
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, luma.len(), clip.fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("reference", luma[t].clone())
            .with_panel("distorted", noisy[t].clone())
            .with_panel("map", scaled_view(&rr[t].map, 2.0)))
    })
}

pub(super) fn compare_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("q_a", 1, 31, 4, "First quantizer scale"),
        ParamSpec::int("q_b", 1, 31, 16, "Second quantizer scale"),
        matrix_param(),
        ParamSpec::int("block", 4, 64, 16, "Reduced-reference block side"),
        frames_param(12),
    ]
}

pub(super) fn compare(ctx: &Ctx) -> Result<Output> {
    let (qa, qb) = (ctx.p.u("q_a"), ctx.p.u("q_b"));
    let (spec_a, spec_b) = (quant(ctx, qa)?, quant(ctx, qb)?);
    let block = ctx.p.u("block");
    let luma = ctx.luma();
    let sp = SsimParams::default();
    struct Scored {
        recon: Plane,
        map: Plane,
        line: String,
    }
    let score = |f: &Plane, spec: &QuantSpec| -> Result<Scored> {
        let recon = intra_codec(f, spec).recon;
        let s = ssim_map(f, &recon, &sp)?;
        let rr = rr_quality_map(f, &recon, block)?;
        let line = format!(
            "q={}: PSNR {:.2} dB  SSIM {:.3}  RR {:.4}",
            spec.qscale,
            psnr(f, &recon)?.min(99.0),
            s.mean,
            rr.score
        );
        Ok(Scored { recon, map: s.map, line })
    };
    let scored = luma
        .iter()
        .map(|f| Ok((score(f, &spec_a)?, score(f, &spec_b)?)))
        .collect::<Result<Vec<_>>>()?;
    ctx.analysis(1, 1);
    let la = format!("q={qa}");
    let lb = format!("q={qb}");
    let ma = format!("SSIM map q={qa}");
    let mb = format!("SSIM map q={qb}");
    let layout = grid(2, 2, ctx.dims(), &[("a", &la), ("b", &lb), ("map_a", &ma), ("map_b", &mb)]);
    let mut ann = per_frame(&scored.iter().map(|s| s.0.line.clone()).collect::<Vec<_>>(), 4, caption_y(layout.height, 1));
    ann.extend(per_frame(&scored.iter().map(|s| s.1.line.clone()).collect::<Vec<_>>(), 4, caption_y(layout.height, 0)));
    compose_all(ctx, &layout, luma.len(), ctx.clip().fps(), ann, |t| {
        let (a, b) = &scored[t];
        let view = |m: &Plane| m.map(|v| 255.0 * v.clamp(0.0, 1.0));
        Ok(FrameSources::default()
            .with_panel("a", a.recon.clone())
            .with_panel("b", b.recon.clone())
            .with_panel("map_a", view(&a.map))
            .with_panel("map_b", view(&b.map)))
    })
}

pub(super) fn denoise_schema() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("noise_sigma", 0.0, 100.0, 15.0, "Noise standard deviation in codes"),
        ParamSpec::int("spatial_radius", 0, 5, 1, "Spatial window radius"),
        ParamSpec::int("temporal_radius", 0, 5, 1, "Temporal window radius"),
        frames_param(12),
    ]
}

pub(super) fn denoise(ctx: &Ctx) -> Result<Output> {
    let sigma = ctx.p.f("noise_sigma");
    let clip = head(ctx)?;
    let noisy = awgn(&clip, sigma, ctx.seed)?;
    let denoised = st_wiener_denoise(&noisy, sigma, ctx.p.u("spatial_radius"), ctx.p.u("temporal_radius"))?;
    ctx.analysis(1, 1);
    let (clean, noisy, den) = (clip.luma_planes(), noisy.luma_planes(), denoised.luma_planes());
    let layout = grid(3, 1, ctx.dims(), &[("clean", "clean"), ("noisy", "noisy"), ("denoised", "Wiener")]);
    let texts = (0..clean.len())
        .map(|t| {
            Ok(format!(
                "sigma={sigma}: noisy {:.2} dB, denoised {:.2} dB",
                psnr(&clean[t], &noisy[t])?.min(99.0),
                psnr(&clean[t], &den[t])?.min(99.0)
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let ann = per_frame(&texts, 4, caption_y(layout.height, 0));
    compose_all(ctx, &layout, clean.len(), clip.fps(), ann, |t| {
        Ok(FrameSources::default()
            .with_panel("clean", clean[t].clone())
            .with_panel("noisy", noisy[t].clone())
            .with_panel("denoised", den[t].clone()))
    })
}
