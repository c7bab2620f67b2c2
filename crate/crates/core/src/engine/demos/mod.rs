//! Demo implementations and the registry backing the catalog.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::Result;
use crate::plane::Plane;
use crate::transforms::ResampleKernel;
use crate::video::{convert_color, Frame, FrameFormat, Rational, VideoClip};

use super::catalog::InputKind;
use super::compose::{compose_frame, Annotation, FrameSources, PanelLayout, PanelSource};
use super::font::GLYPH_H;
use super::params::{ParamSpec, Resolved};

mod analog;
mod coding;
mod filtering;
mod motion;
mod sampling;
mod stats;
mod transforms;

pub(crate) struct Ctx<'a> {
    pub(crate) p: Resolved<'a>,
    /// Present whenever the demo's input kind is a clip.
    pub(crate) input: Option<&'a VideoClip>,
    pub(crate) seed: u64,
    pub(crate) progress: &'a (dyn Fn(f64) + Sync),
}

impl Ctx<'_> {
    pub(crate) fn clip(&self) -> &VideoClip {
        self.input.expect("input presence is checked before rendering")
    }

    /// Luma of the first `frames` input frames.
    pub(crate) fn luma(&self) -> Vec<Plane> {
        let clip = self.clip();
        let n = self.p.u("frames").min(clip.len());
        clip.frames()[..n].iter().map(Frame::luma).collect()
    }

    pub(crate) fn dims(&self) -> (usize, usize) {
        (self.clip().width(), self.clip().height())
    }

    /// Analysis-stage progress in `[0, 0.5]`.
    pub(crate) fn analysis(&self, done: usize, total: usize) {
        (self.progress)(0.5 * done as f64 / total.max(1) as f64);
    }
}

pub(crate) struct Output {
    pub(crate) frames: Vec<Frame>,
    pub(crate) fps: Rational,
    pub(crate) annotations: Vec<Annotation>,
}

pub(crate) struct DemoDef {
    pub(crate) id: &'static str,
    /// Index into the category list.
    pub(crate) category: usize,
    pub(crate) title: &'static str,
    pub(crate) description: &'static str,
    pub(crate) input: InputKind,
    pub(crate) stochastic: bool,
    pub(crate) schema: fn() -> Vec<ParamSpec>,
    pub(crate) render: fn(&Ctx) -> Result<Output>,
}

/// Compose `n` frames in parallel; `sources(t)` supplies the panels and
/// series of frame `t`.
pub(crate) fn compose_all<F>(
    ctx: &Ctx,
    layout: &PanelLayout,
    n: usize,
    fps: Rational,
    annotations: Vec<Annotation>,
    sources: F,
) -> Result<Output>
where
    F: Fn(usize) -> Result<FrameSources> + Sync,
{
    layout.validate()?;
    let done = AtomicUsize::new(0);
    let frames = (0..n)
        .into_par_iter()
        .map(|t| {
            let src = sources(t)?;
            let active: Vec<Annotation> = annotations.iter().filter(|a| a.covers(t)).cloned().collect();
            let frame = compose_frame(layout, &src, &active)?;
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            (ctx.progress)(0.5 + 0.5 * k as f64 / n as f64);
            Ok(frame)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output { frames, fps, annotations })
}

pub(crate) fn even(v: usize) -> usize {
    (v & !1).max(2)
}

/// Canvas of `cols × rows` cells of `cell` size, rounded down to even sides.
pub(crate) fn canvas(cols: usize, rows: usize, cell: (usize, usize)) -> (usize, usize) {
    (even(cols * cell.0), even(rows * cell.1))
}

pub(crate) fn grid(cols: usize, rows: usize, cell: (usize, usize), cells: &[(&str, &str)]) -> PanelLayout {
    let (w, h) = canvas(cols, rows, cell);
    PanelLayout::grid(w, h, cols, rows, cell, cells)
}

/// Baseline for a caption line `line` rows above the bottom edge.
pub(crate) fn caption_y(height: usize, line: usize) -> usize {
    height.saturating_sub((line + 1) * (GLYPH_H + 2))
}

/// One annotation per run of equal consecutive texts.
pub(crate) fn per_frame(texts: &[String], x: usize, y: usize) -> Vec<Annotation> {
    let mut out: Vec<Annotation> = Vec::new();
    for (t, text) in texts.iter().enumerate() {
        match out.last_mut() {
            Some(a) if &a.text == text && a.last_frame + 1 == t => a.last_frame = t,
            _ => out.push(Annotation::new(text.clone(), x, y, t..=t)),
        }
    }
    out
}

/// Colour frames display as RGB, gray frames as luma.
pub(crate) fn display_source(frame: &Frame) -> Result<PanelSource> {
    Ok(match frame {
        Frame::Gray(p) => PanelSource::Gray(p.clone()),
        Frame::Rgb24(f) => PanelSource::Rgb(f.clone()),
        y420 @ Frame::Y420(_) => match convert_color(y420, FrameFormat::Rgb24)? {
            Frame::Rgb24(f) => PanelSource::Rgb(f),
            _ => unreachable!("conversion target is RGB"),
        },
    })
}

pub(crate) fn kernel_param() -> ParamSpec {
    ParamSpec::choice("kernel", &["bilinear", "bicubic", "lanczos3"], "bicubic", "Interpolation kernel")
}

pub(crate) fn resample_kernel(name: &str) -> ResampleKernel {
    match name {
        "bilinear" => ResampleKernel::Bilinear,
        "lanczos3" => ResampleKernel::Lanczos3,
        _ => ResampleKernel::Bicubic,
    }
}

pub(crate) fn signed_view(p: &Plane, gain: f64) -> Plane {
    p.map(|v| 128.0 + gain * v)
}

/// `255·v/max`, black when `max` is zero.
pub(crate) fn scaled_view(p: &Plane, max: f64) -> Plane {
    if max > 0.0 {
        p.map(|v| 255.0 * v / max)
    } else {
        Plane::new(p.width(), p.height())
    }
}

pub(crate) fn frames_param(default: i64) -> ParamSpec {
    ParamSpec::int("frames", 1, 900, default, "Number of input frames to process").non_canonical()
}

#[allow(clippy::too_many_arguments)]
const fn def(
    id: &'static str,
    category: usize,
    title: &'static str,
    description: &'static str,
    input: InputKind,
    stochastic: bool,
    schema: fn() -> Vec<ParamSpec>,
    render: fn(&Ctx) -> Result<Output>,
) -> DemoDef {
    DemoDef { id, category, title, description, input, stochastic, schema, render }
}

use InputKind::{Clip, None as Generated};

pub(crate) static DEMOS: &[DemoDef] = &[
    def("csf-sweep", 0, "Spatial CSF sweep", "Square-wave grating whose spatial frequency rises log-linearly; the visibility boundary traces the contrast sensitivity function.", Generated, false, analog::csf_schema, analog::csf),
    def("flicker-fusion", 0, "Temporal flicker sweep", "Full-field black/white flicker whose half-period shrinks until the display alternates every frame, probing flicker fusion.", Generated, false, analog::flicker_schema, analog::flicker),
    def("aliasing-resample", 1, "Aliasing under decimation", "Naive pixel dropping next to Gaussian prefiltered decimation of the same frame.", Clip, false, sampling::aliasing_schema, sampling::aliasing),
    def("color-spaces", 1, "RGB and YCbCr planes", "The colour frame and its luma and subsampled chroma planes.", Clip, false, sampling::color_schema, sampling::color),
    def("down-up-sampling", 2, "Down- and up-sampling", "Spatial decimation followed by interpolation back to full size, with the magnified error.", Clip, false, transforms::downup_schema, transforms::downup),
    def("temporal-resample", 2, "Frame-rate conversion", "Temporal resampling by frame dropping/duplication or linear blending.", Clip, false, transforms::temporal_schema, transforms::temporal),
    def("gaussian-pyramid", 2, "Gaussian pyramid", "Successively blurred and decimated levels of each frame.", Clip, false, transforms::pyramid_schema, transforms::pyramid),
    def("dft-spatial", 2, "2D spatial DFT", "Each frame beside its centered log-magnitude spectrum.", Clip, false, transforms::dft_schema, transforms::dft),
    def("dct-spatial", 2, "2D spatial DCT", "Frame, DCT log-magnitude, and reconstruction from the largest coefficients.", Clip, false, transforms::dct_schema, transforms::dct),
    def("dwt-pyramid", 2, "2D discrete wavelet transform", "Multi-level subband mosaic of each frame.", Clip, false, transforms::dwt_schema, transforms::dwt),
    def("spatial-filters", 3, "Spatial filters", "Gaussian, difference-of-Gaussians, Laplacian-of-Gaussian and Gaussian derivative responses.", Clip, false, filtering::spatial_schema, filtering::spatial),
    def("gabor-pair", 3, "Gabor quadrature pair", "Even and odd Gabor responses and their local energy.", Clip, false, filtering::gabor_schema, filtering::gabor),
    def("steerable-pyramid", 3, "Steerable pyramid", "First-derivative responses steered to a rotating orientation at every scale.", Clip, false, filtering::steerable_schema, filtering::steerable),
    def("temporal-filters", 3, "Temporal filters", "Per-pixel temporal derivative, Gabor and causal gamma filtering.", Clip, false, filtering::temporal_schema, filtering::temporal),
    def("predictive-coding", 3, "Predictive coding", "Planar prediction residual and its lossless reconstruction, with first-order entropies.", Clip, false, filtering::predictive_schema, filtering::predictive),
    def("flow-hs", 4, "Horn-Schunck optical flow", "Dense flow from the Horn-Schunck variational solver.", Clip, false, motion::hs_schema, motion::hs),
    def("flow-robust", 4, "Robust coarse-to-fine flow", "Charbonnier-penalized flow with warping over a pyramid and median filtering.", Clip, false, motion::robust_schema, motion::robust),
    def("flow-compare", 4, "Flow solver comparison", "Side-by-side flow magnitudes of three solvers on a shared scale.", Clip, false, motion::compare_schema, motion::compare),
    def("retina-contrast", 5, "Retinal contrast coding", "Local contrast normalization and the entropy it saves.", Clip, false, motion::retina_schema, motion::retina),
    def("v1-energy", 5, "V1 motion energy", "Normalized spatiotemporal energy of six direction-tuned channels on a drifting grating.", Generated, false, motion::v1_schema, motion::v1),
    def("power-spectrum", 6, "Power spectrum", "Radially or temporally averaged power spectrum on log-log axes with a power-law fit.", Clip, false, stats::spectrum_schema, stats::spectrum),
    def("epdf-filters", 6, "Band-pass statistics", "Empirical densities of band-pass responses and their kurtosis.", Clip, false, stats::epdf_schema, stats::epdf),
    def("weber-grid", 6, "Weber's law grid", "Flickering dot patches on three backgrounds at three increments; visibility follows the Weber fraction.", Generated, false, stats::weber_schema, stats::weber),
    def("weber-gradient", 6, "Weber's law on a ramp", "Fixed-amplitude flickering dots over a luminance ramp fade as the background brightens.", Generated, false, stats::gradient_schema, stats::gradient),
    def("contrast-masking", 6, "Contrast masking", "Two gratings of different amplitude sweeping frequency over a shared noise mask.", Generated, true, stats::masking_schema, stats::masking),
    def("intra-dct-sweep", 7, "Intra DCT quantization sweep", "One frame coded at every quantizer scale, with PSNR against the scale.", Clip, false, coding::sweep_schema, coding::sweep),
    def("intra-dct", 7, "Intra DCT coding", "Every frame coded with 8x8 DCT quantization at a fixed scale.", Clip, false, coding::intra_schema, coding::intra),
    def("ssim-demo", 8, "SSIM map", "Structural similarity map between a reference and its distorted copy.", Clip, false, coding::ssim_schema, coding::ssim),
    def("rr-map", 8, "Reduced-reference quality", "Block log-energy differences of band-pass responses under additive noise.", Clip, true, coding::rr_schema, coding::rr),
    def("vqa-compare", 8, "Quality metric comparison", "PSNR, SSIM and reduced-reference scores at two quantizer scales.", Clip, false, coding::compare_schema, coding::compare),
    def("denoise-wiener", 9, "Spatiotemporal Wiener denoising", "Adaptive local Wiener filtering of a noisy clip over a space-time window.", Clip, true, coding::denoise_schema, coding::denoise),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_frame_merges_runs() {
        let t: Vec<String> = ["a", "a", "b", "a"].iter().map(|s| s.to_string()).collect();
        let a = per_frame(&t, 0, 0);
        assert_eq!(a.len(), 3);
        assert_eq!((a[0].first_frame, a[0].last_frame), (0, 1));
        assert_eq!((a[2].first_frame, a[2].last_frame), (3, 3));
    }

    #[test]
    fn canvas_is_even() {
        assert_eq!(canvas(3, 1, (33, 17)), (98, 16));
        assert_eq!(even(1), 2);
    }
}
