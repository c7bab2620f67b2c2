//! Render pipeline: validate, run the demo, burn in annotations, checksum.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::{convert_color, FrameFormat, Rational, VideoClip, Y4mHeader};

use super::catalog::{descriptor, InputKind};
use super::compose::Annotation;
use super::demos::{Ctx, DEMOS};
use super::params::{resolve_params, ParamMap, Resolved};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderManifest {
    pub demo_id: String,
    pub params: ParamMap,
    /// Present only for stochastic demos.
    pub seed: Option<u64>,
    pub input_checksum: Option<String>,
    pub width: usize,
    pub height: usize,
    pub fps: Rational,
    pub frame_count: usize,
    /// Bytes of one frame's planes in the `.y4m` payload.
    pub frame_payload_len: usize,
    pub annotations: Vec<Annotation>,
    /// SHA-256 over the output samples, equal to the `.y4m` payload minus
    /// the `FRAME` markers.
    pub content_checksum: String,
    pub engine_version: String,
}

impl RenderManifest {
    /// Total plane bytes of the emitted `.y4m`.
    pub fn payload_len(&self) -> usize {
        self.frame_count * self.frame_payload_len
    }
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    /// 4:2:0 output frames.
    pub clip: VideoClip,
    pub manifest: RenderManifest,
}

pub fn render_demo(id: &str, input: Option<&VideoClip>, params: &ParamMap, seed: Option<u64>) -> Result<RenderOutput> {
    render_demo_with_progress(id, input, params, seed, &|_| {})
}

/// As [`render_demo`], reporting a non-decreasing completion fraction.
pub fn render_demo_with_progress(
    id: &str,
    input: Option<&VideoClip>,
    params: &ParamMap,
    seed: Option<u64>,
    progress: &(dyn Fn(f64) + Sync),
) -> Result<RenderOutput> {
    let desc = descriptor(id).ok_or_else(|| Error::UnknownDemo(id.into()))?;
    let def = DEMOS.iter().find(|d| d.id == id).expect("catalog mirrors the registry");
    let resolved = resolve_params(&desc.param_schema, params)?;
    let seed = match (desc.stochastic, seed) {
        (true, None) => {
            return Err(Error::Schema { field: "seed".into(), reason: format!("demo `{id}` is stochastic") })
        }
        (true, s) => s,
        (false, _) => None,
    };
    let input = match desc.input_kind {
        InputKind::Clip => Some(input.ok_or_else(|| Error::MissingInput(id.into()))?),
        InputKind::None => None,
    };
    let high_water = Mutex::new(0.0f64);
    let report = |f: f64| {
        let mut hw = high_water.lock().unwrap_or_else(|e| e.into_inner());
        if f > *hw {
            *hw = f.min(1.0);
            progress(*hw);
        }
    };
    let ctx = Ctx { p: Resolved(&resolved), input, seed: seed.unwrap_or(0), progress: &report };
    let out = (def.render)(&ctx)?;
    if out.frames.is_empty() {
        return Err(Error::Degenerate(format!("demo `{id}` produced no frames")));
    }
    let frames = out
        .frames
        .iter()
        .map(|f| convert_color(f, FrameFormat::Y420))
        .collect::<Result<Vec<_>>>()?;
    let clip = VideoClip::new(frames, out.fps)?;
    let header = Y4mHeader { width: clip.width(), height: clip.height(), fps: clip.fps(), chroma: "420".into() };
    let manifest = RenderManifest {
        demo_id: id.into(),
        params: resolved,
        seed,
        input_checksum: input.map(VideoClip::sample_checksum),
        width: clip.width(),
        height: clip.height(),
        fps: clip.fps(),
        frame_count: clip.len(),
        frame_payload_len: header.frame_payload_len(),
        annotations: out.annotations,
        content_checksum: clip.sample_checksum(),
        engine_version: ENGINE_VERSION.into(),
    };
    report(1.0);
    Ok(RenderOutput { clip, manifest })
}
