//! Demo catalog, synthetic corpus, frame composition and the render pipeline.

pub mod catalog;
pub mod compose;
pub mod corpus;
mod demos;
pub mod font;
pub mod params;
pub mod render;

pub use catalog::{catalog, demo_ids, descriptor, CatalogCategory, DemoDescriptor, InputKind, CATEGORIES};
pub use compose::{compose_frame, Annotation, AxesKind, FrameSources, Panel, PanelLayout, PanelSource, PlotInset, Rect, Series};
pub use corpus::{generate_clip, write_corpus, CorpusClip, CorpusOptions};
pub use params::{resolve_params, ParamKind, ParamMap, ParamSpec, ParamValue};
pub use render::{render_demo, render_demo_with_progress, RenderManifest, RenderOutput, ENGINE_VERSION};
