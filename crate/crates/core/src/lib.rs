// Negated float comparisons below reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compression;
pub mod engine;
pub mod error;
pub mod filters;
pub mod motion;
pub mod plane;
pub mod statistics;
pub mod stimuli;
pub mod survey;
pub mod synth;
pub mod transforms;
pub mod video;

pub use error::{Error, Result};
pub use plane::Plane;
pub use video::{Frame, FrameFormat, Rational, VideoClip, YuvFrame};
