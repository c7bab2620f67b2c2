//! Frame and clip data model, YUV4MPEG2 container I/O and color conversion.

mod color;
mod frame;
mod y4m;

pub use color::{convert_color, ColorMatrix};
pub use frame::{Frame, FrameFormat, Rational, RgbFrame, VideoClip, YuvFrame};
pub use y4m::{read_y4m, read_y4m_file, write_y4m, write_y4m_file, Y4mHeader};
