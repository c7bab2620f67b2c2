//! YUV4MPEG2 reader and writer.
//!
//! Only progressive 4:2:0 8-bit streams are supported. The writer always
//! emits the canonical header `YUV4MPEG2 W<w> H<h> F<n>:<d> Ip A1:1 C420`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::frame::{chroma_dims, check_y420_geometry, payload_len, Frame, Rational, VideoClip, YuvFrame};

const MAGIC: &str = "YUV4MPEG2";
const MAX_HEADER: usize = 4096;

/// Parsed stream header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub fps: Rational,
    pub chroma: String,
}

impl Y4mHeader {
    pub fn canonical_line(&self) -> String {
        format!(
            "{MAGIC} W{} H{} F{}:{} Ip A1:1 C420\n",
            self.width, self.height, self.fps.num, self.fps.den
        )
    }

    pub fn frame_payload_len(&self) -> usize {
        payload_len(self.width, self.height)
    }

    pub fn parse(line: &str) -> Result<Self> {
        let mut tokens = line.split_ascii_whitespace();
        if tokens.next() != Some(MAGIC) {
            return Err(Error::MalformedHeader(format!("missing {MAGIC} magic")));
        }
        let (mut width, mut height, mut fps) = (None, None, None);
        let mut chroma = "420".to_string();
        for tok in tokens {
            let (tag, value) = tok.split_at(1);
            match tag {
                "W" => width = Some(parse_dim(value, "W")?),
                "H" => height = Some(parse_dim(value, "H")?),
                "F" => fps = Some(parse_ratio(value)?),
                "C" => chroma = value.to_string(),
                "I" => {
                    if value != "p" && value != "?" {
                        return Err(Error::UnsupportedFormat(format!(
                            "interlace mode `{value}` (only progressive is supported)"
                        )));
                    }
                }
                "A" | "X" => {}
                _ => return Err(Error::MalformedHeader(format!("unknown field `{tok}`"))),
            }
        }
        if !matches!(chroma.as_str(), "420" | "420jpeg" | "420paldv" | "420mpeg2") {
            return Err(Error::UnsupportedChroma(format!("C{chroma}")));
        }
        let width = width.ok_or_else(|| Error::MalformedHeader("missing W".into()))?;
        let height = height.ok_or_else(|| Error::MalformedHeader("missing H".into()))?;
        let fps = fps.ok_or_else(|| Error::MalformedHeader("missing F".into()))?;
        check_y420_geometry(width, height)
            .map_err(|e| Error::MalformedHeader(e.to_string()))?;
        Ok(Y4mHeader {
            width,
            height,
            fps,
            chroma,
        })
    }
}

fn parse_dim(value: &str, tag: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::MalformedHeader(format!("bad {tag} value `{value}`")))
}

fn parse_ratio(value: &str) -> Result<Rational> {
    let (n, d) = value
        .split_once(':')
        .ok_or_else(|| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
    let n = n
        .parse::<u32>()
        .map_err(|_| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
    let d = d
        .parse::<u32>()
        .map_err(|_| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
    if n == 0 || d == 0 {
        return Err(Error::MalformedHeader(format!("frame rate `{value}` must be positive")));
    }
    // Keep the ratio as written so canonical headers round-trip byte for byte.
    Ok(Rational { num: n, den: d })
}

/// Read one `\n`-terminated line. Returns `None` on clean EOF.
fn read_line<R: BufRead>(reader: &mut R) -> Result<Option<String>> {
    let mut buf = Vec::new();
    let n = reader
        .by_ref()
        .take(MAX_HEADER as u64)
        .read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader("unterminated header line".into()));
    }
    buf.pop();
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))
}

/// Parse a complete YUV4MPEG2 stream.
pub fn read_y4m<R: Read>(stream: R) -> Result<VideoClip> {
    let mut reader = BufReader::new(stream);
    let line = read_line(&mut reader)?.ok_or_else(|| Error::MalformedHeader("empty stream".into()))?;
    let header = Y4mHeader::parse(&line)?;
    let (w, h) = (header.width, header.height);
    let (cw, ch) = chroma_dims(w, h);
    let expected = header.frame_payload_len();

    let mut frames = Vec::new();
    while let Some(marker) = read_line(&mut reader)? {
        if marker != "FRAME" && !marker.starts_with("FRAME ") {
            return Err(Error::MalformedHeader(format!(
                "expected FRAME marker before frame {}",
                frames.len()
            )));
        }
        let mut payload = Vec::with_capacity(expected);
        let got = reader.by_ref().take(expected as u64).read_to_end(&mut payload)?;
        if got != expected {
            return Err(Error::TruncatedFrame {
                frame: frames.len(),
                expected,
                got,
            });
        }
        let cr = payload.split_off(w * h + cw * ch);
        let cb = payload.split_off(w * h);
        frames.push(Frame::Y420(YuvFrame::new(w, h, payload, cb, cr)?));
    }
    if frames.is_empty() {
        return Err(Error::Degenerate("stream contains no frames".into()));
    }
    VideoClip::new(frames, header.fps)
}

/// Serialize a 4:2:0 clip. Returns the number of bytes written.
pub fn write_y4m<W: Write>(clip: &VideoClip, sink: W) -> Result<usize> {
    let mut out = BufWriter::new(sink);
    let header = Y4mHeader {
        width: clip.width(),
        height: clip.height(),
        fps: clip.fps(),
        chroma: "420".into(),
    };
    let line = header.canonical_line();
    out.write_all(line.as_bytes())?;
    let mut written = line.len();
    for frame in clip.frames() {
        let f = frame.as_y420().ok_or_else(|| {
            Error::UnsupportedFormat(format!("y4m output needs Y420 frames, got {:?}", frame.format()))
        })?;
        out.write_all(b"FRAME\n")?;
        for plane in f.planes() {
            out.write_all(plane)?;
        }
        written += 6 + f.payload_len();
    }
    out.flush()?;
    Ok(written)
}

pub fn read_y4m_file(path: impl AsRef<Path>) -> Result<VideoClip> {
    read_y4m(File::open(path)?)
}

pub fn write_y4m_file(clip: &VideoClip, path: impl AsRef<Path>) -> Result<usize> {
    write_y4m(clip, File::create(path)?)
}
