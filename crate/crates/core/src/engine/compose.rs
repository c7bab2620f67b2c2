//! Canvas composition: resampled panels, bitmap text and line-plot insets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{quantize_u8, Plane};
use crate::transforms::{resample_spatial, ResampleKernel};
use crate::video::{Frame, RgbFrame};

use super::font::{glyph, GLYPH_H, GLYPH_W};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.bottom() && o.y < self.bottom()
    }

    /// Largest rectangle of aspect `src_w:src_h` centered inside `self`.
    pub fn fit(&self, src_w: usize, src_h: usize) -> Rect {
        let scale = (self.w as f64 / src_w as f64).min(self.h as f64 / src_h as f64);
        let w = ((src_w as f64 * scale).floor() as usize).clamp(1, self.w);
        let h = ((src_h as f64 * scale).floor() as usize).clamp(1, self.h);
        Rect::new(self.x + (self.w - w) / 2, self.y + (self.h - h) / 2, w, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    /// Key into [`FrameSources::panels`].
    pub role: String,
    pub rect: Rect,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxesKind {
    Lin,
    LogLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotInset {
    /// Key into [`FrameSources::series`].
    pub series: String,
    pub axes: AxesKind,
    pub rect: Rect,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelLayout {
    pub width: usize,
    pub height: usize,
    pub panels: Vec<Panel>,
    pub insets: Vec<PlotInset>,
}

impl PanelLayout {
    pub fn new(width: usize, height: usize) -> Self {
        PanelLayout { width, height, panels: Vec::new(), insets: Vec::new() }
    }

    pub fn panel(mut self, role: &str, rect: Rect, label: Option<&str>) -> Self {
        self.panels.push(Panel { role: role.into(), rect, label: label.map(Into::into) });
        self
    }

    pub fn inset(mut self, series: &str, axes: AxesKind, rect: Rect, title: Option<&str>) -> Self {
        self.insets.push(PlotInset { series: series.into(), axes, rect, title: title.map(Into::into) });
        self
    }

    /// `cols × rows` equal cells filled in row-major order from `cells`
    /// (`(role, label)`); each panel keeps the `src_w:src_h` aspect.
    pub fn grid(
        width: usize,
        height: usize,
        cols: usize,
        rows: usize,
        src: (usize, usize),
        cells: &[(&str, &str)],
    ) -> Self {
        let (cw, ch) = (width / cols, height / rows);
        let mut layout = PanelLayout::new(width, height);
        for (i, (role, label)) in cells.iter().enumerate() {
            let cell = Rect::new((i % cols) * cw, (i / cols) * ch, cw, ch);
            layout = layout.panel(role, cell.fit(src.0, src.1), Some(label));
        }
        layout
    }

    /// Cell `i` of a `cols × rows` grid, without aspect fitting.
    pub fn cell(width: usize, height: usize, cols: usize, rows: usize, i: usize) -> Rect {
        let (cw, ch) = (width / cols, height / rows);
        Rect::new((i % cols) * cw, (i / cols) * ch, cw, ch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidGeometry("layout canvas is empty".into()));
        }
        let rects: Vec<(&str, Rect)> = self
            .panels
            .iter()
            .map(|p| (p.role.as_str(), p.rect))
            .chain(self.insets.iter().map(|i| (i.series.as_str(), i.rect)))
            .collect();
        for (i, (name, r)) in rects.iter().enumerate() {
            if r.w == 0 || r.h == 0 || r.right() > self.width || r.bottom() > self.height {
                return Err(Error::InvalidGeometry(format!("{name}: {r:?} is empty or leaves the canvas")));
            }
            if let Some((other, _)) = rects[i + 1..].iter().find(|(_, o)| o.overlaps(r)) {
                return Err(Error::InvalidGeometry(format!("{name} overlaps {other}")));
            }
        }
        Ok(())
    }
}

/// Text burned into frames `first_frame..=last_frame`; `(x, y)` is the top
/// left of the first glyph cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub text: String,
    pub x: usize,
    pub y: usize,
    pub first_frame: usize,
    pub last_frame: usize,
}

impl Annotation {
    pub fn new(text: impl Into<String>, x: usize, y: usize, frames: std::ops::RangeInclusive<usize>) -> Self {
        Annotation { text: text.into(), x, y, first_frame: *frames.start(), last_frame: *frames.end() }
    }

    pub fn covers(&self, frame: usize) -> bool {
        (self.first_frame..=self.last_frame).contains(&frame)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PanelSource {
    /// Display samples; values outside `[0, 255]` are clamped.
    Gray(Plane),
    Rgb(RgbFrame),
}

impl PanelSource {
    fn dims(&self) -> (usize, usize) {
        match self {
            PanelSource::Gray(p) => (p.width(), p.height()),
            PanelSource::Rgb(f) => (f.width(), f.height()),
        }
    }
}

impl From<Plane> for PanelSource {
    fn from(p: Plane) -> Self {
        PanelSource::Gray(p)
    }
}

/// Points of a line plot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// First two columns of a headed CSV table.
    pub fn from_csv(text: &str) -> Result<Series> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| Error::InvalidData(format!("series row {}: {e}", i + 2)))?;
            let field = |k: usize| -> Result<f64> {
                row.get(k)
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidData(format!("series row {}: column {k} is not numeric", i + 2)))
            };
            points.push((field(0)?, field(1)?));
        }
        Ok(Series { points })
    }
}

#[derive(Debug, Clone, Default)]
pub struct FrameSources {
    pub panels: HashMap<String, PanelSource>,
    pub series: HashMap<String, Series>,
}

impl FrameSources {
    pub fn with_panel(mut self, role: &str, src: impl Into<PanelSource>) -> Self {
        self.panels.insert(role.into(), src.into());
        self
    }

    pub fn with_series(mut self, name: &str, s: Series) -> Self {
        self.series.insert(name.into(), s);
        self
    }
}

pub(crate) struct Canvas {
    pub(crate) frame: RgbFrame,
}

const AXIS: [u8; 3] = [160, 160, 160];
const TRACE: [u8; 3] = [255, 220, 0];
const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];

impl Canvas {
    pub(crate) fn new(width: usize, height: usize) -> Self {
        Canvas { frame: RgbFrame::filled(width, height, BLACK) }
    }

    fn put(&mut self, x: isize, y: isize, rgb: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.frame.width() && (y as usize) < self.frame.height() {
            self.frame.put(x as usize, y as usize, rgb);
        }
    }

    fn fill(&mut self, r: Rect, rgb: [u8; 3]) {
        for y in r.y..r.bottom().min(self.frame.height()) {
            for x in r.x..r.right().min(self.frame.width()) {
                self.frame.put(x, y, rgb);
            }
        }
    }

    /// White glyphs on a black band, clipped to the canvas.
    pub(crate) fn text(&mut self, text: &str, x: usize, y: usize) {
        for (i, c) in text.chars().enumerate() {
            let g = glyph(c);
            let gx = x + i * GLYPH_W;
            for (dy, row) in g.iter().enumerate() {
                for (dx, &on) in row.iter().enumerate() {
                    self.put((gx + dx) as isize, (y + dy) as isize, if on { WHITE } else { BLACK });
                }
            }
        }
    }

    fn line(&mut self, (x0, y0): (isize, isize), (x1, y1): (isize, isize), rgb: [u8; 3]) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, rgb);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    fn panel(&mut self, src: &PanelSource, r: Rect) -> Result<()> {
        let fit = |p: &Plane| -> Result<Plane> {
            if p.width() == r.w && p.height() == r.h {
                Ok(p.clone())
            } else {
                resample_spatial(p, r.w, r.h, ResampleKernel::Bilinear)
            }
        };
        match src {
            PanelSource::Gray(p) => {
                let p = fit(p)?;
                for y in 0..r.h {
                    for x in 0..r.w {
                        let v = quantize_u8(p.get(x, y));
                        self.frame.put(r.x + x, r.y + y, [v, v, v]);
                    }
                }
            }
            PanelSource::Rgb(f) => {
                let channels: Vec<Plane> = (0..3)
                    .map(|c| fit(&Plane::from_fn(f.width(), f.height(), |x, y| f64::from(f.pixel(x, y)[c]))))
                    .collect::<Result<_>>()?;
                for y in 0..r.h {
                    for x in 0..r.w {
                        let px = [0, 1, 2].map(|c| quantize_u8(channels[c].get(x, y)));
                        self.frame.put(r.x + x, r.y + y, px);
                    }
                }
            }
        }
        Ok(())
    }

    fn plot(&mut self, inset: &PlotInset, series: &Series) {
        let r = inset.rect;
        self.fill(r, BLACK);
        let top = if inset.title.is_some() && r.h > 2 * GLYPH_H { GLYPH_H + 2 } else { 2 };
        if let Some(t) = &inset.title {
            if top > 2 {
                let room = r.w / GLYPH_W;
                self.text(&t.chars().take(room).collect::<String>(), r.x, r.y);
            }
        }
        let (left, bottom) = (r.x as isize + 6, r.bottom() as isize - 6);
        let (right, upper) = (r.right() as isize - 3, (r.y + top) as isize);
        if right - left < 4 || bottom - upper < 4 {
            return;
        }
        self.line((left, upper), (left, bottom), AXIS);
        self.line((left, bottom), (right, bottom), AXIS);
        for k in 0..=4 {
            let tx = left + (right - left) * k / 4;
            let ty = bottom - (bottom - upper) * k / 4;
            self.line((tx, bottom), (tx, bottom + 3), AXIS);
            self.line((left - 3, ty), (left, ty), AXIS);
        }
        let map = |v: f64| match inset.axes {
            AxesKind::Lin => Some(v),
            AxesKind::LogLog => (v > 0.0).then(|| v.log10()),
        };
        let pts: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter_map(|&(x, y)| Some((map(x)?, map(y)?)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if pts.is_empty() {
            return;
        }
        let span = |vals: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
        let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
        let to_px = |(x, y): (f64, f64)| {
            let px = left + 1 + ((x - x0) / (x1 - x0) * (right - left - 1) as f64).round() as isize;
            let py = bottom - 1 - ((y - y0) / (y1 - y0) * (bottom - upper - 1) as f64).round() as isize;
            (px, py)
        };
        let mut prev = to_px(pts[0]);
        self.put(prev.0, prev.1, TRACE);
        for &p in &pts[1..] {
            let q = to_px(p);
            self.line(prev, q, TRACE);
            prev = q;
        }
    }
}

/// Draw every panel, inset, panel label and the given annotations onto a
/// black RGB canvas.
pub fn compose_frame(layout: &PanelLayout, sources: &FrameSources, annotations: &[Annotation]) -> Result<Frame> {
    layout.validate()?;
    let mut canvas = Canvas::new(layout.width, layout.height);
    for p in &layout.panels {
        let src = sources
            .panels
            .get(&p.role)
            .ok_or_else(|| Error::InvalidData(format!("no source for panel {:?}", p.role)))?;
        let (w, h) = src.dims();
        if w == 0 || h == 0 {
            return Err(Error::InvalidGeometry(format!("panel {:?} source is empty", p.role)));
        }
        canvas.panel(src, p.rect)?;
    }
    for inset in &layout.insets {
        let series = sources
            .series
            .get(&inset.series)
            .ok_or_else(|| Error::InvalidData(format!("no series {:?}", inset.series)))?;
        canvas.plot(inset, series);
    }
    for p in &layout.panels {
        if let Some(label) = &p.label {
            canvas.text(label, p.rect.x, p.rect.y);
        }
    }
    for a in annotations {
        canvas.text(&a.text, a.x, a.y);
    }
    Ok(Frame::Rgb24(canvas.frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::dead_leaves;

    fn rgb(f: &Frame) -> &RgbFrame {
        match f {
            Frame::Rgb24(r) => r,
            _ => panic!("expected RGB"),
        }
    }

    #[test]
    fn single_full_panel_is_the_source() {
        let src = dead_leaves(64, 48, 1).map(f64::round);
        let layout = PanelLayout::new(64, 48).panel("a", Rect::new(0, 0, 64, 48), None);
        let f = compose_frame(&layout, &FrameSources::default().with_panel("a", src.clone()), &[]).unwrap();
        let out = rgb(&f);
        for y in 0..48 {
            for x in 0..64 {
                let v = src.get(x, y) as u8;
                assert_eq!(out.pixel(x, y), [v, v, v]);
            }
        }
    }

    #[test]
    fn half_panels_from_constants() {
        let layout = PanelLayout::new(32, 16)
            .panel("l", Rect::new(0, 0, 16, 16), None)
            .panel("r", Rect::new(16, 0, 16, 16), None);
        let sources = FrameSources::default()
            .with_panel("l", Plane::filled(40, 40, 0.0))
            .with_panel("r", Plane::filled(40, 40, 255.0));
        let f = compose_frame(&layout, &sources, &[]).unwrap();
        let out = rgb(&f);
        for y in 0..16 {
            for x in 0..32 {
                assert_eq!(out.pixel(x, y), if x < 16 { [0; 3] } else { [255; 3] });
            }
        }
    }

    #[test]
    fn layout_violations() {
        let overlap = PanelLayout::new(32, 32)
            .panel("a", Rect::new(0, 0, 20, 20), None)
            .panel("b", Rect::new(10, 10, 20, 20), None);
        assert!(overlap.validate().is_err());
        let outside = PanelLayout::new(32, 32).panel("a", Rect::new(20, 0, 20, 20), None);
        assert!(outside.validate().is_err());
        let missing = PanelLayout::new(32, 32).panel("a", Rect::new(0, 0, 8, 8), None);
        assert!(compose_frame(&missing, &FrameSources::default(), &[]).is_err());
    }

    #[test]
    fn fit_keeps_aspect() {
        let r = Rect::new(0, 0, 320, 360).fit(640, 360);
        assert_eq!(r, Rect::new(0, 90, 320, 180));
    }

    #[test]
    fn plot_draws_trace_inside_inset() {
        let series = Series::from_csv("f,p\n0.01,100\n0.1,1\n0.3,0.1\n").unwrap();
        assert_eq!(series.points.len(), 3);
        let layout = PanelLayout::new(80, 60).inset("s", AxesKind::LogLog, Rect::new(10, 5, 60, 50), Some("P(f)"));
        let f = compose_frame(&layout, &FrameSources::default().with_series("s", series), &[]).unwrap();
        let out = rgb(&f);
        let mut trace = 0;
        for y in 0..60 {
            for x in 0..80 {
                if out.pixel(x, y) == TRACE {
                    trace += 1;
                    assert!((10..70).contains(&x) && (5..55).contains(&y));
                }
            }
        }
        assert!(trace > 20);
        assert!(Series::from_csv("a,b\n1,x\n").is_err());
    }
}
