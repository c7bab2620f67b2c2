//! 8×16 monospaced ASCII glyphs: the 8×8 legacy bitmaps with every row doubled.

use font8x8::legacy::BASIC_LEGACY;

pub const GLYPH_W: usize = 8;
pub const GLYPH_H: usize = 16;

/// Row-major on/off bitmap of one glyph. Characters outside 32–126 render
/// as `?`.
pub fn glyph(c: char) -> [[bool; GLYPH_W]; GLYPH_H] {
    let code = match c as u32 {
        v @ 32..=126 => v as usize,
        _ => '?' as usize,
    };
    let rows = BASIC_LEGACY[code];
    let mut out = [[false; GLYPH_W]; GLYPH_H];
    for (y, row) in out.iter_mut().enumerate() {
        let bits = rows[y / 2];
        for (x, px) in row.iter_mut().enumerate() {
            *px = bits >> x & 1 == 1;
        }
    }
    out
}

pub fn text_width(text: &str) -> usize {
    text.chars().count() * GLYPH_W
}
