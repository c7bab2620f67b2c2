use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

const N: usize = 8;
const BUNDLED_MATRIX: &str = include_str!("../../data/mpeg1_intra.txt");

/// Quantizer scale plus an 8×8 weight matrix (row-major, `matrix[v][u]` for
/// vertical frequency `v`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantSpec {
    pub qscale: u32,
    pub matrix: [[u16; N]; N],
}

impl QuantSpec {
    pub fn new(qscale: u32, matrix: [[u16; N]; N]) -> Result<Self> {
        if qscale == 0 {
            return Err(Error::param("qscale", "must be at least 1"));
        }
        if matrix.iter().flatten().any(|&w| w == 0) {
            return Err(Error::param("matrix", "weights must be at least 1"));
        }
        Ok(QuantSpec { qscale, matrix })
    }

    /// Default intra matrix at `qscale`.
    pub fn mpeg1(qscale: u32) -> Result<Self> {
        QuantSpec::new(qscale, default_intra_matrix())
    }

    pub fn flat(qscale: u32, weight: u16) -> Result<Self> {
        QuantSpec::new(qscale, [[weight; N]; N])
    }

    fn step(&self, u: usize, v: usize) -> f64 {
        f64::from(self.qscale) * f64::from(self.matrix[v][u]) / 8.0
    }
}

/// Parse 64 whitespace-separated integers; `#` starts a comment.
pub fn parse_quant_matrix(text: &str) -> Result<[[u16; N]; N]> {
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<u16>().map_err(|e| Error::InvalidData(format!("matrix entry {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != N * N {
        return Err(Error::InvalidData(format!("expected 64 matrix entries, found {}", values.len())));
    }
    let mut m = [[0u16; N]; N];
    for (i, v) in values.into_iter().enumerate() {
        m[i / N][i % N] = v;
    }
    Ok(m)
}

pub fn default_intra_matrix() -> [[u16; N]; N] {
    static M: OnceLock<[[u16; N]; N]> = OnceLock::new();
    *M.get_or_init(|| parse_quant_matrix(BUNDLED_MATRIX).expect("bundled matrix is well formed"))
}

/// Orthonormal DCT-II basis, `basis[k][i]`.
fn basis() -> &'static [[f64; N]; N] {
    static B: OnceLock<[[f64; N]; N]> = OnceLock::new();
    B.get_or_init(|| {
        let mut b = [[0.0; N]; N];
        for (k, row) in b.iter_mut().enumerate() {
            let s = if k == 0 { (1.0 / N as f64).sqrt() } else { (2.0 / N as f64).sqrt() };
            for (i, v) in row.iter_mut().enumerate() {
                *v = s * (PI * (2 * i + 1) as f64 * k as f64 / (2 * N) as f64).cos();
            }
        }
        b
    })
}

fn fdct8(block: &[[f64; N]; N]) -> [[f64; N]; N] {
    let b = basis();
    let mut tmp = [[0.0; N]; N];
    for y in 0..N {
        for u in 0..N {
            tmp[y][u] = (0..N).map(|x| b[u][x] * block[y][x]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for v in 0..N {
        for u in 0..N {
            out[v][u] = (0..N).map(|y| b[v][y] * tmp[y][u]).sum();
        }
    }
    out
}

fn idct8(coef: &[[f64; N]; N]) -> [[f64; N]; N] {
    let b = basis();
    let mut tmp = [[0.0; N]; N];
    for y in 0..N {
        for u in 0..N {
            tmp[y][u] = (0..N).map(|v| b[v][y] * coef[v][u]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for y in 0..N {
        for x in 0..N {
            out[y][x] = (0..N).map(|u| b[u][x] * tmp[y][u]).sum();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntraResult {
    pub recon: Plane,
    /// Nonzero quantized coefficients over all blocks.
    pub nonzero: usize,
}

/// Blockwise DCT quantization round trip. Partial edge blocks are padded by
/// repeating the last row/column; the output is cropped back and clamped to
/// `[0, 255]`.
pub fn intra_codec(frame: &Plane, q: &QuantSpec) -> IntraResult {
    let (w, h) = (frame.width(), frame.height());
    let (bw, bh) = (w.div_ceil(N), h.div_ceil(N));
    let mut recon = Plane::new(w, h);
    let results: Vec<([[f64; N]; N], usize)> = (0..bw * bh)
        .into_par_iter()
        .map(|b| {
            let (bx, by) = (b % bw * N, b / bw * N);
            let mut block = [[0.0; N]; N];
            for (j, row) in block.iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = frame.get_clamped((bx + i) as isize, (by + j) as isize) - 128.0;
                }
            }
            let mut c = fdct8(&block);
            let mut nz = 0;
            for (v, row) in c.iter_mut().enumerate() {
                for (u, coef) in row.iter_mut().enumerate() {
                    let step = q.step(u, v);
                    let level = (*coef / step).round();
                    if level != 0.0 {
                        nz += 1;
                    }
                    *coef = level * step;
                }
            }
            (idct8(&c), nz)
        })
        .collect();
    let mut nonzero = 0;
    for (b, (block, nz)) in results.into_iter().enumerate() {
        nonzero += nz;
        let (bx, by) = (b % bw * N, b / bw * N);
        for (j, row) in block.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                let (x, y) = (bx + i, by + j);
                if x < w && y < h {
                    recon.set(x, y, (v + 128.0).clamp(0.0, 255.0));
                }
            }
        }
    }
    IntraResult { recon, nonzero }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::psnr;
    use crate::synth::dead_leaves;
    use crate::transforms::dct2;

    #[test]
    fn bundled_matrix_is_the_standard_one() {
        // Independent transcription of the MPEG-1 default intra matrix.
        let expected: [[u16; 8]; 8] = [
            [8, 16, 19, 22, 26, 27, 29, 34],
            [16, 16, 22, 24, 27, 29, 34, 37],
            [19, 22, 26, 27, 29, 34, 34, 38],
            [22, 22, 26, 27, 29, 34, 37, 40],
            [22, 26, 27, 29, 32, 35, 40, 48],
            [26, 27, 29, 32, 35, 40, 48, 58],
            [26, 27, 29, 34, 38, 46, 56, 69],
            [27, 29, 35, 38, 46, 56, 69, 83],
        ];
        assert_eq!(default_intra_matrix(), expected);
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(parse_quant_matrix("1 2 3").is_err());
        assert!(parse_quant_matrix(&"x ".repeat(64)).is_err());
        assert!(QuantSpec::new(1, [[0; 8]; 8]).is_err());
        assert!(QuantSpec::mpeg1(0).is_err());
    }

    #[test]
    fn block_dct_matches_fft_dct() {
        let p = dead_leaves(8, 8, 3);
        let mut block = [[0.0; 8]; 8];
        for (j, row) in block.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = p.get(i, j);
            }
        }
        let c = fdct8(&block);
        let reference = dct2(&p);
        let r = reference.real().unwrap();
        for v in 0..8 {
            for u in 0..8 {
                assert!((c[v][u] - r[v * 8 + u]).abs() < 1e-9);
            }
        }
        let back = idct8(&c);
        for j in 0..8 {
            for i in 0..8 {
                assert!((back[j][i] - block[j][i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn near_lossless_setting() {
        let p = dead_leaves(61, 43, 2).map(f64::round);
        let r = intra_codec(&p, &QuantSpec::flat(1, 8).unwrap());
        assert!(r.recon.max_abs_diff(&p) <= 1.0);
    }

    #[test]
    fn constant_mid_gray_is_exact() {
        let p = Plane::filled(24, 16, 128.0);
        for q in [1, 7, 31] {
            let r = intra_codec(&p, &QuantSpec::mpeg1(q).unwrap());
            assert_eq!(r.recon, p);
        }
    }

    #[test]
    fn quality_and_rate_fall_with_qscale() {
        let p = dead_leaves(128, 96, 11).map(f64::round);
        let mut prev_psnr = f64::INFINITY;
        let mut prev_nz = usize::MAX;
        for q in [1, 2, 4, 8, 16, 31] {
            let r = intra_codec(&p, &QuantSpec::mpeg1(q).unwrap());
            let s = psnr(&p, &r.recon).unwrap();
            assert!(s <= prev_psnr, "q={q}: {s} > {prev_psnr}");
            assert!(r.nonzero <= prev_nz);
            prev_psnr = s;
            prev_nz = r.nonzero;
        }
    }
}
