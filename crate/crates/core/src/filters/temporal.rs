use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plane::{mirror_index, Plane};

use super::kernel::TemporalKernel;

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalResponse {
    pub frames: Vec<Plane>,
    /// Leading frames computed from zero history (causal kernels only).
    pub warmup: usize,
}

/// Per-pixel temporal convolution. Output length equals input length.
///
/// Symmetric kernels are centered with mirrored ends; causal kernels only
/// read frames `<= t` and treat the time before frame 0 as zeros.
pub fn convolve_t(frames: &[Plane], k: &TemporalKernel) -> Result<TemporalResponse> {
    if frames.len() < k.len() {
        return Err(Error::ClipTooShort {
            frames: frames.len(),
            required: k.len(),
        });
    }
    let first = &frames[0];
    if let Some(bad) = frames.iter().position(|f| !f.same_geometry(first)) {
        return Err(Error::GeometryMismatch(format!("frame {bad} differs from frame 0")));
    }
    let n = frames.len();
    let causal = k.is_causal();
    let r = k.radius() as isize;
    let out: Vec<Plane> = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut acc = Plane::new(first.width(), first.height());
            for (s, &tap) in k.taps.iter().enumerate() {
                let src = if causal {
                    let idx = t as isize - s as isize;
                    if idx < 0 {
                        continue;
                    }
                    idx as usize
                } else {
                    let offset = s as isize - r;
                    mirror_index(t as isize - offset, n)
                };
                for (a, v) in acc.data_mut().iter_mut().zip(frames[src].data()) {
                    *a += tap * v;
                }
            }
            acc
        })
        .collect();
    Ok(TemporalResponse {
        frames: out,
        warmup: if causal { k.len() - 1 } else { 0 },
    })
}
