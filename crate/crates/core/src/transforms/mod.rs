//! Frame transforms, multiscale decompositions and resampling.

mod dct;
mod dft;
mod dwt;
mod pyramid;
mod resample;

pub use dct::{dct1, dct2, idct1, idct2};
pub use dft::{dft2, forward, idft2, inverse, log_magnitude_view, Coefficients, Spectrum, TransformKind};
pub use dwt::{dwt2, idwt2, DetailBands, SubbandPyramid, Wavelet};
pub use pyramid::{gaussian_pyramid, DEFAULT_PYRAMID_SIGMA};
pub use resample::{resample_spatial, resample_temporal, ResampleKernel, TemporalMode};

pub(crate) use dft::{fft_in_place, transpose};
