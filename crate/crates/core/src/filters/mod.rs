//! Spatial and temporal linear filters, the predictive coding residual and
//! the derivative-of-Gaussian steerable pyramid.

mod convolve;
mod kernel;
mod predictive;
mod steerable;
mod temporal;

pub use convolve::{convolve2d, gaussian_blur, Boundary};
pub use kernel::{make_spatial_kernel, make_temporal_kernel, Kernel2D, SpatialKind, TemporalKernel, TemporalKind};
pub use predictive::{predictive_inverse, predictive_residual};
pub use steerable::{build_steerable, steer, SteerableDecomposition, BASIS_SIGMA};
pub use temporal::{convolve_t, TemporalResponse};

pub(crate) use convolve::convolve_any;
