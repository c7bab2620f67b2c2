//! Optical flow, flow visualization, retinal contrast and V1 motion energy.

mod flow;
mod hs;
pub(crate) mod retina;
mod robust;
mod v1;

pub use flow::{flow_visualize, read_flo, write_flo, FlowField, FlowView};
pub use hs::{hs_energy, horn_schunck, HSParams};
pub use retina::{local_contrast, LocalContrastParams};
pub use robust::{robust_flow, RobustFlowParams};
pub use v1::{v1_energy, V1Params, V1Response, V1_DIRECTIONS_DEG};
