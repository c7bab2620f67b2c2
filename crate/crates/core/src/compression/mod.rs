//! Intra-frame DCT quantization, distortion injection, full- and
//! reduced-reference quality metrics and a spatiotemporal Wiener denoiser.

mod codec;
mod denoise;
mod quality;

pub use codec::{default_intra_matrix, intra_codec, parse_quant_matrix, IntraResult, QuantSpec};
pub use denoise::st_wiener_denoise;
pub use quality::{
    awgn, frame_metrics, metrics_to_csv, psnr, psnr_with_peak, rr_quality_map, ssim_map, MetricRow, RrQuality,
    SsimParams, SsimResult, RR_LOG_SIGMA,
};
