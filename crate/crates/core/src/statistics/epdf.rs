use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized histogram; values outside the range count in the edge bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epdf {
    pub bin_edges: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl Epdf {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpdfStats {
    pub epdf: Epdf,
    pub mean: f64,
    pub variance: f64,
    /// `E[(x-μ)⁴]/σ⁴`; `None` when the variance is zero.
    pub kurtosis: Option<f64>,
}

/// Histogram plus moments of `data`. A range straddling zero needs an odd
/// bin count so that one bin is centered on zero.
pub fn epdf_stats(data: &[f64], bins: usize, range: (f64, f64)) -> Result<EpdfStats> {
    if data.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param("range", format!("[{lo}, {hi}] is empty")));
    }
    if bins < 3 {
        return Err(Error::param("bins", "must be at least 3"));
    }
    if lo < 0.0 && hi > 0.0 && bins.is_multiple_of(2) {
        return Err(Error::param("bins", "signed data needs an odd bin count"));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in data {
        let b = ((v - lo) / width).floor();
        let b = if b.is_nan() { 0 } else { b.clamp(0.0, (bins - 1) as f64) as usize };
        counts[b] += 1;
    }
    let n = data.len() as f64;
    let probabilities = counts.iter().map(|&c| c as f64 / n).collect();
    let bin_edges = (0..=bins).map(|i| lo + i as f64 * width).collect();

    let mean = data.iter().sum::<f64>() / n;
    let m2 = data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = data.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let kurtosis = if m2 > 0.0 { Some(m4 / (m2 * m2)) } else { None };
    Ok(EpdfStats {
        epdf: Epdf { bin_edges, probabilities },
        mean,
        variance: m2,
        kurtosis,
    })
}

pub fn epdf_to_csv(e: &Epdf) -> String {
    let mut s = String::from("bin_center,probability\n");
    for (c, p) in e.bin_centers().iter().zip(&e.probabilities) {
        let _ = writeln!(s, "{c},{p}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{convolve2d, make_spatial_kernel, Boundary, SpatialKind};
    use crate::synth::dead_leaves;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn gaussian_kurtosis_is_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = epdf_stats(&data, 101, (-5.0, 5.0)).unwrap();
        assert!((s.kurtosis.unwrap() - 3.0).abs() < 0.05);
        assert!((s.epdf.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_data_has_no_kurtosis() {
        let s = epdf_stats(&[4.0; 50], 5, (0.0, 10.0)).unwrap();
        assert_eq!(s.variance, 0.0);
        assert!(s.kurtosis.is_none());
    }

    #[test]
    fn outliers_land_in_edge_bins() {
        let s = epdf_stats(&[-100.0, 0.0, 100.0], 3, (-1.5, 1.5)).unwrap();
        assert_eq!(s.epdf.probabilities, vec![1.0 / 3.0; 3]);
        assert_eq!(s.epdf.bin_centers()[1], 0.0);
    }

    #[test]
    fn argument_checks() {
        assert!(epdf_stats(&[], 5, (0.0, 1.0)).is_err());
        assert!(epdf_stats(&[1.0], 5, (1.0, 1.0)).is_err());
        assert!(epdf_stats(&[1.0], 2, (0.0, 1.0)).is_err());
        assert!(epdf_stats(&[1.0], 4, (-1.0, 1.0)).is_err());
    }

    #[test]
    fn bandpass_natural_frame_is_leptokurtic() {
        let frame = dead_leaves(192, 192, 8);
        let k = make_spatial_kernel(SpatialKind::Log { sigma: 1.5 }).unwrap();
        let resp = convolve2d(&frame, &k, Boundary::Mirror).unwrap();
        let (lo, hi) = resp.min_max();
        let m = lo.abs().max(hi.abs());
        let s = epdf_stats(resp.data(), 101, (-m, m)).unwrap();
        assert!(s.kurtosis.unwrap() > 3.0);
    }
}
