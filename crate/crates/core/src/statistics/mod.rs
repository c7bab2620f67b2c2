//! Natural-signal statistics: radial and temporal power spectra, power-law
//! fits and empirical densities.

mod epdf;
mod spectrum;

pub use epdf::{epdf_stats, epdf_to_csv, Epdf, EpdfStats};
pub use spectrum::{
    curve_to_csv, fit_power_law, power_spectrum, PowerLawFit, PowerSpectrumCurve, SpectrumAxis, DEFAULT_FIT_BAND,
    DEFAULT_SPECTRUM_BINS,
};
