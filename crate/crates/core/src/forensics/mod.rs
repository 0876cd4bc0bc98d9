//! The statistical battery run against trained weight dumps: entry
//! distributions (kurtosis, generalized-Gaussian shape, cross-validated KDE,
//! mode counts) and random-matrix diagnostics (complex eigenspectra vs the
//! circular law, singular values vs a moment-matched Gaussian baseline,
//! band-energy structure).
//!
//! Every statistic is a pure, deterministic function of its input; baselines
//! are seeded. This is what makes an [`crate::dump::WeightDump`] analyzable
//! as a forensic object.

mod gengauss;
mod kde;
mod moments;
mod report;
mod spectral;

pub use gengauss::{gen_gaussian_fit, moment_ratio, GenGaussianFit};
pub use kde::{count_modes, kde_fit, KdeDensity};
pub use moments::kurtosis;
pub use report::{
    analyze_dump, fit_distribution, AnalysisOutput, AnalysisSummary, BaselineComparison,
    DensityCurve, DistributionFit, LayerFit, LayerSpectral, SpectralReport, BAND_HALFWIDTHS,
    DETECTOR_MARGIN, LOW_CONFIDENCE_N,
};
pub use spectral::{
    band_energy, circular_law_stats, clamp_spectrum, eigen_summary, eigenspectrum,
    gaussian_baseline, normalize_entries, singular_values, BandEnergy, CircularStats,
    EigenSummary, Normalization,
};
