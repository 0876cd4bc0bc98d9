//! Random-matrix diagnostics: eigenspectra against the circular law,
//! singular values against a moment-matched Gaussian baseline, and
//! band-energy structure measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fmath;
use crate::mat::{mean, pairwise_map_sum, Mat};
use crate::rng::{Purpose, SeedStream};

/// Iteration cap for the Schur/SVD solvers; generous for the ≤ a-few-hundred
/// dimensional matrices this pipeline sees.
const EIGEN_MAX_ITER: usize = 50_000;

fn to_na(m: &Mat) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn fingerprint(m: &Mat) -> String {
    let frob = fmath::sqrt(m.frob_sq());
    let mut trace = 0.0;
    let n = m.rows().min(m.cols());
    for i in 0..n {
        trace += m.get(i, i);
    }
    format!(
        "{}x{} matrix, frobenius {:.6e}, trace {:.6e}",
        m.rows(), m.cols(), frob, trace
    )
}

fn require_square(m: &Mat, what: &str) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: format!("{what} needs a non-empty square matrix, got {}x{}", m.rows(), m.cols()),
        });
    }
    if !m.all_finite() {
        return Err(Error::DegenerateInput {
            detail: format!("{what} input contains non-finite entries"),
        });
    }
    Ok(())
}

/// Complex eigenvalues of a square real matrix, sorted by descending modulus
/// (ties broken by real part, then imaginary part). Conjugate pairs arrive
/// together by construction of the real Schur form.
pub fn eigenspectrum(m: &Mat) -> Result<Vec<(f64, f64)>> {
    require_square(m, "eigenspectrum")?;
    let schur = nalgebra::linalg::Schur::try_new(to_na(m), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical {
            detail: format!("eigenvalue iteration failed to converge: {}", fingerprint(m)),
        })?;
    let ev = schur.complex_eigenvalues();
    let mut out: Vec<(f64, f64)> = ev.iter().map(|c| (c.re, c.im)).collect();
    out.sort_by(|a, b| {
        let ma = fmath::hypot(a.0, a.1);
        let mb = fmath::hypot(b.0, b.1);
        mb.partial_cmp(&ma)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal))
            .then(b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// Singular values of a matrix, descending.
pub fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::DegenerateInput {
            detail: String::from("singular values of an empty matrix"),
        });
    }
    if !m.all_finite() {
        return Err(Error::DegenerateInput {
            detail: String::from("singular values of a non-finite matrix"),
        });
    }
    let svd = nalgebra::linalg::SVD::try_new(to_na(m), false, false, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical {
            detail: format!("SVD failed to converge: {}", fingerprint(m)),
        })?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(sv)
}

/// Relative tolerance inside which a singular value counts as already at or
/// below the clamp cap. Snapping makes [`clamp_spectrum`] exactly
/// idempotent: reconstruction rounding leaves the top value within this band
/// of the cap, so a second application returns its input bit for bit.
const CLAMP_SNAP_REL: f64 = 1e-12;

/// Rebuild `m` with its singular values clamped to `cap` (`σ → min(σ, cap)`).
///
/// The nearest matrix (in Frobenius and spectral norm) whose operator norm
/// does not exceed `cap (1 + 1e-12)`. Returns `m` unchanged — bit for bit —
/// when no singular value exceeds the cap by more than the snap band, so
/// repeated application is exactly idempotent.
pub fn clamp_spectrum(m: &Mat, cap: f64) -> Result<Mat> {
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::config(
            "cap",
            "singular-value cap must be positive and finite",
        ));
    }
    if !m.all_finite() {
        return Err(Error::DegenerateInput {
            detail: String::from("spectral clamp of a non-finite matrix"),
        });
    }
    let svd = nalgebra::linalg::SVD::try_new(to_na(m), true, true, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical {
            detail: format!("SVD failed to converge: {}", fingerprint(m)),
        })?;
    if svd
        .singular_values
        .iter()
        .all(|&s| s <= cap * (1.0 + CLAMP_SNAP_REL))
    {
        return Ok(m.clone());
    }
    let mut svd = svd;
    for s in svd.singular_values.iter_mut() {
        if *s > cap {
            *s = cap;
        }
    }
    let rec = svd.recompose().map_err(|e| Error::Numerical {
        detail: format!("SVD recomposition failed: {e}"),
    })?;
    Ok(Mat::from_fn(m.rows(), m.cols(), |i, j| rec[(i, j)]))
}

/// Seeded i.i.d. Gaussian matrix — the null model the paper compares trained
/// layers against. Moment-matched when `mean`/`std` are taken from a subject
/// matrix.
pub fn gaussian_baseline(rows: usize, cols: usize, mean: f64, std: f64, seed: u64) -> Result<Mat> {
    if !(std > 0.0) {
        return Err(Error::config("std", "baseline std must be > 0"));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::config("shape", "baseline matrix must be non-empty"));
    }
    let mut stream = SeedStream::new(seed, Purpose::Baseline);
    let mut m = Mat::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = mean + std * stream.standard_normal();
    }
    Ok(m)
}

/// Normalization convention for spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Entry standardization `(W − mean)/(std·√N)` — the convention under
    /// which the circular law has unit radius.
    EntryStd,
}

/// Standardize matrix entries: `(W − mean)/(std·√N)` with N the dimension.
pub fn normalize_entries(m: &Mat) -> Result<Mat> {
    require_square(m, "normalization")?;
    let mu = mean(m.as_slice());
    let var = pairwise_map_sum(m.as_slice(), |x| {
        let d = x - mu;
        d * d
    }) / (m.rows() * m.cols()) as f64;
    if var == 0.0 {
        return Err(Error::DegenerateInput {
            detail: String::from("cannot normalize a constant matrix"),
        });
    }
    let scale = 1.0 / (fmath::sqrt(var) * fmath::sqrt(m.rows() as f64));
    let mut out = m.clone();
    for v in out.as_mut_slice() {
        *v = (*v - mu) * scale;
    }
    Ok(out)
}

/// Per-layer circular-law diagnostics over a set of equally sized square
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularStats {
    /// Per-layer 0.99-quantile of |λ| after normalization.
    pub radii: Vec<f64>,
    /// Mean of `radii`.
    pub mean_radius: f64,
    /// `max_l |radius_l − mean| / mean`.
    pub radius_rel_spread: f64,
    /// Per-layer count of eigenvalues with |λ| > 1.05·radius.
    pub outliers: Vec<usize>,
    /// Per-layer fraction of eigenvalues with |λ| ≤ 1.1·radius.
    pub within_margin: Vec<f64>,
}

/// Robust spectral radius: the 0.99-quantile of eigenvalue moduli (the paper
/// notes "a few outliers", so the max would be fragile).
pub fn radius_q99(moduli_sorted_ascending: &[f64]) -> f64 {
    let n = moduli_sorted_ascending.len();
    let idx = (fmath::ceil(0.99 * n as f64) as usize).max(1) - 1;
    moduli_sorted_ascending[idx.min(n - 1)]
}

/// Eigen-side diagnostics of one normalized layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSummary {
    /// Eigenvalues of the entry-standardized matrix, sorted by descending
    /// modulus.
    pub eigenvalues: Vec<(f64, f64)>,
    /// 0.99-quantile of the moduli.
    pub radius_q99: f64,
    /// Count of eigenvalues with modulus > 1.05·radius.
    pub outliers: usize,
    /// Fraction of eigenvalues with modulus ≤ 1.1·radius.
    pub within_margin: f64,
}

/// Normalize one square layer and summarize its eigenspectrum against the
/// circular-law expectations.
pub fn eigen_summary(m: &Mat) -> Result<EigenSummary> {
    let normed = normalize_entries(m)?;
    let eigenvalues = eigenspectrum(&normed)?;
    let mut moduli: Vec<f64> = eigenvalues
        .iter()
        .map(|&(re, im)| fmath::hypot(re, im))
        .collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let radius = radius_q99(&moduli);
    Ok(EigenSummary {
        outliers: moduli.iter().filter(|&&v| v > 1.05 * radius).count(),
        within_margin: moduli.iter().filter(|&&v| v <= 1.1 * radius).count() as f64
            / moduli.len() as f64,
        radius_q99: radius,
        eigenvalues,
    })
}

/// Circular-law statistics for ≥ 2 square layers of equal dimension.
pub fn circular_law_stats(mats: &[&Mat], _norm: Normalization) -> Result<CircularStats> {
    if mats.len() < 2 {
        return Err(Error::DegenerateInput {
            detail: String::from("circular-law statistics need at least 2 layers"),
        });
    }
    let dim = mats[0].rows();
    for (i, m) in mats.iter().enumerate() {
        if !m.is_square() || m.rows() != dim {
            return Err(Error::ShapeMismatch {
                layer: i,
                detail: format!(
                    "circular-law layers must share a square dimension; layer {i} is {}x{}, expected {dim}x{dim}",
                    m.rows(), m.cols()
                ),
            });
        }
    }
    let mut radii = Vec::with_capacity(mats.len());
    let mut outliers = Vec::with_capacity(mats.len());
    let mut within = Vec::with_capacity(mats.len());
    for m in mats {
        let s = eigen_summary(m)?;
        radii.push(s.radius_q99);
        outliers.push(s.outliers);
        within.push(s.within_margin);
    }
    let mean_radius = mean(&radii);
    let radius_rel_spread = radii
        .iter()
        .map(|r| fmath::abs(r - mean_radius))
        .fold(0.0f64, f64::max)
        / mean_radius;
    Ok(CircularStats {
        radii,
        mean_radius,
        radius_rel_spread,
        outliers,
        within_margin: within,
    })
}

/// Band-energy ratio at halfwidth `k`, reported both for the plain band
/// `|i−j| ≤ k` and for the periodic minimal-image distance
/// `min(|i−j|, n−|i−j|) ≤ k` (discretized periodic kernels concentrate on
/// the latter).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BandEnergy {
    /// Halfwidth the ratio was computed at.
    pub halfwidth: usize,
    /// Plain band `|i−j| ≤ k`.
    pub plain: f64,
    /// Periodic minimal-image band.
    pub wrapped: f64,
}

/// Fraction of squared Frobenius mass within the diagonal band of
/// halfwidth `k` (`0 ≤ k < n`).
pub fn band_energy(m: &Mat, k: usize) -> Result<BandEnergy> {
    require_square(m, "band energy")?;
    let n = m.rows();
    if k >= n {
        return Err(Error::config("halfwidth", "band halfwidth must satisfy k < n"));
    }
    let total = m.frob_sq();
    if total == 0.0 {
        return Err(Error::DegenerateInput {
            detail: String::from("band energy of an all-zero matrix"),
        });
    }
    let mut plain = 0.0;
    let mut wrapped = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i.abs_diff(j);
            let w = m.get(i, j) * m.get(i, j);
            if d <= k {
                plain += w;
            }
            if d.min(n - d) <= k {
                wrapped += w;
            }
        }
    }
    Ok(BandEnergy {
        halfwidth: k,
        plain: plain / total,
        wrapped: wrapped / total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn seeded_gaussian(n: usize, std: f64, seed: u64) -> Mat {
        gaussian_baseline(n, n, 0.0, std, seed).unwrap()
    }

    #[test]
    fn identity_eigenvalues_are_ones() {
        let m = Mat::from_fn(5, 5, |i, j| if i == j { 1.0 } else { 0.0 });
        let ev = eigenspectrum(&m).unwrap();
        assert_eq!(ev.len(), 5);
        for (re, im) in ev {
            assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_eigenvalues_are_plus_minus_i() {
        let m = Mat::from_vec(2, 2, vec![0.0, -1.0, 1.0, 0.0]);
        let ev = eigenspectrum(&m).unwrap();
        assert!(ev[0].0.abs() < 1e-12 && (ev[0].1 - 1.0).abs() < 1e-12);
        assert!(ev[1].0.abs() < 1e-12 && (ev[1].1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_sum_matches_trace_and_pairs_conjugate() {
        let m = seeded_gaussian(40, 0.3, 21);
        let ev = eigenspectrum(&m).unwrap();
        let trace: f64 = (0..40).map(|i| m.get(i, i)).sum();
        let sum_re: f64 = ev.iter().map(|e| e.0).sum();
        let sum_im: f64 = ev.iter().map(|e| e.1).sum();
        assert!((sum_re - trace).abs() <= 1e-8 * trace.abs().max(1.0));
        assert!(sum_im.abs() < 1e-9);
        // Every complex eigenvalue has its conjugate present.
        for &(re, im) in &ev {
            if im.abs() > 1e-12 {
                assert!(
                    ev.iter()
                        .any(|&(r2, i2)| (r2 - re).abs() < 1e-9 && (i2 + im).abs() < 1e-9),
                    "missing conjugate of ({re}, {im})"
                );
            }
        }
    }

    #[test]
    fn eigenvalue_product_matches_determinant() {
        let m = seeded_gaussian(6, 1.0, 5);
        let det = to_na(&m).determinant();
        let ev = eigenspectrum(&m).unwrap();
        let (mut pre, mut pim) = (1.0f64, 0.0f64);
        for (re, im) in ev {
            let (nre, nim) = (pre * re - pim * im, pre * im + pim * re);
            pre = nre;
            pim = nim;
        }
        assert!(pim.abs() < 1e-8 * det.abs().max(1.0));
        assert!((pre - det).abs() < 1e-8 * det.abs().max(1.0), "{pre} vs {det}");
    }

    #[test]
    fn circular_law_radius_near_one() {
        // i.i.d. N(0, 1/n) entries: spectral radius → 1. Average over seeds.
        let n = 200;
        let mut mean_max = 0.0;
        for seed in 0..10 {
            let m = seeded_gaussian(n, 1.0 / (n as f64).sqrt(), 100 + seed);
            let ev = eigenspectrum(&m).unwrap();
            let max = ev
                .iter()
                .map(|&(re, im)| fmath::hypot(re, im))
                .fold(0.0f64, f64::max);
            mean_max += max / 10.0;
        }
        assert!((mean_max - 1.0).abs() < 0.1, "mean spectral radius {mean_max}");
    }

    #[test]
    fn singular_values_hand_cases() {
        let id = Mat::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 });
        for v in singular_values(&id).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let d = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                [3.0, 2.0, 1.0][i]
            } else {
                0.0
            }
        });
        let sv = singular_values(&d).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!((sv[1] - 2.0).abs() < 1e-12);
        assert!((sv[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_square_sigma_max_near_marchenko_pastur_edge() {
        // 100×100, entry std 1/√100 = 0.1: σ_max ≈ 2·std·√n = 2.
        let m = seeded_gaussian(100, 0.1, 77);
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 2.0).abs() < 0.15, "sigma_max {}", sv[0]);
    }

    #[test]
    fn singular_values_preserve_frobenius_and_permutation() {
        let m = seeded_gaussian(30, 0.5, 3);
        let sv = singular_values(&m).unwrap();
        let frob_sv: f64 = sv.iter().map(|v| v * v).sum();
        assert!((frob_sv - m.frob_sq()).abs() <= 1e-10 * m.frob_sq());
        // Swap two rows: singular values unchanged.
        let mut swapped = m.clone();
        for j in 0..30 {
            let a = swapped.get(0, j);
            let b = swapped.get(7, j);
            swapped.set(0, j, b);
            swapped.set(7, j, a);
        }
        let sv2 = singular_values(&swapped).unwrap();
        for (a, b) in sv.iter().zip(&sv2) {
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn baseline_is_seeded_and_moment_matched() {
        let a = gaussian_baseline(100, 100, 0.02, 0.1, 9).unwrap();
        let b = gaussian_baseline(100, 100, 0.02, 0.1, 9).unwrap();
        assert_eq!(a, b);
        let c = gaussian_baseline(100, 100, 0.02, 0.1, 10).unwrap();
        assert_ne!(a, c);
        let mu = mean(a.as_slice());
        let sd = fmath::sqrt(
            pairwise_map_sum(a.as_slice(), |x| (x - mu) * (x - mu)) / 10_000.0,
        );
        assert!((mu - 0.02).abs() < 0.005);
        assert!(sd > 0.095 && sd < 0.105, "std {sd}");
        assert!(gaussian_baseline(10, 10, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn circular_stats_identical_layers_have_zero_spread() {
        let m = seeded_gaussian(50, 0.2, 31);
        let stats = circular_law_stats(&[&m, &m, &m], Normalization::EntryStd).unwrap();
        assert_eq!(stats.radius_rel_spread, 0.0);
        assert_eq!(stats.radii.len(), 3);
    }

    #[test]
    fn circular_stats_gaussian_layers_spread_below_five_percent() {
        let mats: Vec<Mat> = (0..6).map(|s| seeded_gaussian(100, 0.1, 200 + s)).collect();
        let refs: Vec<&Mat> = mats.iter().collect();
        let stats = circular_law_stats(&refs, Normalization::EntryStd).unwrap();
        assert!(stats.radius_rel_spread < 0.05, "spread {}", stats.radius_rel_spread);
        assert!((stats.mean_radius - 1.0).abs() < 0.1);
        for w in stats.within_margin {
            assert!(w >= 0.95);
        }
    }

    #[test]
    fn circular_stats_rejects_mismatch() {
        let a = seeded_gaussian(20, 0.1, 1);
        let b = seeded_gaussian(30, 0.1, 2);
        assert!(circular_law_stats(&[&a, &b], Normalization::EntryStd).is_err());
        assert!(circular_law_stats(&[&a], Normalization::EntryStd).is_err());
    }

    #[test]
    fn band_energy_hand_cases() {
        let id = Mat::from_fn(6, 6, |i, j| if i == j { 1.0 } else { 0.0 });
        let be = band_energy(&id, 0).unwrap();
        assert_eq!(be.plain, 1.0);
        assert_eq!(be.wrapped, 1.0);
        let ones = Mat::from_fn(4, 4, |_, _| 1.0);
        let be0 = band_energy(&ones, 0).unwrap();
        assert!((be0.plain - 0.25).abs() < 1e-15);
        // Tridiagonal at k=0: wrap distance equals plain distance for n=4, d=1.
        let tri = Mat::from_fn(8, 8, |i, j| {
            if i.abs_diff(j) <= 1 {
                1.0
            } else {
                0.0
            }
        });
        let be1 = band_energy(&tri, 1).unwrap();
        assert_eq!(be1.plain, 1.0);
        assert_eq!(be1.wrapped, 1.0);
    }

    #[test]
    fn band_energy_monotone_and_full_at_n_minus_one() {
        let m = seeded_gaussian(32, 1.0, 8);
        let mut prev_plain = 0.0;
        let mut prev_wrapped = 0.0;
        for k in 0..32 {
            let be = band_energy(&m, k).unwrap();
            assert!(be.plain >= prev_plain - 1e-15);
            assert!(be.wrapped >= prev_wrapped - 1e-15);
            prev_plain = be.plain;
            prev_wrapped = be.wrapped;
        }
        let full = band_energy(&m, 31).unwrap();
        assert!((full.plain - 1.0).abs() < 1e-12);
        assert!((full.wrapped - 1.0).abs() < 1e-12);
        assert!(band_energy(&m, 32).is_err());
    }

    #[test]
    fn wrapped_band_catches_periodic_corners() {
        // A circulant-like kernel supported on minimal-image distance ≤ 2.
        let n = 16;
        let m = Mat::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            if d.min(n - d) <= 2 {
                1.0
            } else {
                0.0
            }
        });
        let be = band_energy(&m, 2).unwrap();
        assert_eq!(be.wrapped, 1.0);
        assert!(be.plain < 1.0, "plain band must miss the corner mass");
    }

    #[test]
    fn normalize_entries_standardizes() {
        let m = seeded_gaussian(64, 0.37, 55);
        let n = normalize_entries(&m).unwrap();
        let mu = mean(n.as_slice());
        let var = pairwise_map_sum(n.as_slice(), |x| (x - mu) * (x - mu)) / 4096.0;
        assert!(mu.abs() < 1e-12);
        // Entry variance should be 1/64 after dividing by std·√n.
        assert!((var - 1.0 / 64.0).abs() < 1e-12);
        let constant = Mat::from_fn(4, 4, |_, _| 2.0);
        assert!(normalize_entries(&constant).is_err());
    }

    #[test]
    fn clamp_spectrum_caps_and_is_idempotent() {
        let m = seeded_gaussian(40, 0.4, 77); // σ_max ≈ 0.4·2·√40 ≈ 5
        let before = singular_values(&m).unwrap();
        assert!(before[0] > 1.5);
        let clamped = clamp_spectrum(&m, 0.9).unwrap();
        let after = singular_values(&clamped).unwrap();
        assert!(after[0] <= 0.9 + 1e-9, "σ_max {} after clamp", after[0]);
        // Sub-cap singular values survive unchanged.
        for (a, b) in before.iter().zip(&after) {
            if *b < 0.9 - 1e-9 {
                assert!((a - b).abs() < 1e-9, "sub-cap σ moved: {a} vs {b}");
            }
        }
        // Second application returns its input bit for bit.
        let twice = clamp_spectrum(&clamped, 0.9).unwrap();
        assert_eq!(clamped, twice);
    }

    #[test]
    fn clamp_spectrum_no_op_below_cap() {
        let m = seeded_gaussian(12, 0.01, 78);
        let clamped = clamp_spectrum(&m, 10.0).unwrap();
        assert_eq!(m, clamped);
        assert!(clamp_spectrum(&m, 0.0).is_err());
        assert!(clamp_spectrum(&m, f64::INFINITY).is_err());
    }
}
