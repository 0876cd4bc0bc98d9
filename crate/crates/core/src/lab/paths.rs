//! Boltzmann path composition and the transformer contrast.
//!
//! A layered system with `N` states per layer and `L` hops admits `N^L`
//! directed paths. Attaching a Boltzmann weight `e^{−β·S}` to every hop and
//! normalizing per source node turns each hop into a stochastic matrix; the
//! probability of reaching `j` from `i` in `L` hops is then an entry of the
//! product of the hop matrices — the dynamic-programming collapse of the
//! exponential path sum. Trained network layers are *not* of this form, and
//! [`transformer_vs_boltzmann_contrast`] quantifies how far from it they sit.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dump::WeightDump;
use crate::error::{Error, Result};
use crate::fmath;
use crate::mat::{gemm_nn, mean, Mat};

/// Base-10 logarithm of the number of directed paths: `log10(N^L) = L·log10(N)`.
///
/// Returned in log space because the count itself overflows `f64` almost
/// immediately (`N = 1000, L = 100` gives `10^300`). Note the often-quoted
/// figure of `10^30` for that configuration understates the count by a factor
/// of ten in the exponent: `(10³)^(10²) = 10^300`, not `10^30`. This function
/// returns the mathematically correct `300`.
pub fn path_count(n: usize, l: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::config("n", "path counting needs at least one state"));
    }
    Ok(l as f64 * fmath::log10(n as f64))
}

/// Hop matrices and their product.
#[derive(Debug, Clone, PartialEq)]
pub struct BoltzmannComposition {
    /// Row-stochastic transition matrix of each hop.
    pub per_hop: Vec<Mat>,
    /// Product of the hop matrices, in hop order: entry `(i, j)` is the total
    /// probability of all paths from `i` to `j`.
    pub composed: Mat,
}

/// Build per-hop Boltzmann transition matrices from action tables and
/// compose them.
///
/// Hop `l` maps action `S⁽ˡ⁾[i, j]` to probability
/// `P⁽ˡ⁾[i, j] = e^{−β·S⁽ˡ⁾[i,j]} / Σ_k e^{−β·S⁽ˡ⁾[i,k]}` — normalization is
/// per source node `i`. Each row is shifted by its minimum action before
/// exponentiation, which leaves the normalized ratio unchanged but keeps every
/// exponent ≤ 0. At `β = 0` every entry is exactly `1/N` (all exponents are
/// exactly zero). The temperature scale is absorbed into `β`.
pub fn boltzmann_path_composition(actions: &[Mat], beta: f64) -> Result<BoltzmannComposition> {
    if actions.is_empty() {
        return Err(Error::config("actions", "need at least one hop"));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::config("beta", "inverse temperature must be finite and ≥ 0"));
    }
    let n = actions[0].rows();
    for (l, s) in actions.iter().enumerate() {
        if s.rows() != n || s.cols() != n {
            return Err(Error::ShapeMismatch {
                layer: l,
                detail: alloc::format!(
                    "hop {} is {}×{}, expected {n}×{n}",
                    l,
                    s.rows(),
                    s.cols()
                ),
            });
        }
        if !s.all_finite() {
            return Err(Error::DegenerateInput {
                detail: alloc::format!("hop {l} action table contains non-finite entries"),
            });
        }
    }
    let mut per_hop = Vec::with_capacity(actions.len());
    for s in actions {
        let mut p = Mat::zeros(n, n);
        for i in 0..n {
            let row = s.row(i);
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let out = p.row_mut(i);
            let mut z = 0.0;
            for (o, &a) in out.iter_mut().zip(row) {
                let w = fmath::exp(-beta * (a - min));
                *o = w;
                z += w;
            }
            for o in out.iter_mut() {
                *o /= z;
            }
        }
        per_hop.push(p);
    }
    let mut composed = per_hop[0].clone();
    for p in &per_hop[1..] {
        let mut next = Mat::zeros(n, n);
        gemm_nn(&mut next, &composed, p);
        composed = next;
    }
    Ok(BoltzmannComposition { per_hop, composed })
}

/// How one matrix compares to the row-stochastic Boltzmann template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastLayer {
    /// Index of the layer in the network parameter list.
    pub layer_index: usize,
    /// Fraction of strictly negative entries (0 for a stochastic matrix,
    /// ≈ 0.5 for a centered random one).
    pub negative_fraction: f64,
    /// Mean of the row sums (1 for a stochastic matrix).
    pub row_sum_mean: f64,
    /// Population standard deviation of the row sums (0 for stochastic).
    pub row_sum_std: f64,
    /// `max_i |Σ_j m[i,j] − 1|`, the worst-row distance from stochasticity.
    pub max_row_sum_deviation: f64,
}

/// Per-layer contrast records for one dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    /// One record per square hidden weight matrix, in layer order.
    pub layers: Vec<ContrastLayer>,
}

/// Contrast statistics of a single matrix against the stochastic template.
pub fn matrix_contrast(m: &Mat) -> Result<ContrastLayer> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::DegenerateInput {
            detail: String::from("contrast of an empty matrix"),
        });
    }
    if !m.all_finite() {
        return Err(Error::DegenerateInput {
            detail: String::from("contrast subject contains non-finite entries"),
        });
    }
    let total = (m.rows() * m.cols()) as f64;
    let negatives = m.as_slice().iter().filter(|&&v| v < 0.0).count() as f64;
    let row_sums: Vec<f64> = (0..m.rows())
        .map(|i| crate::mat::pairwise_sum(m.row(i)))
        .collect();
    let rs_mean = mean(&row_sums);
    let rs_var = mean(
        &row_sums
            .iter()
            .map(|s| (s - rs_mean) * (s - rs_mean))
            .collect::<Vec<_>>(),
    );
    let max_dev = row_sums
        .iter()
        .map(|s| fmath::abs(s - 1.0))
        .fold(0.0f64, f64::max);
    Ok(ContrastLayer {
        layer_index: 0,
        negative_fraction: negatives / total,
        row_sum_mean: rs_mean,
        row_sum_std: fmath::sqrt(rs_var),
        max_row_sum_deviation: max_dev,
    })
}

/// Contrast every square hidden weight matrix of a dump against the
/// Boltzmann template.
///
/// Trained layers mix signs (negative fraction near ½) and have row sums far
/// from one — direct evidence that a forward pass is not a path-probability
/// flow, however suggestive the layered-composition analogy is.
pub fn transformer_vs_boltzmann_contrast(dump: &WeightDump) -> Result<ContrastReport> {
    dump.validate()?;
    let indices = dump.square_hidden_indices();
    if indices.is_empty() {
        return Err(Error::DegenerateInput {
            detail: String::from("dump has no square hidden layers to contrast"),
        });
    }
    let mut layers = Vec::with_capacity(indices.len());
    for li in indices {
        let mut c = matrix_contrast(&dump.params.layers[li].weights)?;
        c.layer_index = li;
        layers.push(c);
    }
    Ok(ContrastReport { layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, SeedStream};
    use alloc::vec;

    fn random_actions(n: usize, hops: usize, seed: u64) -> Vec<Mat> {
        let mut rng = SeedStream::new(seed, Purpose::Auxiliary);
        (0..hops)
            .map(|_| Mat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 2.0)))
            .collect()
    }

    #[test]
    fn path_count_hand_values() {
        assert_eq!(path_count(1000, 100).unwrap(), 300.0);
        assert_eq!(path_count(1, 7).unwrap(), 0.0);
        assert_eq!(path_count(10, 0).unwrap(), 0.0);
        let nine = path_count(3, 2).unwrap();
        assert!((nine - fmath::log10(9.0)).abs() < 1e-12);
        assert!(path_count(0, 3).is_err());
    }

    #[test]
    fn composition_matches_brute_force_enumeration() {
        // N = 3 states, L = 2 hops: sum the 3 explicit paths behind each of
        // the 9 (start, end) pairs and compare with the matrix product.
        let actions = random_actions(3, 2, 41);
        let comp = boltzmann_path_composition(&actions, 1.3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut total = 0.0;
                for k in 0..3 {
                    total += comp.per_hop[0].row(i)[k] * comp.per_hop[1].row(k)[j];
                }
                let got = comp.composed.row(i)[j];
                assert!(
                    (total - got).abs() < 1e-12,
                    "path sum {total} vs composed {got} at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn deeper_composition_matches_recursive_enumeration() {
        // N = 4, L = 3: 16 intermediate paths per endpoint pair.
        let actions = random_actions(4, 3, 42);
        let comp = boltzmann_path_composition(&actions, 0.7).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut total = 0.0;
                for k1 in 0..4 {
                    for k2 in 0..4 {
                        total += comp.per_hop[0].row(i)[k1]
                            * comp.per_hop[1].row(k1)[k2]
                            * comp.per_hop[2].row(k2)[j];
                    }
                }
                assert!((total - comp.composed.row(i)[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn beta_zero_is_exactly_uniform() {
        let actions = random_actions(5, 2, 43);
        let comp = boltzmann_path_composition(&actions, 0.0).unwrap();
        for p in &comp.per_hop {
            for &v in p.as_slice() {
                assert_eq!(v, 1.0 / 5.0);
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let actions = random_actions(7, 4, 44);
        let comp = boltzmann_path_composition(&actions, 2.5).unwrap();
        for m in comp.per_hop.iter().chain(core::iter::once(&comp.composed)) {
            for i in 0..7 {
                let s = crate::mat::pairwise_sum(m.row(i));
                assert!((s - 1.0).abs() < 1e-12, "row {i} sums to {s}");
            }
        }
    }

    #[test]
    fn single_hop_composes_to_itself() {
        let actions = random_actions(4, 1, 45);
        let comp = boltzmann_path_composition(&actions, 1.0).unwrap();
        assert_eq!(comp.per_hop.len(), 1);
        assert_eq!(comp.per_hop[0], comp.composed);
    }

    #[test]
    fn composition_is_associative() {
        let actions = random_actions(6, 3, 46);
        let abc = boltzmann_path_composition(&actions, 0.9).unwrap();
        let ab = boltzmann_path_composition(&actions[..2], 0.9).unwrap();
        let c = boltzmann_path_composition(&actions[2..], 0.9).unwrap();
        let mut left_then_c = Mat::zeros(6, 6);
        gemm_nn(&mut left_then_c, &ab.composed, &c.composed);
        let bc = boltzmann_path_composition(&actions[1..], 0.9).unwrap();
        let a = boltzmann_path_composition(&actions[..1], 0.9).unwrap();
        let mut a_then_right = Mat::zeros(6, 6);
        gemm_nn(&mut a_then_right, &a.composed, &bc.composed);
        for ((x, y), z) in abc
            .composed
            .as_slice()
            .iter()
            .zip(left_then_c.as_slice())
            .zip(a_then_right.as_slice())
        {
            assert!((x - y).abs() < 1e-12);
            assert!((x - z).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_actions_stay_stable() {
        // Row shift keeps huge action scales from overflowing the exponent.
        let s = Mat::from_fn(3, 3, |i, j| 1e4 * (i as f64 - j as f64));
        let comp = boltzmann_path_composition(&[s], 1.0).unwrap();
        assert!(comp.composed.all_finite());
        for i in 0..3 {
            let sum = crate::mat::pairwise_sum(comp.composed.row(i));
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn contrast_of_stochastic_matrix() {
        let actions = random_actions(8, 1, 47);
        let comp = boltzmann_path_composition(&actions, 1.0).unwrap();
        let c = matrix_contrast(&comp.composed).unwrap();
        assert_eq!(c.negative_fraction, 0.0);
        assert!((c.row_sum_mean - 1.0).abs() < 1e-12);
        assert!(c.row_sum_std < 1e-12);
        assert!(c.max_row_sum_deviation < 1e-12);
    }

    #[test]
    fn contrast_of_centered_gaussian_matrix() {
        let mut rng = SeedStream::new(48, Purpose::Auxiliary);
        let m = Mat::from_fn(100, 100, |_, _| rng.standard_normal());
        let c = matrix_contrast(&m).unwrap();
        assert!(
            (c.negative_fraction - 0.5).abs() < 0.02,
            "negative fraction {}",
            c.negative_fraction
        );
        // Row sums are ~N(0, 10): nowhere near stochastic.
        assert!(c.max_row_sum_deviation > 1.0);
    }

    #[test]
    fn contrast_report_covers_square_hidden_layers() {
        use crate::pinn::{train, NullClock, PinnConfig};
        let mut config = PinnConfig::reference(9);
        config.hidden_layers = 3;
        config.width = 10;
        config.n_interior = 16;
        config.n_initial = 8;
        config.n_boundary = 8;
        config.optimizer.steps = 2;
        config.optimizer.batch = 16;
        let outcome = train(&config, &NullClock).unwrap();
        let dump = WeightDump::from_outcome(&config, &outcome);
        let report = transformer_vs_boltzmann_contrast(&dump).unwrap();
        assert_eq!(report.layers.len(), 2);
        assert_eq!(
            report.layers.iter().map(|l| l.layer_index).collect::<Vec<_>>(),
            vec![1, 2]
        );
        for l in &report.layers {
            assert!(l.negative_fraction > 0.2 && l.negative_fraction < 0.8);
            assert!(l.max_row_sum_deviation > 1e-3);
        }
    }
}
