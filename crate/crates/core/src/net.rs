//! Network parameters and plain forward evaluation.
//!
//! Convention (followed exactly throughout the crate): each layer computes
//! `z_{l+1} = f(W_l z_l − b_l)` — the bias is *subtracted*. Hidden layers
//! apply the configured activation; the final layer is linear (identity), so
//! the scalar PINN output is an unbounded affine readout of the last hidden
//! state. Dumped biases therefore carry the opposite sign relative to the
//! common `W z + b` convention; consumers are warned in the format docs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmath;
use crate::mat::Mat;
use crate::rng::{Purpose, SeedStream};

/// Elementwise nonlinearity applied by hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// Hyperbolic tangent (the paper's experiment uses this).
    Tanh,
    /// Rectified linear unit. Supported for plain forward evaluation only;
    /// input-derivative propagation rejects it (no second derivative).
    Relu,
    /// Identity (linear layer).
    Identity,
}

impl Activation {
    /// Apply the nonlinearity to a pre-activation value.
    #[inline(always)]
    pub fn apply(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => fmath::tanh(a),
            Activation::Relu => {
                if a > 0.0 {
                    a
                } else {
                    0.0
                }
            }
            Activation::Identity => a,
        }
    }

    /// Canonical lowercase name (used by configs and dump headers).
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }

    /// Parse a canonical name.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::config(
                "activation",
                format!("unknown activation `{other}` (expected tanh|relu|identity)"),
            )),
        }
    }
}

/// One affine layer: weights `out×in` and a bias of length `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// Weight matrix, `out × in`, row-major.
    pub weights: Mat,
    /// Bias vector of length `out` (subtracted: `W z − b`).
    pub bias: Vec<f64>,
}

impl Layer {
    /// Output dimension.
    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Input dimension.
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }
}

/// Ordered layers plus the hidden activation: the object under both training
/// and forensic study.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Layers in evaluation order.
    pub layers: Vec<Layer>,
    /// Activation applied by every layer except the last (which is linear).
    pub activation: Activation,
}

impl NetworkParams {
    /// Seeded initialization: weights i.i.d. normal with variance `1/fan_in`
    /// ("Xavier-like"), biases zero. `dims` lists layer widths including
    /// input and output, e.g. `[2, 100, …, 100, 1]`.
    pub fn init(dims: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::config(
                "dims",
                "need at least input and output dimensions",
            ));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::config("dims", "zero layer width"));
        }
        let mut stream = SeedStream::new(seed, Purpose::WeightInit);
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let std = fmath::sqrt(1.0 / fan_in as f64);
            let mut data = Vec::with_capacity(fan_out * fan_in);
            for _ in 0..fan_out * fan_in {
                data.push(std * stream.standard_normal());
            }
            layers.push(Layer {
                weights: Mat::from_vec(fan_out, fan_in, data),
                bias: vec![0.0; fan_out],
            });
        }
        Ok(NetworkParams { layers, activation })
    }

    /// Network input dimension.
    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Layer::in_dim)
    }

    /// Network output dimension.
    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Layer::out_dim)
    }

    /// Total number of scalar parameters (weights + biases).
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.rows() * l.weights.cols() + l.bias.len())
            .sum()
    }

    /// Indices of the square hidden-to-hidden weight matrices — the forensic
    /// subjects. Excludes the input-facing and output-facing edge matrices
    /// even when square, matching the convention that the analysis targets
    /// the `width × width` interior of the chain.
    pub fn square_hidden_indices(&self) -> Vec<usize> {
        let last = self.layers.len().saturating_sub(1);
        self.layers
            .iter()
            .enumerate()
            .filter(|(i, l)| *i > 0 && *i < last && l.weights.is_square())
            .map(|(i, _)| i)
            .collect()
    }

    /// Validate shape chaining, bias lengths and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("layers", "network has no layers"));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.bias.len() != l.out_dim() {
                return Err(Error::ShapeMismatch {
                    layer: i,
                    detail: format!(
                        "bias length {} != weight out-dimension {}",
                        l.bias.len(),
                        l.out_dim()
                    ),
                });
            }
            if i + 1 < self.layers.len() {
                let next_in = self.layers[i + 1].in_dim();
                if next_in != l.out_dim() {
                    return Err(Error::ShapeMismatch {
                        layer: i + 1,
                        detail: format!(
                            "in-dimension {} does not chain with previous out-dimension {}",
                            next_in,
                            l.out_dim()
                        ),
                    });
                }
            }
            if !l.weights.all_finite() || l.bias.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { layer: i });
            }
        }
        Ok(())
    }

    /// Plain forward pass `z_{l+1} = f(W_l z_l − b_l)`, final layer linear.
    ///
    /// Returns the output vector; reports the offending layer on shape
    /// mismatch or non-finite intermediates.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if input.len() != self.input_dim() {
            return Err(Error::ShapeMismatch {
                layer: 0,
                detail: format!(
                    "input length {} != network input dimension {}",
                    input.len(),
                    self.input_dim()
                ),
            });
        }
        let last = self.layers.len() - 1;
        let mut z: Vec<f64> = input.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next = Vec::with_capacity(layer.out_dim());
            for m in 0..layer.out_dim() {
                let a = crate::mat::dot(layer.weights.row(m), &z) - layer.bias[m];
                next.push(if i == last {
                    a
                } else {
                    self.activation.apply(a)
                });
            }
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { layer: i });
            }
            z = next;
        }
        Ok(z)
    }
}

/// Relative tolerance inside which a vector is considered already normalized.
///
/// Snapping makes the operation exactly idempotent: the first application
/// lands within this band of the target, so a second application returns its
/// input unchanged, bit for bit.
const NORM_SNAP_REL: f64 = 1e-12;

/// Rescale `z` to the given L2 norm, preserving direction (Eq. NORM).
///
/// Not applied during PINN training (the paper's PINN description omits it);
/// exposed for the relaxation experiments in [`crate::lab`].
pub fn normalize_layer(z: &[f64], target_norm: f64) -> Result<Vec<f64>> {
    if target_norm <= 0.0 || !target_norm.is_finite() {
        return Err(Error::DegenerateInput {
            detail: String::from("target norm must be positive and finite"),
        });
    }
    let norm = fmath::sqrt(crate::mat::pairwise_map_sum(z, |v| v * v));
    if norm == 0.0 {
        return Err(Error::DegenerateInput {
            detail: String::from("cannot normalize the zero vector"),
        });
    }
    if fmath::abs(norm - target_norm) <= NORM_SNAP_REL * target_norm {
        return Ok(z.to_vec());
    }
    let s = target_norm / norm;
    Ok(z.iter().map(|v| v * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(dims: &[usize], seed: u64) -> NetworkParams {
        NetworkParams::init(dims, Activation::Tanh, seed).unwrap()
    }

    #[test]
    fn init_shapes_and_scale() {
        let p = seeded(&[2, 100, 100, 1], 7);
        assert_eq!(p.layers.len(), 3);
        assert_eq!(p.layers[0].weights.rows(), 100);
        assert_eq!(p.layers[0].weights.cols(), 2);
        assert_eq!(p.layers[2].weights.rows(), 1);
        assert!(p.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
        // Variance of the 100×100 layer should be close to 1/100.
        let w = p.layers[1].weights.as_slice();
        let var = crate::mat::pairwise_map_sum(w, |x| x * x) / w.len() as f64;
        assert!((var - 0.01).abs() < 0.001, "var {var}");
    }

    #[test]
    fn init_is_deterministic() {
        assert_eq!(seeded(&[2, 8, 1], 3), seeded(&[2, 8, 1], 3));
        assert_ne!(seeded(&[2, 8, 1], 3), seeded(&[2, 8, 1], 4));
    }

    #[test]
    fn forward_zero_net_is_zero() {
        let mut p = seeded(&[3, 5, 2], 1);
        for l in &mut p.layers {
            l.weights.fill_zero();
            l.bias.iter_mut().for_each(|b| *b = 0.0);
        }
        assert_eq!(p.forward(&[0.4, -0.2, 0.9]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn forward_1_1_1_hand_value() {
        // Hidden W=[1], b=[0] (tanh); output W=[1], b=[0] (identity).
        let p = NetworkParams {
            layers: vec![
                Layer {
                    weights: Mat::from_vec(1, 1, vec![1.0]),
                    bias: vec![0.0],
                },
                Layer {
                    weights: Mat::from_vec(1, 1, vec![1.0]),
                    bias: vec![0.0],
                },
            ],
            activation: Activation::Tanh,
        };
        let y = p.forward(&[0.5]).unwrap();
        assert!((y[0] - fmath::tanh(0.5)).abs() < 1e-15);
    }

    #[test]
    fn bias_is_subtracted() {
        // Single (final, linear) layer: y = W x − b.
        let p = NetworkParams {
            layers: vec![Layer {
                weights: Mat::from_vec(1, 1, vec![2.0]),
                bias: vec![0.75],
            }],
            activation: Activation::Tanh,
        };
        let y = p.forward(&[1.0]).unwrap();
        assert!((y[0] - (2.0 - 0.75)).abs() < 1e-15);
    }

    #[test]
    fn forward_matches_straightline_reference() {
        // Independent straight-line re-implementation of the chain for a
        // seeded 2-16-1 net.
        let p = seeded(&[2, 16, 1], 99);
        let input = [0.3, 0.7];
        let mut hidden = [0.0f64; 16];
        for m in 0..16 {
            let w = p.layers[0].weights.row(m);
            hidden[m] = fmath::tanh(w[0] * input[0] + w[1] * input[1] - p.layers[0].bias[m]);
        }
        let mut out = -p.layers[1].bias[0];
        for m in 0..16 {
            out += p.layers[1].weights.row(0)[m] * hidden[m];
        }
        let y = p.forward(&input).unwrap();
        assert!((y[0] - out).abs() < 1e-14);
    }

    #[test]
    fn final_layer_scaling_is_homogeneous() {
        let p = seeded(&[2, 8, 1], 5);
        let y1 = p.forward(&[0.2, 0.6]).unwrap()[0];
        let mut p2 = p.clone();
        p2.layers.last_mut().unwrap().weights.scale(3.0);
        p2.layers.last_mut().unwrap().bias[0] *= 3.0;
        let y2 = p2.forward(&[0.2, 0.6]).unwrap()[0];
        assert!((y2 - 3.0 * y1).abs() < 1e-12);
    }

    #[test]
    fn shape_errors_name_the_layer() {
        let mut p = seeded(&[2, 8, 8, 1], 1);
        p.layers[1].bias.pop();
        match p.validate() {
            Err(Error::ShapeMismatch { layer, .. }) => assert_eq!(layer, 1),
            other => panic!("expected shape mismatch, got {other:?}"),
        }
        let p = seeded(&[2, 8, 1], 1);
        assert!(matches!(
            p.forward(&[1.0]),
            Err(Error::ShapeMismatch { layer: 0, .. })
        ));
    }

    #[test]
    fn nonfinite_is_reported_with_layer() {
        let mut p = seeded(&[2, 4, 1], 1);
        p.layers[1].weights.set(0, 0, f64::INFINITY);
        assert!(matches!(
            p.forward(&[0.1, 0.1]),
            Err(Error::NonFinite { layer: 1 })
        ));
    }

    #[test]
    fn square_hidden_indices_skip_edges() {
        let p = seeded(&[2, 100, 100, 100, 1], 1);
        assert_eq!(p.square_hidden_indices(), vec![1, 2]);
        // Width-2 network: first matrix is 2×2 (square) but is the input
        // edge, so it is still excluded.
        let q = seeded(&[2, 2, 2, 1], 1);
        assert_eq!(q.square_hidden_indices(), vec![1]);
    }

    #[test]
    fn normalize_layer_basics() {
        assert_eq!(normalize_layer(&[3.0, 4.0], 5.0).unwrap(), vec![3.0, 4.0]);
        let v = normalize_layer(&[3.0, 4.0], 1.0).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        let v = normalize_layer(&[1.0, 1.0, 1.0, 1.0], 4.0).unwrap();
        assert!(v.iter().all(|&x| (x - 2.0).abs() < 1e-15));
        assert!(normalize_layer(&[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn normalize_layer_exactly_idempotent() {
        let z = [0.137, -2.4, 3.777, 0.001, -9.2];
        for target in [1.0, 0.37, 123.456] {
            let once = normalize_layer(&z, target).unwrap();
            let twice = normalize_layer(&once, target).unwrap();
            assert_eq!(once, twice, "target {target}");
        }
    }
}
