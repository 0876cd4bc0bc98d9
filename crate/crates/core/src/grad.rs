//! Reverse-mode parameter gradients through recorded evaluations.
//!
//! The forward passes in [`crate::deriv`] record their intermediate slot
//! blocks; this module walks those records backwards and accumulates
//! `∂E/∂W_l` and `∂E/∂b_l` for any scalar loss expressed as seed weights on
//! the recorded outputs. Because the record includes the derivative-carrying
//! slots, losses built from `u_x`, `u_t`, `u_xx` (the PINN residual) are
//! differentiable with respect to parameters, not just losses on `u`.
//!
//! Adjoint rules through one tanh layer (`y = f(a)`, slots as in
//! [`crate::deriv`]), with `g1 = 1 − y²`, `g2 = −2 y g1`,
//! `g3 = −2 g1 (1 − 3 y²)` (= f‴):
//!
//! ```text
//! ā_s = ȳ_s g1
//! ā_t = ȳ_t g1
//! ā_x = ȳ_x g1 + ȳ_s · 2 g2 a_x
//! ā_v = ȳ_v g1 + ȳ_x g2 a_x + ȳ_t g2 a_t + ȳ_s (g3 a_x² + g2 a_s)
//! ```
//!
//! then `∂E/∂W = ā zᵀ` summed over slots, `∂E/∂b = −Σ_batch ā_v` (bias is
//! subtracted and feeds only the value slot), and the input adjoint is
//! `Wᵀ ā` per slot.

use alloc::string::String;
use alloc::vec::Vec;

use crate::deriv::{value_forward, SlotBlocks, SlotRecord, ValueRecord};
use crate::error::{Error, Result};
use crate::mat::{gemm_nt, gemm_tn, Mat};
use crate::net::{Activation, NetworkParams};

/// Gradient with the same shape as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrads {
    /// Per layer: (∂E/∂W, ∂E/∂b).
    pub layers: Vec<(Mat, Vec<f64>)>,
}

impl ParamGrads {
    /// Zero gradient shaped like `params`.
    pub fn zeros_like(params: &NetworkParams) -> Self {
        ParamGrads {
            layers: params
                .layers
                .iter()
                .map(|l| {
                    (
                        Mat::zeros(l.weights.rows(), l.weights.cols()),
                        alloc::vec![0.0; l.bias.len()],
                    )
                })
                .collect(),
        }
    }

    /// `self += other`.
    pub fn accumulate(&mut self, other: &ParamGrads) {
        assert_eq!(self.layers.len(), other.layers.len());
        for ((gw, gb), (ow, ob)) in self.layers.iter_mut().zip(&other.layers) {
            gw.axpy(1.0, ow);
            for (a, b) in gb.iter_mut().zip(ob) {
                *a += b;
            }
        }
    }

    /// True when every component is finite.
    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|(w, b)| w.all_finite() && b.iter().all(|v| v.is_finite()))
    }
}

/// Output-adjoint seeds for a recorded slot evaluation: the loss derivative
/// with respect to each of (u, u_x, u_t, u_xx) at every batch point.
pub struct SlotSeeds<'a> {
    /// ∂E/∂u per point.
    pub gu: &'a [f64],
    /// ∂E/∂u_x per point.
    pub gux: &'a [f64],
    /// ∂E/∂u_t per point.
    pub gut: &'a [f64],
    /// ∂E/∂u_xx per point.
    pub guxx: &'a [f64],
}

/// Reverse pass through a recorded slot evaluation.
pub fn slot_backward(
    params: &NetworkParams,
    rec: &SlotRecord,
    seeds: SlotSeeds<'_>,
) -> ParamGrads {
    let batch = rec.batch;
    assert_eq!(seeds.gu.len(), batch);
    assert_eq!(seeds.gux.len(), batch);
    assert_eq!(seeds.gut.len(), batch);
    assert_eq!(seeds.guxx.len(), batch);
    let n_layers = params.layers.len();

    // Adjoint of the network output block (1 × batch per slot).
    let mut g = SlotBlocks {
        v: Mat::from_vec(1, batch, seeds.gu.to_vec()),
        x: Mat::from_vec(1, batch, seeds.gux.to_vec()),
        t: Mat::from_vec(1, batch, seeds.gut.to_vec()),
        s: Mat::from_vec(1, batch, seeds.guxx.to_vec()),
    };

    let mut grads = ParamGrads::zeros_like(params);
    for l in (0..n_layers).rev() {
        let last = l + 1 == n_layers;
        // Post-activation outputs of layer l = inputs of layer l+1 (or the
        // recorded final output block for the last layer).
        let y = if last {
            &rec.output
        } else {
            &rec.inputs[l + 1]
        };
        let a = &rec.pre[l];
        let width = params.layers[l].out_dim();

        // Adjoint of the pre-activation block.
        let adj = if last || params.activation == Activation::Identity {
            g
        } else {
            let mut adj = SlotBlocks {
                v: Mat::zeros(width, batch),
                x: Mat::zeros(width, batch),
                t: Mat::zeros(width, batch),
                s: Mat::zeros(width, batch),
            };
            for m in 0..width {
                let yv = y.v.row(m);
                let ax = a.x.row(m);
                let at = a.t.row(m);
                let as_ = a.s.row(m);
                let gv = g.v.row(m);
                let gx = g.x.row(m);
                let gt = g.t.row(m);
                let gs = g.s.row(m);
                let av_adj = adj.v.row_mut(m);
                for j in 0..batch {
                    let yj = yv[j];
                    let g1 = 1.0 - yj * yj;
                    let g2 = -2.0 * yj * g1;
                    let g3 = -2.0 * g1 * (1.0 - 3.0 * yj * yj);
                    av_adj[j] = gv[j] * g1
                        + gx[j] * g2 * ax[j]
                        + gt[j] * g2 * at[j]
                        + gs[j] * (g3 * ax[j] * ax[j] + g2 * as_[j]);
                }
                let ax_adj = adj.x.row_mut(m);
                for j in 0..batch {
                    ax_adj[j] = gx[j] * g1_of(yv[j]) + gs[j] * 2.0 * g2_of(yv[j]) * ax[j];
                }
                let at_adj = adj.t.row_mut(m);
                for j in 0..batch {
                    at_adj[j] = gt[j] * g1_of(yv[j]);
                }
                let as_adj = adj.s.row_mut(m);
                for j in 0..batch {
                    as_adj[j] = gs[j] * g1_of(yv[j]);
                }
            }
            adj
        };

        // Parameter gradients: gW += ā · zᵀ over all four slots; the bias is
        // subtracted and enters only the value slot, hence the minus.
        let z = &rec.inputs[l];
        let (gw, gb) = &mut grads.layers[l];
        gemm_nt(gw, &adj.v, &z.v);
        gemm_nt(gw, &adj.x, &z.x);
        gemm_nt(gw, &adj.t, &z.t);
        gemm_nt(gw, &adj.s, &z.s);
        for m in 0..width {
            gb[m] -= crate::mat::pairwise_sum(adj.v.row(m));
        }

        // Input adjoint for the next (earlier) layer.
        if l > 0 {
            let w = &params.layers[l].weights;
            let in_dim = params.layers[l].in_dim();
            let mut prev = SlotBlocks {
                v: Mat::zeros(in_dim, batch),
                x: Mat::zeros(in_dim, batch),
                t: Mat::zeros(in_dim, batch),
                s: Mat::zeros(in_dim, batch),
            };
            gemm_tn(&mut prev.v, w, &adj.v);
            gemm_tn(&mut prev.x, w, &adj.x);
            gemm_tn(&mut prev.t, w, &adj.t);
            gemm_tn(&mut prev.s, w, &adj.s);
            g = prev;
        } else {
            g = adj; // consumed; input adjoints of the data are not needed
        }
    }
    grads
}

#[inline(always)]
fn g1_of(y: f64) -> f64 {
    1.0 - y * y
}

#[inline(always)]
fn g2_of(y: f64) -> f64 {
    let g1 = 1.0 - y * y;
    -2.0 * y * g1
}

/// Reverse pass through a recorded value-only evaluation with output seeds
/// `∂E/∂u` per point.
pub fn value_backward(params: &NetworkParams, rec: &ValueRecord, gu: &[f64]) -> ParamGrads {
    let batch = rec.batch;
    assert_eq!(gu.len(), batch);
    let n_layers = params.layers.len();
    let mut g = Mat::from_vec(1, batch, gu.to_vec());
    let mut grads = ParamGrads::zeros_like(params);
    for l in (0..n_layers).rev() {
        let last = l + 1 == n_layers;
        let y = &rec.chain[l + 1];
        let width = params.layers[l].out_dim();
        let adj = if last || params.activation == Activation::Identity {
            g
        } else {
            let mut adj = Mat::zeros(width, batch);
            for m in 0..width {
                let yr = y.row(m);
                let gr = g.row(m);
                let ar = adj.row_mut(m);
                match params.activation {
                    Activation::Tanh => {
                        for j in 0..batch {
                            ar[j] = gr[j] * (1.0 - yr[j] * yr[j]);
                        }
                    }
                    Activation::Relu => {
                        for j in 0..batch {
                            ar[j] = if yr[j] > 0.0 { gr[j] } else { 0.0 };
                        }
                    }
                    Activation::Identity => unreachable!(),
                }
            }
            adj
        };
        let z = &rec.chain[l];
        let (gw, gb) = &mut grads.layers[l];
        gemm_nt(gw, &adj, z);
        for m in 0..width {
            gb[m] -= crate::mat::pairwise_sum(adj.row(m));
        }
        if l > 0 {
            let w = &params.layers[l].weights;
            let mut prev = Mat::zeros(params.layers[l].in_dim(), batch);
            gemm_tn(&mut prev, w, &adj);
            g = prev;
        } else {
            g = adj;
        }
    }
    grads
}

/// A scalar loss that can report its value and its exact parameter gradient.
///
/// `loss_gradient` is expressed through this trait because Rust cannot
/// differentiate an arbitrary closure; each loss couples its evaluation to
/// the recorded forward passes above. The PINN loss in [`crate::pinn`]
/// implements it, as does the simple [`OutputMse`] used in tests.
pub trait DifferentiableLoss {
    /// Loss value at `params`.
    fn loss(&self, params: &NetworkParams) -> Result<f64>;
    /// Loss value together with the full parameter gradient.
    fn loss_and_gradient(&self, params: &NetworkParams) -> Result<(f64, ParamGrads)>;
}

/// Gradient of a scalar loss with respect to every parameter.
///
/// Checks that the loss is finite before differentiating, per the module
/// contract; the returned gradient is deterministic for fixed inputs.
pub fn loss_gradient(
    params: &NetworkParams,
    loss: &dyn DifferentiableLoss,
) -> Result<ParamGrads> {
    let value = loss.loss(params)?;
    if !value.is_finite() {
        return Err(Error::DegenerateInput {
            detail: String::from("loss is non-finite at the given parameters"),
        });
    }
    Ok(loss.loss_and_gradient(params)?.1)
}

/// Mean-squared data loss `mean_k (u(x_k, t_k) − y_k)²` on a scalar network.
#[derive(Debug, Clone)]
pub struct OutputMse {
    /// x coordinates of the data points.
    pub xs: Vec<f64>,
    /// t coordinates of the data points.
    pub ts: Vec<f64>,
    /// Targets y_k.
    pub targets: Vec<f64>,
}

impl DifferentiableLoss for OutputMse {
    fn loss(&self, params: &NetworkParams) -> Result<f64> {
        let (_, u) = value_forward(params, &self.xs, &self.ts)?;
        let n = u.len() as f64;
        Ok(crate::mat::pairwise_sum(
            &u.iter()
                .zip(&self.targets)
                .map(|(a, b)| (a - b) * (a - b))
                .collect::<Vec<_>>(),
        ) / n)
    }

    fn loss_and_gradient(&self, params: &NetworkParams) -> Result<(f64, ParamGrads)> {
        let (rec, u) = value_forward(params, &self.xs, &self.ts)?;
        let n = u.len() as f64;
        let diffs: Vec<f64> = u.iter().zip(&self.targets).map(|(a, b)| a - b).collect();
        let loss = crate::mat::pairwise_map_sum(&diffs, |d| d * d) / n;
        let seeds: Vec<f64> = diffs.iter().map(|d| 2.0 * d / n).collect();
        Ok((loss, value_backward(params, &rec, &seeds)))
    }
}

/// Flatten parameters into one vector (weights row-major, then biases,
/// layer by layer) — used by finite-difference checks and the optimizer.
pub fn flatten_params(params: &NetworkParams) -> Vec<f64> {
    let mut v = Vec::with_capacity(params.param_count());
    for l in &params.layers {
        v.extend_from_slice(l.weights.as_slice());
        v.extend_from_slice(&l.bias);
    }
    v
}

/// Inverse of [`flatten_params`]; shapes are taken from `like`.
pub fn unflatten_params(like: &NetworkParams, v: &[f64]) -> NetworkParams {
    let mut out = like.clone();
    let mut k = 0;
    for l in &mut out.layers {
        let nw = l.weights.rows() * l.weights.cols();
        l.weights
            .as_mut_slice()
            .copy_from_slice(&v[k..k + nw]);
        k += nw;
        let nb = l.bias.len();
        l.bias.copy_from_slice(&v[k..k + nb]);
        k += nb;
    }
    assert_eq!(k, v.len(), "flattened parameter length mismatch");
    out
}

/// Flatten a gradient in the same order as [`flatten_params`].
pub fn flatten_grads(grads: &ParamGrads) -> Vec<f64> {
    let mut v = Vec::new();
    for (w, b) in &grads.layers {
        v.extend_from_slice(w.as_slice());
        v.extend_from_slice(b);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::slot_forward;
    use crate::net::Layer;

    fn seeded(dims: &[usize], seed: u64) -> NetworkParams {
        NetworkParams::init(dims, Activation::Tanh, seed).unwrap()
    }

    #[test]
    fn linear_layer_zero_gradient_at_solution() {
        // E = mean (W x − y)² with W already solving the data exactly.
        // Single linear (final) layer: u = w0·x + w1·t − b.
        let p = NetworkParams {
            layers: alloc::vec![Layer {
                weights: Mat::from_vec(1, 2, alloc::vec![2.0, -1.0]),
                bias: alloc::vec![0.5],
            }],
            activation: Activation::Tanh,
        };
        let xs = alloc::vec![0.1, 0.5, 0.9];
        let ts = alloc::vec![0.3, 0.7, 0.2];
        let targets: Vec<f64> = xs
            .iter()
            .zip(&ts)
            .map(|(&x, &t)| 2.0 * x - 1.0 * t - 0.5)
            .collect();
        let loss = OutputMse { xs, ts, targets };
        let g = loss_gradient(&p, &loss).unwrap();
        for v in flatten_grads(&g) {
            assert!(v.abs() < 1e-14, "stationary point, got {v}");
        }
    }

    #[test]
    fn linear_layer_analytic_gradient() {
        // E = mean (u − y)², u = Wx − b ⇒ ∂E/∂W = mean 2(u−y)xᵀ,
        // ∂E/∂b = −mean 2(u−y).
        let p = NetworkParams {
            layers: alloc::vec![Layer {
                weights: Mat::from_vec(1, 2, alloc::vec![0.4, 1.3]),
                bias: alloc::vec![-0.2],
            }],
            activation: Activation::Tanh,
        };
        let xs = alloc::vec![0.1, 0.8];
        let ts = alloc::vec![0.6, 0.2];
        let targets = alloc::vec![0.0, 1.0];
        let loss = OutputMse {
            xs: xs.clone(),
            ts: ts.clone(),
            targets: targets.clone(),
        };
        let g = loss_gradient(&p, &loss).unwrap();
        let u: Vec<f64> = xs
            .iter()
            .zip(&ts)
            .map(|(&x, &t)| 0.4 * x + 1.3 * t + 0.2)
            .collect();
        let n = 2.0;
        let gw00: f64 = u
            .iter()
            .zip(&targets)
            .zip(&xs)
            .map(|((u, y), x)| 2.0 * (u - y) * x / n)
            .sum();
        let gw01: f64 = u
            .iter()
            .zip(&targets)
            .zip(&ts)
            .map(|((u, y), t)| 2.0 * (u - y) * t / n)
            .sum();
        let gb: f64 = u
            .iter()
            .zip(&targets)
            .map(|(u, y)| -2.0 * (u - y) / n)
            .sum();
        assert!((g.layers[0].0.get(0, 0) - gw00).abs() < 1e-12);
        assert!((g.layers[0].0.get(0, 1) - gw01).abs() < 1e-12);
        assert!((g.layers[0].1[0] - gb).abs() < 1e-12);
    }

    #[test]
    fn mse_gradient_matches_finite_differences() {
        let p = seeded(&[2, 8, 1], 21);
        let loss = OutputMse {
            xs: alloc::vec![0.05, 0.35, 0.65, 0.95],
            ts: alloc::vec![0.1, 0.9, 0.4, 0.7],
            targets: alloc::vec![0.3, -0.2, 0.8, 0.0],
        };
        let g = flatten_grads(&loss_gradient(&p, &loss).unwrap());
        let theta0 = flatten_params(&p);
        let h = 1e-6;
        for k in 0..theta0.len() {
            let mut tp = theta0.clone();
            tp[k] += h;
            let lp = loss.loss(&unflatten_params(&p, &tp)).unwrap();
            tp[k] -= 2.0 * h;
            let lm = loss.loss(&unflatten_params(&p, &tp)).unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let rel = (g[k] - fd).abs() / fd.abs().max(1e-8);
            assert!(rel < 1e-5, "param {k}: ad {} fd {fd}", g[k]);
        }
    }

    #[test]
    fn slot_backward_matches_finite_differences() {
        // Scalar functional of all four outputs, differentiated two ways.
        let p = seeded(&[2, 6, 6, 1], 31);
        let xs = alloc::vec![0.2, 0.7];
        let ts = alloc::vec![0.4, 0.9];
        let weights = [0.7, -1.1, 0.5, 0.3]; // E = Σ_j w·(u, ux, ut, uxx)_j
        let eval = |pp: &NetworkParams| -> f64 {
            let (_, o) = slot_forward(pp, &xs, &ts).unwrap();
            let mut e = 0.0;
            for j in 0..xs.len() {
                e += weights[0] * o.u[j]
                    + weights[1] * o.ux[j]
                    + weights[2] * o.ut[j]
                    + weights[3] * o.uxx[j];
            }
            e
        };
        let (rec, _) = slot_forward(&p, &xs, &ts).unwrap();
        let n = xs.len();
        let g = slot_backward(
            &p,
            &rec,
            SlotSeeds {
                gu: &alloc::vec![weights[0]; n],
                gux: &alloc::vec![weights[1]; n],
                gut: &alloc::vec![weights[2]; n],
                guxx: &alloc::vec![weights[3]; n],
            },
        );
        let gf = flatten_grads(&g);
        let theta0 = flatten_params(&p);
        let h = 1e-6;
        let mut worst = 0.0f64;
        for k in 0..theta0.len() {
            let mut tp = theta0.clone();
            tp[k] += h;
            let lp = eval(&unflatten_params(&p, &tp));
            tp[k] -= 2.0 * h;
            let lm = eval(&unflatten_params(&p, &tp));
            let fd = (lp - lm) / (2.0 * h);
            let rel = (gf[k] - fd).abs() / fd.abs().max(1e-6);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-5, "worst relative error {worst}");
    }

    #[test]
    fn nonfinite_loss_rejected_before_differentiation() {
        let p = seeded(&[2, 4, 1], 2);
        struct Bad;
        impl DifferentiableLoss for Bad {
            fn loss(&self, _: &NetworkParams) -> Result<f64> {
                Ok(f64::NAN)
            }
            fn loss_and_gradient(&self, _: &NetworkParams) -> Result<(f64, ParamGrads)> {
                panic!("must not be called when the loss is non-finite");
            }
        }
        assert!(loss_gradient(&p, &Bad).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let p = seeded(&[2, 5, 3, 1], 9);
        let v = flatten_params(&p);
        assert_eq!(v.len(), p.param_count());
        let q = unflatten_params(&p, &v);
        assert_eq!(p, q);
    }
}
