//! Forward propagation of nested input derivatives.
//!
//! A scalar network `u(x, t)` is evaluated together with `u_x`, `u_t` and
//! `u_xx` by carrying four slots — (value, ∂x, ∂t, ∂xx) — jointly through
//! every layer. For an affine map `a = W z − b` each slot transforms
//! linearly with the same `W`; for an activation `y = f(a)` the chain rule
//! mixes them:
//!
//! ```text
//! y    = f(a_v)
//! y_x  = f′(a_v) a_x
//! y_t  = f′(a_v) a_t
//! y_xx = f″(a_v) a_x² + f′(a_v) a_s
//! ```
//!
//! For tanh, with `y = tanh(a)`: `f′ = 1 − y²` and `f″ = −2 y (1 − y²)`,
//! both expressed through the already-computed output. Everything is exact
//! to floating point — no finite differences anywhere inside.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::{gemm_nn, Mat};
use crate::net::{Activation, NetworkParams};

/// Value plus first/second input derivatives carried through the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualTriple {
    /// u(x, t)
    pub value: f64,
    /// ∂u/∂x
    pub d_dx: f64,
    /// ∂u/∂t
    pub d_dt: f64,
    /// ∂²u/∂x²
    pub d2_dx2: f64,
}

/// Four equally-shaped slot blocks, each `width × batch`.
#[derive(Debug, Clone)]
pub struct SlotBlocks {
    /// Value slot.
    pub v: Mat,
    /// ∂x slot.
    pub x: Mat,
    /// ∂t slot.
    pub t: Mat,
    /// ∂xx slot.
    pub s: Mat,
}

impl SlotBlocks {
    fn zeros(width: usize, batch: usize) -> Self {
        SlotBlocks {
            v: Mat::zeros(width, batch),
            x: Mat::zeros(width, batch),
            t: Mat::zeros(width, batch),
            s: Mat::zeros(width, batch),
        }
    }

    fn all_finite(&self) -> bool {
        self.v.all_finite() && self.x.all_finite() && self.t.all_finite() && self.s.all_finite()
    }
}

/// Recorded slot evaluation over a batch of points, kept for the reverse
/// pass in [`crate::grad`].
pub struct SlotRecord {
    /// Layer inputs: `inputs[l]` feeds layer `l`; length `L`.
    pub(crate) inputs: Vec<SlotBlocks>,
    /// Pre-activation blocks per layer; length `L`.
    pub(crate) pre: Vec<SlotBlocks>,
    /// Final outputs (after the linear last layer), one row per output dim.
    pub(crate) output: SlotBlocks,
    /// Batch size.
    pub(crate) batch: usize,
}

/// Batched outputs of a slot evaluation for a scalar network.
#[derive(Debug, Clone)]
pub struct SlotOutputs {
    /// u per point.
    pub u: Vec<f64>,
    /// u_x per point.
    pub ux: Vec<f64>,
    /// u_t per point.
    pub ut: Vec<f64>,
    /// u_xx per point.
    pub uxx: Vec<f64>,
}

fn require_slot_capable(params: &NetworkParams) -> Result<()> {
    if params.activation == Activation::Relu {
        return Err(Error::UnsupportedActivation {
            detail: String::from(
                "relu has no second derivative; derivative propagation requires tanh or identity",
            ),
        });
    }
    Ok(())
}

/// Slot forward over a batch of `(x, t)` points.
///
/// Requires input dimension 2 (x then t) and a twice-differentiable
/// activation (tanh or identity). Returns the record needed by the reverse
/// pass together with the four output streams.
pub fn slot_forward(
    params: &NetworkParams,
    xs: &[f64],
    ts: &[f64],
) -> Result<(SlotRecord, SlotOutputs)> {
    params.validate()?;
    require_slot_capable(params)?;
    if params.input_dim() != 2 {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: format!(
                "derivative propagation needs input dimension 2 (x, t), network has {}",
                params.input_dim()
            ),
        });
    }
    if params.output_dim() != 1 {
        return Err(Error::ShapeMismatch {
            layer: params.layers.len() - 1,
            detail: format!(
                "derivative propagation needs scalar output, network has {}",
                params.output_dim()
            ),
        });
    }
    assert_eq!(xs.len(), ts.len(), "x and t streams must align");
    let batch = xs.len();
    let n_layers = params.layers.len();

    // Input slots: v = (x, t), ∂x = (1, 0), ∂t = (0, 1), ∂xx = (0, 0).
    let mut z = SlotBlocks::zeros(2, batch);
    z.v.row_mut(0).copy_from_slice(xs);
    z.v.row_mut(1).copy_from_slice(ts);
    z.x.row_mut(0).iter_mut().for_each(|e| *e = 1.0);
    z.t.row_mut(1).iter_mut().for_each(|e| *e = 1.0);

    let mut inputs = Vec::with_capacity(n_layers);
    let mut pre = Vec::with_capacity(n_layers);

    for (l, layer) in params.layers.iter().enumerate() {
        let width = layer.out_dim();
        let mut a = SlotBlocks::zeros(width, batch);
        gemm_nn(&mut a.v, &layer.weights, &z.v);
        gemm_nn(&mut a.x, &layer.weights, &z.x);
        gemm_nn(&mut a.t, &layer.weights, &z.t);
        gemm_nn(&mut a.s, &layer.weights, &z.s);
        for (m, &b) in layer.bias.iter().enumerate() {
            a.v.row_mut(m).iter_mut().for_each(|e| *e -= b);
        }

        let last = l + 1 == n_layers;
        let y = if last || params.activation == Activation::Identity {
            a.clone()
        } else {
            // tanh slot mixing, row by row.
            let mut y = SlotBlocks::zeros(width, batch);
            for m in 0..width {
                let av = a.v.row(m);
                let ax = a.x.row(m);
                let at = a.t.row(m);
                let as_ = a.s.row(m);
                let (yv, yx, yt, ys) = (
                    y.v.row_mut(m),
                    y.x.row_mut(m),
                    y.t.row_mut(m),
                    y.s.row_mut(m),
                );
                // Direct indexed loop over the batch keeps every stream
                // contiguous; the tanh call dominates anyway.
                for j in 0..batch {
                    let yj = crate::fmath::tanh(av[j]);
                    let g1 = 1.0 - yj * yj;
                    let g2 = -2.0 * yj * g1;
                    yv[j] = yj;
                    yx[j] = g1 * ax[j];
                    yt[j] = g1 * at[j];
                    ys[j] = g2 * ax[j] * ax[j] + g1 * as_[j];
                }
            }
            y
        };

        if !y.all_finite() {
            return Err(Error::NonFinite { layer: l });
        }
        inputs.push(z);
        pre.push(a);
        z = y;
    }

    let outputs = SlotOutputs {
        u: z.v.row(0).to_vec(),
        ux: z.x.row(0).to_vec(),
        ut: z.t.row(0).to_vec(),
        uxx: z.s.row(0).to_vec(),
    };
    Ok((
        SlotRecord {
            inputs,
            pre,
            output: z,
            batch,
        },
        outputs,
    ))
}

/// Exact derivatives of the scalar network output at one point.
///
/// This is the single-point face of [`slot_forward`]; the batched form is
/// what training uses.
pub fn derivatives(params: &NetworkParams, x: f64, t: f64) -> Result<DualTriple> {
    let (_, out) = slot_forward(params, &[x], &[t])?;
    Ok(DualTriple {
        value: out.u[0],
        d_dx: out.ux[0],
        d_dt: out.ut[0],
        d2_dx2: out.uxx[0],
    })
}

/// Value-only batched forward, recording what the reverse pass needs.
pub struct ValueRecord {
    /// `chain[l]` is the input to layer `l`; `chain[L]` is the output.
    pub(crate) chain: Vec<Mat>,
    pub(crate) batch: usize,
}

/// Batched plain forward over `(x, t)` points for a scalar network.
pub fn value_forward(params: &NetworkParams, xs: &[f64], ts: &[f64]) -> Result<(ValueRecord, Vec<f64>)> {
    params.validate()?;
    if params.input_dim() != 2 || params.output_dim() != 1 {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: String::from("batched value forward expects a 2-in 1-out network"),
        });
    }
    assert_eq!(xs.len(), ts.len());
    let batch = xs.len();
    let n_layers = params.layers.len();
    let mut z = Mat::zeros(2, batch);
    z.row_mut(0).copy_from_slice(xs);
    z.row_mut(1).copy_from_slice(ts);

    let mut chain = Vec::with_capacity(n_layers + 1);
    for (l, layer) in params.layers.iter().enumerate() {
        let width = layer.out_dim();
        let mut a = Mat::zeros(width, batch);
        gemm_nn(&mut a, &layer.weights, &z);
        let last = l + 1 == n_layers;
        for (m, &b) in layer.bias.iter().enumerate() {
            let row = a.row_mut(m);
            if last || params.activation == Activation::Identity {
                row.iter_mut().for_each(|e| *e -= b);
            } else {
                match params.activation {
                    Activation::Tanh => row.iter_mut().for_each(|e| *e = crate::fmath::tanh(*e - b)),
                    Activation::Relu => row.iter_mut().for_each(|e| {
                        let v = *e - b;
                        *e = if v > 0.0 { v } else { 0.0 };
                    }),
                    Activation::Identity => unreachable!(),
                }
            }
        }
        if !a.all_finite() {
            return Err(Error::NonFinite { layer: l });
        }
        chain.push(core::mem::replace(&mut z, a));
    }
    chain.push(z);
    let out = chain.last().expect("nonempty chain").row(0).to_vec();
    Ok((ValueRecord { chain, batch }, out))
}
