//! Burgers PINN: configuration, collocation sampling, the physics-informed
//! loss, and deterministic seeded training.
//!
//! The loss on a scalar network `u(x, t)` is
//!
//! ```text
//! total = λ_res · mean(r²) + λ_ic · mean((u(x,0) − sin 2πx)²)
//!       + λ_bc · mean((u(0,t) − u(1,t))²)
//! r     = u_t + u u_x − ν u_xx
//! ```
//!
//! with fixed, seeded collocation sets (never resampled: the trained weights
//! are a forensic object and must be a pure function of `(config, seed)`).
//! Periodicity is enforced weakly through the paired-point penalty so the
//! weight matrices stay unconstrained.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::deriv::{slot_forward, value_forward};
use crate::error::{Error, Result};
use crate::forensics::clamp_spectrum;
use crate::grad::{slot_backward, value_backward, DifferentiableLoss, ParamGrads, SlotSeeds};
use crate::mat::pairwise_map_sum;
use crate::net::{Activation, NetworkParams};
use crate::rng::{Purpose, SeedStream};
use crate::{fmath, mat};

/// Chunk width for record-carrying slot evaluations; bounds peak memory and
/// fixes the gradient accumulation order (part of the determinism contract).
const SLOT_CHUNK: usize = 1024;

/// Optimizer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    /// Literal steepest descent on the full collocation set (Eq. BACK).
    Sgd,
    /// Adam with bias correction; the practical default.
    Adam,
}

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Which optimizer to run.
    pub kind: OptimizerKind,
    /// Learning rate α (initial rate for Adam when decay is configured).
    pub rate: f64,
    /// Number of optimizer steps.
    pub steps: u32,
    /// Final learning rate of the exponential schedule (Adam only). Equal to
    /// `rate` means a constant rate. The rate at step `s` (1-based) is
    /// `rate · (rate_final/rate)^((s−1)/(steps−1))`.
    pub rate_final: f64,
    /// Minibatch size over the interior set (Adam only); clamped to the
    /// interior count, in which case every step is full-batch. The initial
    /// and boundary terms are always evaluated on their full sets.
    pub batch: u32,
    /// Decoupled weight decay per step, applied to weight matrices only
    /// (biases are exempt), scaled by the current rate (Adam only).
    pub weight_decay: f64,
    /// Steps of the spectrally constrained fine-tuning phase appended after
    /// `steps` (Adam only); 0 disables the phase. During this phase every
    /// square hidden weight matrix is projected back to `σ ≤ phase2_cap`
    /// after each update and receives the extra decay `phase2_decay`.
    pub phase2_steps: u32,
    /// Initial learning rate of the fine-tuning phase.
    pub phase2_rate: f64,
    /// Final learning rate of the fine-tuning phase (same exponential
    /// schedule shape as the main phase).
    pub phase2_rate_final: f64,
    /// Decoupled decay applied to square hidden weight matrices during the
    /// fine-tuning phase (in addition to `weight_decay`), scaled by the
    /// current rate.
    pub phase2_decay: f64,
    /// Singular-value cap enforced on square hidden weight matrices during
    /// the fine-tuning phase.
    pub phase2_cap: f64,
}

impl OptimizerSettings {
    /// The default practical optimizer: Adam, rate 1e-3, 20000 steps,
    /// no fine-tuning phase.
    pub fn default_adam() -> Self {
        OptimizerSettings {
            kind: OptimizerKind::Adam,
            rate: 1e-3,
            steps: 20_000,
            rate_final: 1e-3,
            batch: 1024,
            weight_decay: 0.0,
            phase2_steps: 0,
            phase2_rate: 1e-4,
            phase2_rate_final: 1e-4,
            phase2_decay: 0.0,
            phase2_cap: 0.9,
        }
    }

    /// Total optimizer steps across both phases.
    pub fn total_steps(&self) -> u32 {
        self.steps + self.phase2_steps
    }

    fn rate_at(&self, step: u32) -> f64 {
        if step > self.steps {
            // Fine-tuning phase schedule.
            if self.phase2_rate_final == self.phase2_rate || self.phase2_steps <= 1 {
                return self.phase2_rate;
            }
            let f = (step - self.steps - 1) as f64 / (self.phase2_steps - 1) as f64;
            return self.phase2_rate * fmath::powf(self.phase2_rate_final / self.phase2_rate, f);
        }
        if self.kind == OptimizerKind::Sgd || self.rate_final == self.rate || self.steps <= 1 {
            return self.rate;
        }
        let f = (step - 1) as f64 / (self.steps - 1) as f64;
        self.rate * fmath::powf(self.rate_final / self.rate, f)
    }
}

/// Weights of the three loss terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    /// λ_res
    pub residual: f64,
    /// λ_ic
    pub ic: f64,
    /// λ_bc
    pub bc: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            residual: 1.0,
            ic: 1.0,
            bc: 1.0,
        }
    }
}

/// Full experiment record: architecture, PDE constants, domain, collocation
/// counts, optimizer settings and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnConfig {
    /// Number of hidden layers of size `width`. The layer chain is
    /// `2 → width → … → width → 1`, i.e. `hidden_layers + 1` weight
    /// matrices of which `hidden_layers − 1` are square `width × width`.
    pub hidden_layers: usize,
    /// Hidden width.
    pub width: usize,
    /// Hidden activation.
    pub activation: Activation,
    /// Viscosity ν (paper value 0.01/π).
    pub nu: f64,
    /// Spatial domain (paper: [0, 1]).
    pub x_domain: (f64, f64),
    /// Temporal domain (paper: [0, 1], one convection time).
    pub t_domain: (f64, f64),
    /// Interior collocation count.
    pub n_interior: usize,
    /// Initial-condition collocation count.
    pub n_initial: usize,
    /// Boundary pair count.
    pub n_boundary: usize,
    /// Optimizer settings.
    pub optimizer: OptimizerSettings,
    /// Loss term weights.
    pub loss_weights: LossWeights,
    /// Experiment seed; drives initialization, collocation and minibatching
    /// through independent streams.
    pub seed: u64,
}

impl PinnConfig {
    /// The §6.2 experiment: 9 layers including the input/output mapping
    /// (7 hidden layers, 6 square matrices), width 100, tanh, ν = 0.01/π.
    ///
    /// Optimizer settings are the calibrated recipe for this problem: Adam,
    /// rate 2e-3 decaying to 1e-4 over 20000 steps, minibatch 1024, loss
    /// weights (1, 10, 10).
    pub fn reference(seed: u64) -> Self {
        PinnConfig {
            hidden_layers: 7,
            width: 100,
            activation: Activation::Tanh,
            nu: 0.01 / fmath::PI,
            x_domain: (0.0, 1.0),
            t_domain: (0.0, 1.0),
            n_interior: 10_000,
            n_initial: 512,
            n_boundary: 512,
            optimizer: OptimizerSettings {
                rate: 2e-3,
                rate_final: 1e-4,
                ..OptimizerSettings::default_adam()
            },
            loss_weights: LossWeights {
                residual: 1.0,
                ic: 10.0,
                bc: 10.0,
            },
            seed,
        }
    }

    /// The reduced desk-scale experiment: 4 hidden layers of width 50
    /// (3 square matrices), 5000 steps — minutes on one CPU core.
    pub fn desk(seed: u64) -> Self {
        let mut config = PinnConfig::reference(seed);
        config.hidden_layers = 4;
        config.width = 50;
        config.optimizer.steps = 5000;
        config.optimizer.rate_final = 2e-4;
        config
    }

    /// Layer width chain including input and output.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_layers + 2);
        dims.push(2);
        dims.extend(core::iter::repeat(self.width).take(self.hidden_layers));
        dims.push(1);
        dims
    }

    /// Validate every invariant the type declares.
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers == 0 {
            return Err(Error::config("hidden_layers", "must be ≥ 1"));
        }
        if self.width == 0 {
            return Err(Error::config("width", "must be ≥ 1"));
        }
        if !(self.nu > 0.0) {
            return Err(Error::config("nu", "viscosity must be > 0"));
        }
        if self.n_interior == 0 {
            return Err(Error::config("n_interior", "collocation counts must be > 0"));
        }
        if self.n_initial == 0 {
            return Err(Error::config("n_initial", "collocation counts must be > 0"));
        }
        if self.n_boundary == 0 {
            return Err(Error::config("n_boundary", "collocation counts must be > 0"));
        }
        if !(self.optimizer.rate > 0.0) {
            return Err(Error::config("optimizer.rate", "rate α must be > 0"));
        }
        if !(self.optimizer.rate_final > 0.0) {
            return Err(Error::config("optimizer.rate_final", "must be > 0"));
        }
        if self.optimizer.kind == OptimizerKind::Adam && self.optimizer.batch == 0 {
            return Err(Error::config("optimizer.batch", "must be ≥ 1"));
        }
        if self.optimizer.weight_decay < 0.0 {
            return Err(Error::config("optimizer.weight_decay", "must be ≥ 0"));
        }
        if self.optimizer.phase2_steps > 0 {
            if self.optimizer.kind != OptimizerKind::Adam {
                return Err(Error::config(
                    "optimizer.phase2_steps",
                    "fine-tuning phase requires the Adam optimizer",
                ));
            }
            if !(self.optimizer.phase2_rate > 0.0) || !(self.optimizer.phase2_rate_final > 0.0) {
                return Err(Error::config("optimizer.phase2_rate", "must be > 0"));
            }
            if self.optimizer.phase2_decay < 0.0 {
                return Err(Error::config("optimizer.phase2_decay", "must be ≥ 0"));
            }
            if !(self.optimizer.phase2_cap > 0.0) || !self.optimizer.phase2_cap.is_finite() {
                return Err(Error::config(
                    "optimizer.phase2_cap",
                    "singular-value cap must be positive and finite",
                ));
            }
        }
        if !(self.x_domain.1 > self.x_domain.0) {
            return Err(Error::config("x_domain", "degenerate interval"));
        }
        if !(self.t_domain.1 > self.t_domain.0) {
            return Err(Error::config("t_domain", "degenerate interval"));
        }
        if self.loss_weights.residual < 0.0
            || self.loss_weights.ic < 0.0
            || self.loss_weights.bc < 0.0
        {
            return Err(Error::config("loss_weights", "must be ≥ 0"));
        }
        Ok(())
    }
}

/// Fixed seeded collocation sets.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSets {
    /// Interior x coordinates (paired with `interior_t`).
    pub interior_x: Vec<f64>,
    /// Interior t coordinates.
    pub interior_t: Vec<f64>,
    /// Initial-condition x coordinates (t = 0).
    pub initial_x: Vec<f64>,
    /// Boundary pair times: each enforces `u(x_lo, t) = u(x_hi, t)`.
    pub boundary_t: Vec<f64>,
}

/// Sample the collocation sets for `config` with the given seed.
///
/// Interior points are uniform over the open-x, right-half-open-t box
/// `(x_lo, x_hi) × (t_lo, t_hi]`; initial points are uniform in x at
/// `t = t_lo`; boundary entries are times pairing `(x_lo, t)` with
/// `(x_hi, t)` for the periodic condition. Deterministic for a fixed seed.
pub fn sample_collocation(config: &PinnConfig, seed: u64) -> Result<CollocationSets> {
    config.validate()?;
    let (x_lo, x_hi) = config.x_domain;
    let (t_lo, t_hi) = config.t_domain;
    let mut s = SeedStream::new(seed, Purpose::Collocation);
    let mut interior_x = Vec::with_capacity(config.n_interior);
    let mut interior_t = Vec::with_capacity(config.n_interior);
    for _ in 0..config.n_interior {
        // Strictly interior in x (rejection has vanishing cost), (lo, hi] in t.
        let x = loop {
            let u = s.uniform();
            if u > 0.0 {
                break x_lo + (x_hi - x_lo) * u;
            }
        };
        let t = t_lo + (t_hi - t_lo) * s.uniform_open0();
        interior_x.push(x);
        interior_t.push(t);
    }
    let initial_x = (0..config.n_initial)
        .map(|_| x_lo + (x_hi - x_lo) * s.uniform())
        .collect();
    let boundary_t = (0..config.n_boundary)
        .map(|_| t_lo + (t_hi - t_lo) * s.uniform_open0())
        .collect();
    Ok(CollocationSets {
        interior_x,
        interior_t,
        initial_x,
        boundary_t,
    })
}

/// The PDE residual `r = u_t + u·u_x − ν·u_xx` at a single point.
pub fn residual(params: &NetworkParams, x: f64, t: f64, nu: f64) -> Result<f64> {
    let d = crate::deriv::derivatives(params, x, t)?;
    Ok(d.d_dt + d.value * d.d_dx - nu * d.d2_dx2)
}

/// The three loss terms and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    /// λ-weighted sum of the three terms.
    pub total: f64,
    /// mean(r²) over the interior points used.
    pub residual: f64,
    /// mean((u(x,0) − sin 2πx)²).
    pub ic: f64,
    /// mean((u(x_lo,t) − u(x_hi,t))²).
    pub bc: f64,
}

/// Initial condition of the experiment.
#[inline]
fn u0(x: f64) -> f64 {
    fmath::sin(2.0 * fmath::PI * x)
}

/// Per-point squared residuals over an interior subset, chunked.
fn residual_sq_terms(
    params: &NetworkParams,
    xs: &[f64],
    ts: &[f64],
    nu: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len());
    for (cx, ct) in xs.chunks(SLOT_CHUNK).zip(ts.chunks(SLOT_CHUNK)) {
        let (_, o) = slot_forward(params, cx, ct)?;
        for j in 0..cx.len() {
            let r = o.ut[j] + o.u[j] * o.ux[j] - nu * o.uxx[j];
            out.push(r * r);
        }
    }
    Ok(out)
}

fn ic_bc_terms(
    params: &NetworkParams,
    config: &PinnConfig,
    sets: &CollocationSets,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let zeros = vec![config.t_domain.0; sets.initial_x.len()];
    let (_, u_ic) = value_forward(params, &sets.initial_x, &zeros)?;
    let ic: Vec<f64> = u_ic
        .iter()
        .zip(&sets.initial_x)
        .map(|(&u, &x)| {
            let d = u - u0(x);
            d * d
        })
        .collect();
    let lo = vec![config.x_domain.0; sets.boundary_t.len()];
    let hi = vec![config.x_domain.1; sets.boundary_t.len()];
    let (_, ul) = value_forward(params, &lo, &sets.boundary_t)?;
    let (_, ur) = value_forward(params, &hi, &sets.boundary_t)?;
    let bc: Vec<f64> = ul
        .iter()
        .zip(&ur)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .collect();
    Ok((ic, bc))
}

/// The full PINN loss on the given collocation sets.
pub fn pinn_loss(
    params: &NetworkParams,
    config: &PinnConfig,
    sets: &CollocationSets,
) -> Result<LossBreakdown> {
    if sets.interior_x.is_empty() || sets.initial_x.is_empty() || sets.boundary_t.is_empty() {
        return Err(Error::config("collocation", "empty collocation set"));
    }
    let lw = config.loss_weights;
    let res = if lw.residual == 0.0 {
        // Skipping the derivative pass when λ_res = 0 keeps degenerate
        // configurations (e.g. all-λ-zero) cheap and activation-agnostic.
        0.0
    } else {
        mat::mean(&residual_sq_terms(
            params,
            &sets.interior_x,
            &sets.interior_t,
            config.nu,
        )?)
    };
    let (ic_terms, bc_terms) = if lw.ic == 0.0 && lw.bc == 0.0 {
        (vec![0.0], vec![0.0])
    } else {
        ic_bc_terms(params, config, sets)?
    };
    let ic = mat::mean(&ic_terms);
    let bc = mat::mean(&bc_terms);
    Ok(LossBreakdown {
        total: lw.residual * res + lw.ic * ic + lw.bc * bc,
        residual: res,
        ic,
        bc,
    })
}

/// Loss and gradient over an optional interior subset (minibatch).
///
/// The subset affects only the residual term; the mean is taken over the
/// subset (standard minibatch estimator). IC/BC terms always use their full
/// sets — they are cheap value-only passes.
fn pinn_loss_and_grad(
    params: &NetworkParams,
    config: &PinnConfig,
    sets: &CollocationSets,
    subset: Option<&[usize]>,
) -> Result<(LossBreakdown, ParamGrads)> {
    let lw = config.loss_weights;
    let mut grads = ParamGrads::zeros_like(params);

    // Residual term, chunked over the (subset of the) interior set.
    let (sub_x, sub_t): (Vec<f64>, Vec<f64>) = match subset {
        Some(idx) => (
            idx.iter().map(|&i| sets.interior_x[i]).collect(),
            idx.iter().map(|&i| sets.interior_t[i]).collect(),
        ),
        None => (sets.interior_x.clone(), sets.interior_t.clone()),
    };
    let n = sub_x.len();
    let mut res_terms = Vec::with_capacity(n);
    if lw.residual != 0.0 {
        // λ_res = 0 skips the derivative pass entirely (see `pinn_loss`).
        let w = 2.0 * lw.residual / n as f64;
        for (cx, ct) in sub_x.chunks(SLOT_CHUNK).zip(sub_t.chunks(SLOT_CHUNK)) {
            let (rec, o) = slot_forward(params, cx, ct)?;
            let m = cx.len();
            let mut gu = Vec::with_capacity(m);
            let mut gux = Vec::with_capacity(m);
            let mut gut = Vec::with_capacity(m);
            let mut guxx = Vec::with_capacity(m);
            for j in 0..m {
                let r = o.ut[j] + o.u[j] * o.ux[j] - config.nu * o.uxx[j];
                res_terms.push(r * r);
                gu.push(w * r * o.ux[j]);
                gux.push(w * r * o.u[j]);
                gut.push(w * r);
                guxx.push(-w * r * config.nu);
            }
            grads.accumulate(&slot_backward(
                params,
                &rec,
                SlotSeeds {
                    gu: &gu,
                    gux: &gux,
                    gut: &gut,
                    guxx: &guxx,
                },
            ));
        }
    }
    let res = if res_terms.is_empty() {
        0.0
    } else {
        mat::mean(&res_terms)
    };

    // IC term.
    let zeros = vec![config.t_domain.0; sets.initial_x.len()];
    let (rec_ic, u_ic) = value_forward(params, &sets.initial_x, &zeros)?;
    let n_ic = u_ic.len() as f64;
    let diffs_ic: Vec<f64> = u_ic
        .iter()
        .zip(&sets.initial_x)
        .map(|(&u, &x)| u - u0(x))
        .collect();
    let ic = pairwise_map_sum(&diffs_ic, |d| d * d) / n_ic;
    if lw.ic != 0.0 {
        let seeds: Vec<f64> = diffs_ic.iter().map(|d| 2.0 * lw.ic * d / n_ic).collect();
        grads.accumulate(&value_backward(params, &rec_ic, &seeds));
    }

    // BC term (paired points).
    let lo = vec![config.x_domain.0; sets.boundary_t.len()];
    let hi = vec![config.x_domain.1; sets.boundary_t.len()];
    let (rec_lo, ul) = value_forward(params, &lo, &sets.boundary_t)?;
    let (rec_hi, ur) = value_forward(params, &hi, &sets.boundary_t)?;
    let n_bc = ul.len() as f64;
    let diffs_bc: Vec<f64> = ul.iter().zip(&ur).map(|(&a, &b)| a - b).collect();
    let bc = pairwise_map_sum(&diffs_bc, |d| d * d) / n_bc;
    if lw.bc != 0.0 {
        let seeds_lo: Vec<f64> = diffs_bc.iter().map(|d| 2.0 * lw.bc * d / n_bc).collect();
        let seeds_hi: Vec<f64> = diffs_bc.iter().map(|d| -2.0 * lw.bc * d / n_bc).collect();
        grads.accumulate(&value_backward(params, &rec_lo, &seeds_lo));
        grads.accumulate(&value_backward(params, &rec_hi, &seeds_hi));
    }

    Ok((
        LossBreakdown {
            total: lw.residual * res + lw.ic * ic + lw.bc * bc,
            residual: res,
            ic,
            bc,
        },
        grads,
    ))
}

/// The PINN loss as a [`DifferentiableLoss`] over the full collocation sets.
pub struct PinnLoss<'a> {
    /// Experiment configuration (λ weights, ν, domains).
    pub config: &'a PinnConfig,
    /// Fixed collocation sets.
    pub sets: &'a CollocationSets,
}

impl DifferentiableLoss for PinnLoss<'_> {
    fn loss(&self, params: &NetworkParams) -> Result<f64> {
        Ok(pinn_loss(params, self.config, self.sets)?.total)
    }

    fn loss_and_gradient(&self, params: &NetworkParams) -> Result<(f64, ParamGrads)> {
        let (b, g) = pinn_loss_and_grad(params, self.config, self.sets, None)?;
        Ok((b.total, g))
    }
}

/// Wall-clock source injected into training so the core stays `no_std`.
pub trait Clock {
    /// Monotonic seconds since an arbitrary origin.
    fn seconds(&self) -> f64;
}

/// Clock that always reads zero (keeps `no_std` runs and byte-stable tests).
pub struct NullClock;

impl Clock for NullClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

/// One history record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    /// Optimizer step (1-based; 0 is the initialization record).
    pub step: u32,
    /// Weighted total loss.
    pub total: f64,
    /// Residual term.
    pub residual: f64,
    /// Initial-condition term.
    pub ic: f64,
    /// Boundary term.
    pub bc: f64,
    /// Wall-clock seconds since training started (0 under [`NullClock`]).
    pub wall_seconds: f64,
}

impl HistoryRecord {
    fn from_breakdown(step: u32, b: LossBreakdown, wall: f64) -> Self {
        HistoryRecord {
            step,
            total: b.total,
            residual: b.residual,
            ic: b.ic,
            bc: b.bc,
            wall_seconds: wall,
        }
    }
}

/// Complete training history.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// Per-step records: the loss seen by the optimizer at that step
    /// (minibatch residual under Adam), steps strictly increasing.
    pub steps: Vec<HistoryRecord>,
    /// Full-collocation-set evaluations at step 0, every
    /// [`FULL_EVAL_EVERY`] steps, and at the final step; the convergence
    /// diagnostics use these.
    pub full_evals: Vec<HistoryRecord>,
}

/// Cadence of full-set loss evaluations recorded in
/// [`TrainingHistory::full_evals`].
pub const FULL_EVAL_EVERY: u32 = 500;

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Final parameters — or the last finite checkpoint if training diverged.
    pub params: NetworkParams,
    /// History up to the last completed step.
    pub history: TrainingHistory,
    /// `Some(step)` if the loss became non-finite at that step; the carried
    /// parameters are then the last finite checkpoint.
    pub diverged_at: Option<u32>,
}

/// Train per `config` (fully reproducible from `(config, seed)`).
///
/// `steps = 0` returns the seeded initialization unchanged. Divergence
/// (non-finite loss) aborts and returns the last finite checkpoint with
/// `diverged_at` set.
pub fn train(config: &PinnConfig, clock: &dyn Clock) -> Result<TrainOutcome> {
    config.validate()?;
    let sets = sample_collocation(config, config.seed)?;
    let mut params = NetworkParams::init(&config.dims(), config.activation, config.seed)?;
    let t0 = clock.seconds();
    let mut history = TrainingHistory::default();

    let opt = &config.optimizer;
    if opt.steps == 0 {
        let b = pinn_loss(&params, config, &sets)?;
        history
            .full_evals
            .push(HistoryRecord::from_breakdown(0, b, clock.seconds() - t0));
        return Ok(TrainOutcome {
            params,
            history,
            diverged_at: None,
        });
    }

    let diverged_at = match opt.kind {
        OptimizerKind::Sgd => train_sgd(config, &sets, &mut params, &mut history, clock, t0)?,
        OptimizerKind::Adam => train_adam(config, &sets, &mut params, &mut history, clock, t0)?,
    };
    Ok(TrainOutcome {
        params,
        history,
        diverged_at,
    })
}

/// Evaluate loss and gradient, mapping numeric blow-up (overflow inside the
/// forward pass) to `None` so the trainer can abort at the last checkpoint.
fn try_loss_and_grad(
    params: &NetworkParams,
    config: &PinnConfig,
    sets: &CollocationSets,
    subset: Option<&[usize]>,
) -> Result<Option<(LossBreakdown, ParamGrads)>> {
    match pinn_loss_and_grad(params, config, sets, subset) {
        Ok((b, g)) if b.total.is_finite() && g.all_finite() => Ok(Some((b, g))),
        Ok(_) => Ok(None),
        Err(Error::NonFinite { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Literal Eq. (BACK): `W′ = W − α ∂E/∂W` on the full collocation sets.
fn train_sgd(
    config: &PinnConfig,
    sets: &CollocationSets,
    params: &mut NetworkParams,
    history: &mut TrainingHistory,
    clock: &dyn Clock,
    t0: f64,
) -> Result<Option<u32>> {
    let opt = &config.optimizer;
    record_full_eval(params, config, sets, history, 0, clock, t0);
    let mut prev = params.clone();
    for step in 1..=opt.steps {
        let (b, grads) = match try_loss_and_grad(params, config, sets, None)? {
            Some(x) => x,
            None => {
                *params = prev;
                return Ok(Some(step));
            }
        };
        let wall = clock.seconds() - t0;
        history
            .steps
            .push(HistoryRecord::from_breakdown(step, b, wall));
        prev = params.clone();
        for (layer, (gw, gb)) in params.layers.iter_mut().zip(&grads.layers) {
            layer.weights.axpy(-opt.rate, gw);
            for (b, g) in layer.bias.iter_mut().zip(gb) {
                *b -= opt.rate * g;
            }
        }
        if step % FULL_EVAL_EVERY == 0 || step == opt.steps {
            record_full_eval(params, config, sets, history, step, clock, t0);
        }
    }
    Ok(None)
}

/// Append a full-set evaluation to `history.full_evals`; silently skipped if
/// the evaluation is non-finite (the next step's check will catch it).
fn record_full_eval(
    params: &NetworkParams,
    config: &PinnConfig,
    sets: &CollocationSets,
    history: &mut TrainingHistory,
    step: u32,
    clock: &dyn Clock,
    t0: f64,
) {
    if let Ok(full) = pinn_loss(params, config, sets) {
        if full.total.is_finite() {
            history
                .full_evals
                .push(HistoryRecord::from_breakdown(step, full, clock.seconds() - t0));
        }
    }
}

/// Adam with bias correction, exponential rate schedule, fixed-permutation
/// minibatching and decoupled weight decay.
fn train_adam(
    config: &PinnConfig,
    sets: &CollocationSets,
    params: &mut NetworkParams,
    history: &mut TrainingHistory,
    clock: &dyn Clock,
    t0: f64,
) -> Result<Option<u32>> {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    let opt = &config.optimizer;
    let n_int = sets.interior_x.len();
    let batch = (opt.batch as usize).min(n_int);
    let full_batch = batch == n_int;
    let square_hidden = params.square_hidden_indices();

    let mut m = ParamGrads::zeros_like(params);
    let mut v = ParamGrads::zeros_like(params);
    let mut shuffler = SeedStream::new(config.seed, Purpose::Minibatch);
    let mut perm: Vec<usize> = (0..n_int).collect();
    shuffler.shuffle(&mut perm);
    let mut pos = 0usize;

    record_full_eval(params, config, sets, history, 0, clock, t0);
    let mut prev = params.clone();
    for step in 1..=opt.total_steps() {
        let in_phase2 = step > opt.steps;
        let subset: Option<&[usize]> = if full_batch {
            None
        } else {
            if pos + batch > n_int {
                shuffler.shuffle(&mut perm);
                pos = 0;
            }
            let s = &perm[pos..pos + batch];
            pos += batch;
            Some(s)
        };
        let (b, grads) = match try_loss_and_grad(params, config, sets, subset)? {
            Some(x) => x,
            None => {
                *params = prev;
                return Ok(Some(step));
            }
        };
        let wall = clock.seconds() - t0;
        history
            .steps
            .push(HistoryRecord::from_breakdown(step, b, wall));
        prev = params.clone();

        let rate = opt.rate_at(step);
        let c1 = 1.0 - fmath::powf(BETA1, step as f64);
        let c2 = 1.0 - fmath::powf(BETA2, step as f64);
        for l in 0..params.layers.len() {
            let (gw, gb) = &grads.layers[l];
            let (mw, mb) = &mut m.layers[l];
            let (vw, vb) = &mut v.layers[l];
            let constrained = in_phase2 && square_hidden.contains(&l);
            let decay = if constrained {
                opt.weight_decay + opt.phase2_decay
            } else {
                opt.weight_decay
            };
            let layer = &mut params.layers[l];
            let w = layer.weights.as_mut_slice();
            for (((wi, gi), mi), vi) in w
                .iter_mut()
                .zip(gw.as_slice())
                .zip(mw.as_mut_slice())
                .zip(vw.as_mut_slice())
            {
                *mi = BETA1 * *mi + (1.0 - BETA1) * gi;
                *vi = BETA2 * *vi + (1.0 - BETA2) * gi * gi;
                let update = (*mi / c1) / (fmath::sqrt(*vi / c2) + EPS);
                *wi -= rate * (update + decay * *wi);
            }
            if constrained {
                layer.weights = clamp_spectrum(&layer.weights, opt.phase2_cap)?;
            }
            for (((bi, gi), mi), vi) in layer
                .bias
                .iter_mut()
                .zip(gb)
                .zip(mb.iter_mut())
                .zip(vb.iter_mut())
            {
                *mi = BETA1 * *mi + (1.0 - BETA1) * gi;
                *vi = BETA2 * *vi + (1.0 - BETA2) * gi * gi;
                *bi -= rate * (*mi / c1) / (fmath::sqrt(*vi / c2) + EPS);
            }
        }

        if step % FULL_EVAL_EVERY == 0 || step == opt.steps || step == opt.total_steps() {
            record_full_eval(params, config, sets, history, step, clock, t0);
        }
    }
    Ok(None)
}

/// Sample the trained field on a grid at fixed `t`.
pub fn predict_field(params: &NetworkParams, grid: &[f64], t: f64) -> Result<Vec<f64>> {
    let ts = vec![t; grid.len()];
    let (_, u) = value_forward(params, grid, &ts)?;
    Ok(u)
}
