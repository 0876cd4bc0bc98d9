//! The relaxation dynamical system: each node state is pulled toward an
//! attractor built by non-local linear convolution, a bias shift, and a local
//! nonlinear deformation. At ω = 1 one relaxation step *is* one feed-forward
//! layer — the bridge between the PDE picture and the network picture.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::lab::kernels::{burgers_kernel_matrix, KernelSpec};
use crate::mat::{dot, pairwise_map_sum, Mat};
use crate::net::{normalize_layer, Activation};

/// State of the relaxation system between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationState {
    /// Node values z(q).
    pub z: Vec<f64>,
    /// Relaxation parameter ω ∈ (0, 1]; ω = 1 jumps straight to the
    /// attractor.
    pub omega: f64,
    /// Bias b(q), subtracted before the nonlinearity.
    pub bias: Vec<f64>,
    /// Local nonlinear deformation f.
    pub activation: Activation,
}

impl RelaxationState {
    /// Validate the invariants: ω ∈ (0, 1], finite entries, matching lengths.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::config("omega", "relaxation parameter must lie in (0, 1]"));
        }
        if self.bias.len() != self.z.len() {
            return Err(Error::ShapeMismatch {
                layer: 0,
                detail: alloc::format!(
                    "bias length {} != state length {}",
                    self.bias.len(),
                    self.z.len()
                ),
            });
        }
        if self.z.iter().chain(self.bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput {
                detail: String::from("relaxation state contains non-finite entries"),
            });
        }
        Ok(())
    }
}

/// One relaxation step `z′ = (1−ω)·z + ω·f(Wz − b)`.
///
/// The attractor is computed exactly as a network layer computes its output
/// (same inner-product kernel, same activation), so ω = 1 reproduces a
/// forward layer bit for bit.
pub fn relaxation_step(state: &RelaxationState, w: &Mat) -> Result<Vec<f64>> {
    state.validate()?;
    if w.rows() != state.z.len() || w.cols() != state.z.len() {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: alloc::format!(
                "weight matrix {}x{} does not act on a state of length {}",
                w.rows(),
                w.cols(),
                state.z.len()
            ),
        });
    }
    let mut next = Vec::with_capacity(state.z.len());
    for i in 0..state.z.len() {
        let attractor = state
            .activation
            .apply(dot(w.row(i), &state.z) - state.bias[i]);
        next.push(if state.omega == 1.0 {
            attractor
        } else {
            (1.0 - state.omega) * state.z[i] + state.omega * attractor
        });
    }
    Ok(next)
}

/// Parameters of a relaxation trajectory driven by the Burgers kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationRun {
    /// Time step Δt entering `W = I + Δt·K`.
    pub dt: f64,
    /// Number of relaxation steps.
    pub steps: usize,
    /// Relaxation parameter ω.
    pub omega: f64,
    /// Local deformation (use [`Activation::Identity`] for the pure PDE).
    pub activation: Activation,
    /// Rescale the state to this L2 norm after every step (Eq. NORM mode);
    /// `None` leaves the dynamics untouched.
    pub normalize: Option<f64>,
}

/// Iterate the relaxation map with `W = I + Δt·K(spec)` and zero bias.
///
/// With `f = identity` and `ω = 1` this is explicit Euler for the
/// frozen-field PDE `z_t = −u·z_x + ν·z_xx`. Returns the trajectory
/// including the initial state (`steps + 1` entries). Aborts with an
/// instability error if the state norm grows past 10× its initial value.
pub fn simulate_relaxation(
    spec: &KernelSpec,
    z0: &[f64],
    run: &RelaxationRun,
) -> Result<Vec<Vec<f64>>> {
    if !(run.dt > 0.0) || !run.dt.is_finite() {
        return Err(Error::config("dt", "time step must be positive and finite"));
    }
    if z0.len() != spec.n {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: alloc::format!(
                "initial state length {} != grid size {}",
                z0.len(),
                spec.n
            ),
        });
    }
    let kernel = burgers_kernel_matrix(spec)?;
    let mut w = Mat::from_fn(spec.n, spec.n, |i, j| if i == j { 1.0 } else { 0.0 });
    w.axpy(run.dt, &kernel);
    let norm0 = fmath::sqrt(pairwise_map_sum(z0, |v| v * v));
    let mut state = RelaxationState {
        z: z0.to_vec(),
        omega: run.omega,
        bias: alloc::vec![0.0; spec.n],
        activation: run.activation,
    };
    let mut trajectory = Vec::with_capacity(run.steps + 1);
    trajectory.push(state.z.clone());
    for step in 0..run.steps {
        let mut next = relaxation_step(&state, &w)?;
        if let Some(target) = run.normalize {
            next = normalize_layer(&next, target)?;
        }
        let norm = fmath::sqrt(pairwise_map_sum(&next, |v| v * v));
        if !norm.is_finite() || norm > 10.0 * norm0.max(1e-300) {
            return Err(Error::Instability {
                detail: alloc::format!(
                    "relaxation norm grew to {norm:.3e} (>10× initial {norm0:.3e}) at step {}",
                    step + 1
                ),
            });
        }
        state.z = next;
        trajectory.push(state.z.clone());
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Layer, NetworkParams};
    use crate::rng::{Purpose, SeedStream};
    use alloc::vec;

    const PI: f64 = core::f64::consts::PI;
    const NU: f64 = 0.01 / PI;

    fn identity(n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn omega_one_matches_network_forward_bitwise() {
        // 100 random states through one square layer, every activation.
        let mut rng = SeedStream::new(12, Purpose::Auxiliary);
        let n = 16;
        let w = Mat::from_fn(n, n, |_, _| 0.3 * rng.standard_normal());
        let bias: Vec<f64> = (0..n).map(|_| 0.2 * rng.standard_normal()).collect();
        for activation in [Activation::Tanh, Activation::Identity, Activation::Relu] {
            let net = NetworkParams {
                layers: vec![
                    Layer {
                        weights: w.clone(),
                        bias: bias.clone(),
                    },
                    // Final layer is linear in `forward`; use identity weights
                    // so the network output equals the first layer's output.
                    Layer {
                        weights: identity(n),
                        bias: vec![0.0; n],
                    },
                ],
                activation,
            };
            for _ in 0..100 {
                let z: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
                let state = RelaxationState {
                    z: z.clone(),
                    omega: 1.0,
                    bias: bias.clone(),
                    activation,
                };
                let relaxed = relaxation_step(&state, &w).unwrap();
                let forwarded = net.forward(&z).unwrap();
                for (a, b) in relaxed.iter().zip(&forwarded) {
                    assert!(
                        (a - b).abs() <= 1e-15,
                        "omega=1 mismatch: {a} vs {b} ({activation:?})"
                    );
                }
            }
        }
    }

    #[test]
    fn identity_map_fixed_points() {
        let n = 8;
        let z: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.3).collect();
        for omega in [0.5, 1.0] {
            let state = RelaxationState {
                z: z.clone(),
                omega,
                bias: vec![0.0; n],
                activation: Activation::Identity,
            };
            let next = relaxation_step(&state, &identity(n)).unwrap();
            assert_eq!(next, z, "omega={omega}");
        }
    }

    #[test]
    fn omega_zero_rejected() {
        let state = RelaxationState {
            z: vec![1.0, 2.0],
            omega: 0.0,
            bias: vec![0.0, 0.0],
            activation: Activation::Identity,
        };
        assert!(relaxation_step(&state, &identity(2)).is_err());
    }

    #[test]
    fn zero_initial_field_stays_zero() {
        let spec = KernelSpec::on_unit_grid(64, 3.0, NU, |x| fmath::sin(2.0 * PI * x));
        let run = RelaxationRun {
            dt: 1e-4,
            steps: 20,
            omega: 1.0,
            activation: Activation::Identity,
            normalize: None,
        };
        let traj = simulate_relaxation(&spec, &vec![0.0; 64], &run).unwrap();
        assert_eq!(traj.len(), 21);
        assert!(traj.iter().all(|z| z.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn diffusion_trajectory_matches_heat_decay() {
        let n = 256;
        let spec = KernelSpec::on_unit_grid(n, 2.0, NU, |_| 0.0);
        let z0: Vec<f64> = (0..n).map(|i| fmath::sin(2.0 * PI * i as f64 / n as f64)).collect();
        let dx = 1.0 / n as f64;
        let dt = 0.4 * dx * dx / (2.0 * NU);
        let t_end = 1.0;
        let steps = (t_end / dt) as usize;
        let run = RelaxationRun {
            dt,
            steps,
            omega: 1.0,
            activation: Activation::Identity,
            normalize: None,
        };
        let traj = simulate_relaxation(&spec, &z0, &run).unwrap();
        let t = steps as f64 * dt;
        let decay = fmath::exp(-NU * 4.0 * PI * PI * t);
        let err = traj[steps]
            .iter()
            .zip(&z0)
            .map(|(z, s)| fmath::abs(z - decay * s))
            .fold(0.0f64, f64::max);
        assert!(err < 1e-3, "max deviation from heat decay: {err}");
    }

    #[test]
    fn frozen_field_relaxation_matches_oracle() {
        use crate::oracle::{solve_burgers, InitialCondition, OracleConfig, OracleMode};
        let n = 256;
        let t_end = 0.05;
        let spec = KernelSpec::on_unit_grid(n, 2.0, NU, |x| fmath::sin(2.0 * PI * x));
        let z0 = spec.u_field.clone();
        let dx = 1.0 / n as f64;
        let dt_raw = 0.4 * (dx / 1.0).min(dx * dx / (2.0 * NU));
        let steps = (t_end / dt_raw).ceil() as usize;
        let dt = t_end / steps as f64;
        let run = RelaxationRun {
            dt,
            steps,
            omega: 1.0,
            activation: Activation::Identity,
            normalize: None,
        };
        let traj = simulate_relaxation(&spec, &z0, &run).unwrap();
        // Independent finite-difference run of the same frozen-field PDE at
        // 4× resolution, sampled back onto the kernel grid.
        let oracle = solve_burgers(&OracleConfig {
            n: 1024,
            nu: NU,
            t_end,
            cfl: 0.4,
            mode: OracleMode::FrozenAdvection,
            initial: InitialCondition::Sin2Pi,
        })
        .unwrap();
        let err = (0..n)
            .map(|i| fmath::abs(traj[steps][i] - oracle.snapshot.u[4 * i]))
            .fold(0.0f64, f64::max);
        assert!(err < 5e-3, "kernel relaxation vs oracle: max err {err}");
    }

    #[test]
    fn instability_guard_fires_on_oversized_step() {
        let n = 128;
        let spec = KernelSpec::on_unit_grid(n, 2.0, NU, |_| 0.0);
        let z0: Vec<f64> = (0..n).map(|i| fmath::sin(2.0 * PI * i as f64 / n as f64)).collect();
        let run = RelaxationRun {
            dt: 0.5,
            steps: 500,
            omega: 1.0,
            activation: Activation::Identity,
            normalize: None,
        };
        match simulate_relaxation(&spec, &z0, &run) {
            Err(Error::Instability { .. }) => {}
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn normalize_mode_pins_state_norm() {
        let n = 64;
        let spec = KernelSpec::on_unit_grid(n, 3.0, NU, |_| 0.0);
        let z0: Vec<f64> = (0..n).map(|i| fmath::sin(2.0 * PI * i as f64 / n as f64)).collect();
        let run = RelaxationRun {
            dt: 1e-3,
            steps: 10,
            omega: 0.7,
            activation: Activation::Tanh,
            normalize: Some(2.0),
        };
        let traj = simulate_relaxation(&spec, &z0, &run).unwrap();
        for z in &traj[1..] {
            let norm = fmath::sqrt(pairwise_map_sum(z, |v| v * v));
            assert!((norm - 2.0).abs() < 1e-9, "norm {norm}");
        }
    }
}
