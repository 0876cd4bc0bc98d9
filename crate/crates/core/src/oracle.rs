//! Independent finite-difference reference solver for the 1-D viscous
//! Burgers problem on the periodic unit interval:
//!
//! ```text
//! u_t + (u²/2)_x = ν u_xx,   u(x, 0) = sin 2πx,   u(0, t) = u(1, t)
//! ```
//!
//! This module shares no code with the network stack — it exists to check
//! the trained surrogate against a classical discretization. Space is a
//! uniform periodic grid with the conservative flux form (central
//! differences), time is Heun's method (RK2) under a CFL-limited step.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{fmath, mat};

/// Which physics the right-hand side carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// The full nonlinear equation.
    Full,
    /// Heat equation only (`u_t = ν u_xx`); has a closed-form solution for
    /// the sine initial condition, used for convergence checks.
    DiffusionOnly,
    /// Advection velocity frozen at the initial field: `u_t + a(x) u_x =
    /// ν u_xx` with `a = u(·, 0)`. This is the linearization the kernel
    /// counterpoint reproduces with stacked convolution layers.
    FrozenAdvection,
}

impl OracleMode {
    /// Stable lowercase name (matches the CLI flag values).
    pub fn name(&self) -> &'static str {
        match self {
            OracleMode::Full => "full",
            OracleMode::DiffusionOnly => "diffusion-only",
            OracleMode::FrozenAdvection => "frozen-advection",
        }
    }

    /// Parse a CLI flag value.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(OracleMode::Full),
            "diffusion-only" => Ok(OracleMode::DiffusionOnly),
            "frozen-advection" => Ok(OracleMode::FrozenAdvection),
            _ => Err(Error::config(
                "mode",
                "expected full | diffusion-only | frozen-advection",
            )),
        }
    }
}

/// Initial condition on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// The experiment's `sin 2πx`.
    Sin2Pi,
    /// Caller-provided samples on the solver grid (length must equal `n`).
    Custom(Vec<f64>),
}

/// Oracle run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Grid points on [0, 1) (point `x_j = j/n`; `x = 1` is identified
    /// with `x = 0`).
    pub n: usize,
    /// Viscosity ν > 0.
    pub nu: f64,
    /// Final time (≥ 0).
    pub t_end: f64,
    /// CFL safety factor in (0, 1]; the step is
    /// `cfl · min(Δx / max|u|, Δx² / 2ν)`.
    pub cfl: f64,
    /// Physics selection.
    pub mode: OracleMode,
    /// Initial condition.
    pub initial: InitialCondition,
}

impl OracleConfig {
    /// Standard configuration for the experiment's equation.
    pub fn burgers(n: usize, t_end: f64) -> Self {
        OracleConfig {
            n,
            nu: 0.01 / fmath::PI,
            t_end,
            cfl: 0.4,
            mode: OracleMode::Full,
            initial: InitialCondition::Sin2Pi,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::config("n", "grid needs at least 3 points"));
        }
        if !(self.nu > 0.0) {
            return Err(Error::config("nu", "viscosity must be > 0"));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::config("t_end", "final time must be ≥ 0"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("cfl", "CFL factor must be in (0, 1]"));
        }
        if let InitialCondition::Custom(u) = &self.initial {
            if u.len() != self.n {
                return Err(Error::ShapeMismatch {
                    layer: 0,
                    detail: alloc::format!(
                        "custom initial condition has {} samples, grid has {}",
                        u.len(),
                        self.n
                    ),
                });
            }
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::DegenerateInput {
                    detail: alloc::string::String::from(
                        "custom initial condition contains non-finite values",
                    ),
                });
            }
        }
        Ok(())
    }
}

/// A field sampled on the solver grid at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    /// Snapshot time.
    pub t: f64,
    /// Grid coordinates `x_j = j/n`.
    pub x: Vec<f64>,
    /// Field values.
    pub u: Vec<f64>,
}

/// Result of an oracle run, with the invariants the scheme is supposed to
/// respect so callers can assert them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    /// Final field.
    pub snapshot: FieldSnapshot,
    /// Time steps taken.
    pub steps: u64,
    /// `mean(u_final) − mean(u_initial)`; near roundoff for the
    /// conservative-flux and diffusion modes.
    pub mean_drift: f64,
    /// `mean(u²)` of the initial field.
    pub energy_initial: f64,
    /// `mean(u²)` of the final field; never above the initial value for
    /// the dissipative modes.
    pub energy_final: f64,
}

fn initial_field(cfg: &OracleConfig) -> Vec<f64> {
    match &cfg.initial {
        InitialCondition::Sin2Pi => (0..cfg.n)
            .map(|j| fmath::sin(2.0 * fmath::PI * j as f64 / cfg.n as f64))
            .collect(),
        InitialCondition::Custom(u) => u.clone(),
    }
}

/// Semi-discrete right-hand side on the periodic grid.
fn rhs(mode: OracleMode, u: &[f64], frozen: &[f64], nu: f64, dx: f64, out: &mut [f64]) {
    let n = u.len();
    let inv_2dx = 1.0 / (2.0 * dx);
    let inv_dx2 = 1.0 / (dx * dx);
    for j in 0..n {
        let jm = if j == 0 { n - 1 } else { j - 1 };
        let jp = if j + 1 == n { 0 } else { j + 1 };
        let adv = match mode {
            // Conservative flux F = u²/2; central difference telescopes over
            // the ring, so the discrete mean is conserved to roundoff.
            OracleMode::Full => -(u[jp] * u[jp] - u[jm] * u[jm]) * 0.5 * inv_2dx,
            OracleMode::DiffusionOnly => 0.0,
            OracleMode::FrozenAdvection => -frozen[j] * (u[jp] - u[jm]) * inv_2dx,
        };
        out[j] = adv + nu * (u[jp] - 2.0 * u[j] + u[jm]) * inv_dx2;
    }
}

/// March the selected equation to `t_end`.
///
/// The step size adapts to the current field through the CFL limit and the
/// final step is clipped to land exactly on `t_end`. A non-finite field
/// aborts with [`Error::Instability`].
pub fn solve_burgers(cfg: &OracleConfig) -> Result<OracleRun> {
    cfg.validate()?;
    let n = cfg.n;
    let dx = 1.0 / n as f64;
    let mut u = initial_field(cfg);
    let frozen = u.clone();
    let mean0 = mat::mean(&u);
    let energy_initial = mat::pairwise_map_sum(&u, |v| v * v) / n as f64;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut mid = vec![0.0; n];
    let mut t = 0.0;
    let mut steps = 0u64;
    let dt_diff = dx * dx / (2.0 * cfg.nu);
    while t < cfg.t_end {
        let vmax = u.iter().fold(0.0f64, |m, &v| m.max(fmath::abs(v)));
        let dt_adv = if vmax > 0.0 { dx / vmax } else { f64::INFINITY };
        let mut dt = cfg.cfl * dt_adv.min(dt_diff);
        if t + dt >= cfg.t_end {
            dt = cfg.t_end - t;
        }
        if dt <= 0.0 {
            break; // t_end reached within float resolution
        }
        // Heun: u* = u + Δt L(u); u ← u + Δt/2 (L(u) + L(u*)).
        rhs(cfg.mode, &u, &frozen, cfg.nu, dx, &mut k1);
        for j in 0..n {
            mid[j] = u[j] + dt * k1[j];
        }
        rhs(cfg.mode, &mid, &frozen, cfg.nu, dx, &mut k2);
        for j in 0..n {
            u[j] += 0.5 * dt * (k1[j] + k2[j]);
        }
        t += dt;
        steps += 1;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Instability {
                detail: alloc::format!("field became non-finite at step {steps}, t = {t:.6e}"),
            });
        }
    }

    let energy_final = mat::pairwise_map_sum(&u, |v| v * v) / n as f64;
    let mean_drift = mat::mean(&u) - mean0;
    Ok(OracleRun {
        snapshot: FieldSnapshot {
            t: cfg.t_end,
            x: (0..n).map(|j| j as f64 * dx).collect(),
            u,
        },
        steps,
        mean_drift,
        energy_initial,
        energy_final,
    })
}

/// Exact heat-equation solution for the sine initial condition,
/// `sin(2πx) · exp(−4π²νt)`; the diffusion-only oracle converges to it.
pub fn heat_exact(x: f64, t: f64, nu: f64) -> f64 {
    fmath::sin(2.0 * fmath::PI * x) * fmath::exp(-4.0 * fmath::PI * fmath::PI * nu * t)
}

/// Relative L2 error `‖candidate − reference‖₂ / ‖reference‖₂`.
pub fn relative_l2_error(candidate: &[f64], reference: &[f64]) -> Result<f64> {
    if candidate.len() != reference.len() {
        return Err(Error::ShapeMismatch {
            layer: 0,
            detail: alloc::format!(
                "field lengths differ: {} vs {}",
                candidate.len(),
                reference.len()
            ),
        });
    }
    if reference.is_empty() {
        return Err(Error::DegenerateInput {
            detail: alloc::string::String::from("empty reference field"),
        });
    }
    let num: f64 = mat::pairwise_map_sum(
        &candidate
            .iter()
            .zip(reference)
            .map(|(&a, &b)| a - b)
            .collect::<Vec<_>>(),
        |d| d * d,
    );
    let den: f64 = mat::pairwise_map_sum(reference, |v| v * v);
    if den == 0.0 {
        return Err(Error::DegenerateInput {
            detail: alloc::string::String::from("reference field has zero norm"),
        });
    }
    Ok(fmath::sqrt(num / den))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NU: f64 = 0.01 / fmath::PI;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
    }

    #[test]
    fn diffusion_matches_closed_form() {
        let cfg = OracleConfig {
            n: 128,
            nu: NU,
            t_end: 0.1,
            cfl: 0.4,
            mode: OracleMode::DiffusionOnly,
            initial: InitialCondition::Sin2Pi,
        };
        let run = solve_burgers(&cfg).unwrap();
        let exact: Vec<f64> = run
            .snapshot
            .x
            .iter()
            .map(|&x| heat_exact(x, 0.1, NU))
            .collect();
        let err = max_abs_diff(&run.snapshot.u, &exact);
        assert!(err < 1e-5, "max error {err}");
    }

    #[test]
    fn diffusion_second_order_convergence() {
        let err_at = |n: usize| {
            let cfg = OracleConfig {
                n,
                nu: NU,
                t_end: 0.05,
                cfl: 0.4,
                mode: OracleMode::DiffusionOnly,
                initial: InitialCondition::Sin2Pi,
            };
            let run = solve_burgers(&cfg).unwrap();
            let exact: Vec<f64> = run
                .snapshot
                .x
                .iter()
                .map(|&x| heat_exact(x, 0.05, NU))
                .collect();
            max_abs_diff(&run.snapshot.u, &exact)
        };
        let (e1, e2) = (err_at(64), err_at(128));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order} (errors {e1}, {e2})");
    }

    #[test]
    fn full_mode_conserves_mean_and_dissipates_energy() {
        let run = solve_burgers(&OracleConfig::burgers(256, 0.3)).unwrap();
        assert!(
            run.mean_drift.abs() < 1e-13,
            "mean drift {}",
            run.mean_drift
        );
        assert!(run.energy_final <= run.energy_initial);
        assert!(run.energy_final > 0.0, "field should not be fully damped");
    }

    #[test]
    fn diffusion_mode_dissipates_energy_monotonically() {
        let mut prev = f64::INFINITY;
        for &t in &[0.0, 0.05, 0.1, 0.2] {
            let cfg = OracleConfig {
                mode: OracleMode::DiffusionOnly,
                ..OracleConfig::burgers(128, t)
            };
            let run = solve_burgers(&cfg).unwrap();
            assert!(run.energy_final <= prev + 1e-15);
            prev = run.energy_final;
        }
    }

    #[test]
    fn frozen_advection_close_to_full_at_short_time() {
        let full = solve_burgers(&OracleConfig::burgers(256, 0.01)).unwrap();
        let frozen = solve_burgers(&OracleConfig {
            mode: OracleMode::FrozenAdvection,
            ..OracleConfig::burgers(256, 0.01)
        })
        .unwrap();
        let err = relative_l2_error(&frozen.snapshot.u, &full.snapshot.u).unwrap();
        assert!(err < 2e-2, "frozen vs full rel error {err}");
    }

    #[test]
    fn t_end_zero_returns_initial_field() {
        let run = solve_burgers(&OracleConfig::burgers(64, 0.0)).unwrap();
        assert_eq!(run.steps, 0);
        for (j, &u) in run.snapshot.u.iter().enumerate() {
            assert_eq!(u, fmath::sin(2.0 * fmath::PI * j as f64 / 64.0));
        }
    }

    #[test]
    fn constant_field_is_a_fixed_point() {
        let cfg = OracleConfig {
            initial: InitialCondition::Custom(vec![0.7; 64]),
            ..OracleConfig::burgers(64, 0.2)
        };
        let run = solve_burgers(&cfg).unwrap();
        assert!(run.snapshot.u.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn sharpening_then_decay_around_shock_time() {
        // The viscous shock at x = 1/2 steepens until t ≈ 1/(2π); energy keeps
        // decaying throughout and the profile stays odd-symmetric about 1/2.
        let run = solve_burgers(&OracleConfig::burgers(512, 0.5)).unwrap();
        let u = &run.snapshot.u;
        let n = u.len();
        for j in 1..n / 2 {
            let err = (u[j] + u[n - j]).abs();
            assert!(err < 1e-10, "odd symmetry violated at {j}: {err}");
        }
        assert!(run.energy_final < run.energy_initial * 0.9);
    }

    #[test]
    fn blow_up_is_detected() {
        let huge: Vec<f64> = (0..32)
            .map(|j| 1e154 * fmath::sin(2.0 * fmath::PI * j as f64 / 32.0))
            .collect();
        let cfg = OracleConfig {
            initial: InitialCondition::Custom(huge),
            ..OracleConfig::burgers(32, 1.0)
        };
        match solve_burgers(&cfg) {
            Err(Error::Instability { .. }) => {}
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(solve_burgers(&OracleConfig::burgers(2, 0.1)).is_err());
        let mut bad = OracleConfig::burgers(64, 0.1);
        bad.cfl = 0.0;
        assert!(solve_burgers(&bad).is_err());
        bad = OracleConfig::burgers(64, 0.1);
        bad.nu = -1.0;
        assert!(solve_burgers(&bad).is_err());
        bad = OracleConfig::burgers(64, 0.1);
        bad.initial = InitialCondition::Custom(vec![0.0; 8]);
        assert!(solve_burgers(&bad).is_err());
        bad = OracleConfig::burgers(64, 0.1);
        bad.initial = InitialCondition::Custom(vec![f64::NAN; 64]);
        assert!(solve_burgers(&bad).is_err());
    }

    #[test]
    fn relative_l2_hand_values() {
        let e = relative_l2_error(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((e - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(relative_l2_error(&[1.0], &[1.0]).unwrap(), 0.0);
        assert!(relative_l2_error(&[1.0], &[1.0, 2.0]).is_err());
        assert!(relative_l2_error(&[1.0], &[0.0]).is_err());
    }
}
