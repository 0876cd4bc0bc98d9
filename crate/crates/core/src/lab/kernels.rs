//! Gaussian smoothing kernel, its derivative kernels, and the discretized
//! Burgers weight kernel — a weight matrix built directly from the PDE.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::mat::Mat;

/// Quadrature truncation: kernel support is cut at `|r| ≤ TRUNCATION_RADII·h`.
/// The discarded Gaussian mass is below 1e-14.
pub const TRUNCATION_RADII: f64 = 8.0;

/// The smoothing kernel `g_h(r) = exp(−r²/2h²) / (√(2π)·h)`.
///
/// Requires `h > 0`; symmetric in `r`.
pub fn gaussian_kernel(r: f64, h: f64) -> f64 {
    debug_assert!(h > 0.0, "gaussian_kernel needs h > 0");
    let s = r / h;
    fmath::exp(-0.5 * s * s) / (fmath::sqrt(2.0 * core::f64::consts::PI) * h)
}

/// First- and second-derivative kernels at finite smoothing width:
/// `W1(r) = −(r/h²)·g_h(r)` and `W2(r) = ((r² − h²)/h⁴)·g_h(r)`.
///
/// Quadrature against a field at source offsets `r = x_target − x_source`
/// approximates `f′` and `f″`; the `h → 0` limits of the continuous theory
/// are realized as `h`-refinement studies.
pub fn derivative_kernels(r: f64, h: f64) -> (f64, f64) {
    let g = gaussian_kernel(r, h);
    let h2 = h * h;
    (-(r / h2) * g, ((r * r - h2) / (h2 * h2)) * g)
}

/// Discretization context for kernel matrices on the periodic unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    /// Number of uniform grid nodes `x_i = i/n` on `[0, 1)`.
    pub n: usize,
    /// Smoothing width (absolute units; `h ≥ 2Δx` for resolvability).
    pub h: f64,
    /// Viscosity ν.
    pub nu: f64,
    /// Frozen external field `u(x_i)` entering the advection term.
    pub u_field: Vec<f64>,
}

impl KernelSpec {
    /// Spec with `h` given in grid spacings and a frozen field sampled from
    /// a closure.
    pub fn on_unit_grid(n: usize, h_over_dx: f64, nu: f64, u: impl Fn(f64) -> f64) -> Self {
        let u_field = (0..n).map(|i| u(i as f64 / n as f64)).collect();
        KernelSpec {
            n,
            h: h_over_dx / n as f64,
            nu,
            u_field,
        }
    }

    /// Grid spacing `Δx = 1/n`.
    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Grid nodes `x_i = i/n`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 / self.n as f64).collect()
    }

    /// Check the invariants shared by all kernel constructions.
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::config("n", "kernel grid needs at least 4 nodes"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::config("h", "smoothing width must be positive"));
        }
        if !self.nu.is_finite() {
            return Err(Error::config("nu", "viscosity must be finite"));
        }
        if self.u_field.len() != self.n {
            return Err(Error::ShapeMismatch {
                layer: 0,
                detail: format!(
                    "u_field has {} entries for an n={} grid",
                    self.u_field.len(),
                    self.n
                ),
            });
        }
        if self.u_field.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput {
                detail: alloc::string::String::from("u_field contains non-finite entries"),
            });
        }
        Ok(())
    }

    fn require_resolvable(&self) -> Result<()> {
        self.validate()?;
        if self.h < 2.0 * self.dx() {
            return Err(Error::config(
                "h",
                format!(
                    "smoothing width {} is under-resolved: need h ≥ 2Δx = {}",
                    self.h,
                    2.0 * self.dx()
                ),
            ));
        }
        Ok(())
    }
}

/// Signed minimal-image offset on the periodic unit interval.
fn minimal_image(r: f64) -> f64 {
    let mut r = r - fmath::floor(r + 0.5);
    // Guard the boundary case r = −0.5 mapping to +0.5.
    if r < -0.5 {
        r += 1.0;
    }
    r
}

/// Quadrature matrix of one radial kernel on the periodic grid:
/// `M[i][j] = Δx · k(x_i − x_j)` with minimal-image offsets, truncated at
/// `|r| ≤ TRUNCATION_RADII·h`.
fn kernel_matrix(spec: &KernelSpec, k: impl Fn(f64) -> f64) -> Mat {
    let n = spec.n;
    let dx = spec.dx();
    let cutoff = TRUNCATION_RADII * spec.h;
    // The kernel value depends only on (i − j) mod n: tabulate one period.
    let mut table = Vec::with_capacity(n);
    for d in 0..n {
        let r = minimal_image(d as f64 * dx);
        table.push(if fmath::abs(r) <= cutoff { dx * k(r) } else { 0.0 });
    }
    Mat::from_fn(n, n, |i, j| table[(n + i - j) % n])
}

/// First- and second-derivative quadrature matrices (`W1`, `W2` rows scaled
/// by `Δx`): applying them to a smooth periodic field approximates `f′` and
/// `f″` with `O(h²)` bias.
pub fn derivative_matrices(spec: &KernelSpec) -> Result<(Mat, Mat)> {
    spec.require_resolvable()?;
    let h = spec.h;
    Ok((
        kernel_matrix(spec, |r| derivative_kernels(r, h).0),
        kernel_matrix(spec, |r| derivative_kernels(r, h).1),
    ))
}

/// The Burgers weight kernel `W_Bur(x, r) = −u(x)·W1(r) + ν·W2(r)`,
/// discretized so that row `i` holds the quadrature weights at target `x_i`.
///
/// Applying the matrix to a smooth periodic field `f` approximates the
/// frozen-field Burgers operator `−u·f′ + ν·f″`.
pub fn burgers_kernel_matrix(spec: &KernelSpec) -> Result<Mat> {
    spec.require_resolvable()?;
    let (m1, m2) = derivative_matrices(spec)?;
    Ok(Mat::from_fn(spec.n, spec.n, |i, j| {
        -spec.u_field[i] * m1.get(i, j) + spec.nu * m2.get(i, j)
    }))
}
