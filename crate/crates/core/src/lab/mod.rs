//! The analytical counterpoint to the trained networks: Gaussian-derivative
//! kernels and the Burgers kernel matrix (a weight matrix *constructed* to
//! implement the PDE), the relaxation dynamical system whose ω=1 step is
//! exactly a feed-forward layer, and Boltzmann path-composition checks.
//!
//! Everything here is deterministic closed-form construction — the structured
//! side of the structured-vs-random contrast that the forensics battery
//! quantifies.

mod kernels;
mod paths;
mod relaxation;

pub use kernels::{
    burgers_kernel_matrix, derivative_kernels, derivative_matrices, gaussian_kernel, KernelSpec,
    TRUNCATION_RADII,
};
pub use paths::{
    boltzmann_path_composition, matrix_contrast, path_count, transformer_vs_boltzmann_contrast,
    BoltzmannComposition, ContrastLayer, ContrastReport,
};
pub use relaxation::{relaxation_step, simulate_relaxation, RelaxationRun, RelaxationState};
