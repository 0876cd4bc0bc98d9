//! Core numerics for the Burgers-PINN weight-forensics pipeline.
//!
//! The crate has three faces that deliberately share one set of domain types:
//!
//! * **Training** ([`net`], [`deriv`], [`grad`], [`pinn`]): a dense tanh
//!   network evaluated together with its first/second input derivatives, the
//!   physics-informed loss for the 1-D viscous Burgers equation, and a
//!   deterministic seeded optimizer producing [`dump::WeightDump`]s.
//! * **Forensics** ([`forensics`]): the statistical battery run on trained
//!   weight matrices — kernel density estimates, generalized-Gaussian fits,
//!   kurtosis, complex eigenspectra against the circular law, singular values
//!   against moment-matched Gaussian baselines, and band-energy structure
//!   probes.
//! * **Counterpoint** ([`lab`], [`oracle`]): the analytically structured
//!   objects the trained weights are contrasted with — Gaussian derivative
//!   kernels, the Burgers kernel matrix, the relaxation dynamical system that
//!   reproduces a feed-forward layer at `ω = 1`, Boltzmann path composition,
//!   and an independent finite-difference reference solver.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all I/O, file formats
//! and the command-line interface live in the companion `pinnspect-cli` crate.
//!
//! Determinism contract: every seeded entry point is a pure function of its
//! `(config, seed)` arguments. Floating-point reductions use fixed-order
//! pairwise summation, transcendental functions come from one software
//! implementation regardless of target features, and nothing reads clocks or
//! global state unless a [`pinn::Clock`] is explicitly supplied.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod deriv;
pub mod dump;
pub mod error;
pub mod fmath;
pub mod forensics;
pub mod grad;
pub mod lab;
pub mod mat;
pub mod net;
pub mod oracle;
pub mod pinn;
pub mod rng;

pub use error::{Error, Result};
