//! Sampling and spectral statistics for ensembles of random normal matrices
//! with radial weight `exp(-N Tr V(M†M))`.
//!
//! The crate is organized as a pipeline:
//!
//! * [`potentials`] defines the confining potential `V(|z|²)`;
//! * [`analytic`] evaluates large-N and finite-N predictions;
//! * [`sampler`] draws eigenvalue configurations by Metropolis Monte Carlo;
//! * [`qmaps`] builds dissipative kicked-rotor and random-matrix Floquet
//!   operators and diagonalizes them;
//! * [`stats`] estimates densities, spacing laws and two-point functions
//!   from either source;
//! * [`io`] writes the CSV and binary artifacts.
//!
//! Independent chains and ensemble members run through [`par`], which uses
//! rayon when the `parallel` feature is enabled.

pub mod analytic;
pub mod error;
pub mod io;
pub mod par;
pub mod potentials;
pub mod qmaps;
pub mod quad;
pub mod rng;
pub mod sampler;
pub mod stats;

mod linalg;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use potentials::{Potential, PotentialKind, Walls};
pub use stats::{Provenance, Spectrum};
