//! Numerical core for two-slit interference and which-way information.
//!
//! The crate is `no_std` with `alloc`; every routine here is a pure function
//! over immutable values. IO, configuration files and the CLI live in the
//! `whichway` companion crate.
//!
//! Layout:
//!
//! - [`spin`]: spin-1/2 interferometer with branch tracking.
//! - [`frame`]: randomized checker for the shared-dark-component overlap theorem.
//! - [`grid`], [`field`], [`fft`], [`wavepacket`]: 1D Gaussian two-slit wave packets,
//!   closed-form and spectral free propagation.
//! - [`optics`]: dark-fringe location, wire masks, thin lens, detectors, mode analysis.
//! - [`metrics`]: visibility, distinguishability, mutual information.
//! - [`scenario`]: end-to-end pipelines (afshar, single slit, wheeler, spin toy, theorem check).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod field;
pub mod frame;
pub mod grid;
pub mod metrics;
pub mod optics;
pub mod scenario;
pub mod spin;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
