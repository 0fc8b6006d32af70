//! Dynamical sampling on periodic signals.
//!
//! An unknown signal `f` evolves under a known convolution `f ↦ a ∗ f` and is
//! observed only on the coarse lattice `mℤ` at times `0..N−1`, optionally with
//! a few extra samples of `f` on shifted lattices `mnℤ + c`. This crate
//! assembles the per-frequency systems behind that measurement model, inverts
//! them, and checks the associated invertibility and stability estimates.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod reconstruct;
pub mod sis;
pub mod spectral;
pub mod stability;
pub mod system;

pub use error::{Error, Result};
