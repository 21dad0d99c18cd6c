//! Total-variation inpainting on the sphere.
//!
//! This crate holds the numerical core and builds without `std` (it needs
//! `alloc`). It provides
//!
//! * the MW and DH equiangular sampling grids with their quadrature weights
//!   ([`grid`]),
//! * Wigner small-d matrices at π/2 ([`wigner`]),
//! * fast MW spherical harmonic transforms, their adjoints, and direct DH
//!   transforms ([`harmonic`]),
//! * finite-difference gradients and the discrete TV norm on the sphere
//!   ([`gradient`]),
//! * proximity operators, operator-norm estimation and a Douglas-Rachford
//!   driver ([`prox`]),
//! * the random-masking measurement model, the spatial and harmonic inpainting
//!   solvers and the fidelity metrics ([`inpaint`]).
//!
//! FFTs are abstracted behind [`fft::Fft`]; the crate ships a direct DFT so it
//! works standalone, and callers with `std` can plug in a faster backend.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fft;
pub mod gradient;
pub mod grid;
pub mod harmonic;
pub mod inpaint;
pub mod linalg;
pub mod prox;
pub mod rng;
pub mod special;
pub mod wigner;

pub use error::{Error, Result};

pub use grid::{QuadratureWeights, SamplingScheme, SphereGrid, SphereImage};
pub use harmonic::{DhTransform, HalfCoeffs, HarmonicCoeffs, HarmonicTransform, MwTransform};
pub use num_complex::Complex64;
pub use wigner::DeltaTable;
