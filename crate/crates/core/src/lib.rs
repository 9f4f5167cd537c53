//! Numerical laboratory for the electromagnetic field at spatial infinity.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: Minkowski vectors, the unit de Sitter 3-hyperboloid, Lorentz matrices.
//! * [`sphere`]: S² quadrature and spherical harmonics.
//! * [`desitter`]: wave operator and Klein–Gordon normalised modes on the hyperboloid.
//! * [`classical`]: Coulomb, Bremsstrahlung and retarded potentials, homogeneous
//!   parts, and the mode decomposition of the induced phase field.
//! * [`fock`]: truncated charge ⊗ boson Fock space and its operator algebra.
//! * [`spectral`]: spectral U(1) checks and charge universality.
//! * [`cone`]: SL(2,C) acting on homogeneous functions on the light cone.
//! * [`testspaces`]: S⁰/S⁰⁰ test functions, moments and cone support checks.
//! * [`cli`]: the pipelines behind the `spatial-infinity` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classical;
pub mod cli;
pub mod cone;
pub mod config;
pub mod desitter;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod io;
pub mod ode;
pub mod quadrature;
pub mod spectral;
pub mod sphere;
pub mod testspaces;

pub use error::{Error, Result};
pub use geometry::{embed, FourVector, HyperboloidPoint, LorentzMatrix};
pub use num_complex::Complex64;
