//! Numerical laboratory for fermionic mean-field dynamics with singular
//! inverse-power-law interactions `|x|^{-alpha}`, `alpha in (0, 1]`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] periodic grids, complex fields, spectral transforms and
//!   dense/low-rank one-particle operators with Schatten norms.
//! * [`potentials`] the regularized grid potential, FFT convolution and the
//!   Gaussian-window (Fefferman–de la Llave type) radial representation.
//! * [`hf`] time-dependent Hartree–Fock propagation of Slater states.
//! * [`semiclassics`] commutator diagnostics, maximal functions and the
//!   commutator trace-bound audit.
//! * [`fock`] exact finite-mode fermionic Fock space.
//! * [`fewbody`] exact antisymmetric N-body propagation for N = 2, 3.
//! * [`energy`] kinetic-energy / potential-energy inequality audits.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod fewbody;
pub mod fock;
pub mod hf;
pub mod lattice;
pub mod potentials;
pub mod semiclassics;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
