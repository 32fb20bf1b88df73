//! Numerical and combinatorial verification toolkit for the zeros of
//! eigenfunctions of even-polynomial anharmonic oscillators
//! `−y″ + P(z) y = λ y`.
//!
//! The crate is organised bottom-up:
//!
//! * [`polynomial`]: even potentials, the QES sextic family, Stokes rays.
//! * [`ode`]: Taylor-series transport of solutions in the complex plane.
//! * [`spectrum`]: shooting eigenvalue solver with certified indices.
//! * [`zeros`]: axis scans and argument-principle zero censuses.
//! * [`qes`]: closed-form eigenpairs of the QES sextics.
//! * [`asymptotics`]: asymptotic values of `y/y₁` in Stokes sectors.
//! * [`trees`]: symmetric planar trees and line complexes.
//! * [`cli`]: verification runs with JSON/CSV artifacts.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod ode;
pub mod polynomial;
pub mod qes;
pub mod spectrum;
pub mod trees;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ode::{OdeState, Parity, Propagator};
pub use polynomial::{parse_potential, qes_potential, stokes, EvenPolynomial, StokesGeometry};
