//! Joint-eigenspace Fourier transform on rank-one hyperbolic spaces.
//!
//! The crate realizes the hyperbolic plane `H²` and hyperbolic 3-space `H³`
//! in the unit-ball model and implements, as quadrature operators:
//!
//! * the spherical functions `φ_λ` and the Plancherel density,
//! * the Harish-Chandra spherical transform of radial functions,
//! * the Helgason Fourier transform `f̃(λ, b)` and its inverse,
//! * the Poisson transform of boundary functions,
//! * the joint-eigenspace transform `f^△(λ, x) = (f × φ_λ)(x)`, both directly
//!   and as the Poisson transform of the Helgason transform,
//!
//! together with a finite-difference Laplace–Beltrami operator and a harness
//! ([`verify`]) that measures every identity tying these objects together.

// `!(x < y)` is how NaN gets rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod operators;
pub mod specfun;
pub mod testfns;
pub mod transforms;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BoundaryPoint, Model, ModelParams, Point, QuadratureGrid, SpectralParam};
