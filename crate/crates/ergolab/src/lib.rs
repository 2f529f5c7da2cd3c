//! ergolab: an exact-arithmetic laboratory for measure-preserving systems.
//!
//! The crate represents sets, observables, and transformations with
//! arbitrary-precision rationals, so recurrence averages, correlation
//! defects, joining functionals, and progression counts come out exact
//! wherever the mathematics is exact; floating point enters only through
//! square roots of rational L2 norms and in reported real-valued series.
//!
//! Module map:
//! - [`measure`], [`observable`]: rational interval sets, step functions,
//!   trigonometric polynomials.
//! - [`systems`]: identity, cyclic shift, rotation, torus automorphism,
//!   product, and Chacon's rank-one tower, with exact set and Koopman
//!   actions.
//! - [`averages`]: Cesàro multicorrelation sweeps and the recurrence
//!   positivity certificate.
//! - [`spectral`]: Koopman matrices, the projection onto the span of
//!   unit-modulus eigenfunctions, correlation-decay diagnostics, and
//!   continued-fraction return bounds.
//! - [`joinings`]: empirical multilinear joining functionals and their
//!   invariance defects.
//! - [`progressions`]: 3-term arithmetic-progression counting and its
//!   exact identity with cyclic recurrence averages.
//! - [`verify`]: the named verification suites run by the CLI.

pub mod averages;
pub mod error;
pub mod joinings;
pub mod measure;
pub mod observable;
pub mod progressions;
pub mod rat;
pub mod spectral;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
