//! Geodesics of the canonical sub-Riemannian structure on the space of
//! k-jets of real functions of one real variable.
//!
//! The jet space `J^k` is coordinatized by `(x, u_k, ..., u_1, y)` and framed
//! by two horizontal vector fields; declaring them orthonormal yields a
//! Carnot-group sub-Riemannian metric whose geodesic flow is integrable.
//! This crate implements that flow and the structures that make it
//! integrable:
//!
//! * [`jet`] — domain types for points, momenta and the horizontal frame;
//! * [`poly`] — exact-coefficient univariate polynomials;
//! * [`poisson`] — the Lie-Poisson tensor, its rank stratification and the
//!   k Casimir invariants with a bracket-annihilation validator;
//! * [`dynamics`] — the reduced momentum equations and their adaptive
//!   Runge-Kutta integration with invariant-drift diagnostics;
//! * [`synthesis`] — building a geodesic from a prescribed curvature
//!   polynomial `kappa = p(x)`;
//! * [`analysis`] — band decomposition of `F^{-1}([-1,1])`, motion
//!   classification, period/shift/action integrals and curvature fitting;
//! * [`gallery`] — named curve families (convict curves, geodesic graphs,
//!   the classic elastica trio).
//!
//! The crate is `no_std`-compatible (`alloc` required): build with
//! `--no-default-features --features libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
mod error;
mod fp;
pub mod gallery;
pub mod jet;
pub mod poisson;
pub mod poly;
pub mod synthesis;

pub use error::Error;
pub use jet::{
    hamiltonian, horizontal_velocity, power_functions, project_plane, CanonicalMomenta, JetDim,
    JetPoint, JetTangent, PlanarPoint, ReducedMomenta,
};
pub use poly::Polynomial;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
