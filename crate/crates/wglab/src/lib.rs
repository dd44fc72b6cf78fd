//! Spectral laboratory for the free Schrödinger propagator on mixed
//! domains `R^m x T^n_lambda` (Euclidean directions crossed with rescaled
//! tori), built around the weighted frequency lattice `R^m x Z^n_{1/lambda}`.
//!
//! The crate provides:
//!
//! * discretized Fourier analysis with the `2*pi` kernel convention and the
//!   `(d xi)_lambda` frequency measure ([`geometry`], [`field`]);
//! * dyadic Littlewood-Paley projections and the unitary propagator
//!   ([`lp`], [`propagator`]);
//! * bilinear space-time `L^2` norms, the `L^4` Strichartz norm, and the
//!   predicted constants `K(lambda, N1, N2)` ([`bilinear`]);
//! * a sparse-mode evaluator with an exact-in-time kernel for large sweeps
//!   ([`modes`]) and a separable-field evaluator for wave-packet data
//!   ([`separable`]);
//! * the paraboloid-shell measure/counting machinery ([`counting`]);
//! * sharpness wave packets and the global-in-time failure demo
//!   ([`extremizers`]);
//! * a split-step NLS solver with the smoothing multiplier `I_N` and
//!   modified-energy increment experiments ([`imethod`]);
//! * small least-squares helpers for scaling fits ([`fit`]).
//!
//! All operations are pure; fields are immutable after construction and safe
//! to share across workers. The `parallel` feature (default) dispatches batch
//! work through rayon; with it disabled every code path runs sequentially
//! with identical results.

pub mod bilinear;
pub mod counting;
pub mod cutoff;
pub mod error;
pub mod extremizers;
pub mod field;
pub mod fit;
pub mod fourier;
pub mod geometry;
pub mod imethod;
pub mod lp;
pub mod modes;
pub mod par;
pub mod propagator;
pub mod rng;
pub mod separable;

pub use error::LabError;
pub use field::{Domain, SpectralField};
pub use geometry::Geometry;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LabError>;
