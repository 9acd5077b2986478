//! Series solutions and observability certificates for the 1-D wave
//! equation on a domain whose right endpoint moves slower than the waves.
//!
//! The pipeline:
//!
//! 1. [`boundary`] describes the endpoint curve s(t) and its characteristic
//!    maps (alpha, beta, and the return map gamma).
//! 2. [`abel`] produces a phase function phi solving
//!    phi(t + s(t)) - phi(t - s(t)) = 1, either in closed form for the
//!    built-in families or constructively for sampled curves, always with an
//!    a-posteriori residual certificate.
//! 3. [`wave`] folds initial data into a profile on [-1, 1], expands it in
//!    the weighted exponential basis e^{2 pi i n phi}, and evaluates the
//!    resulting series solution, its derivatives, and its energy.
//! 4. [`observability`] integrates boundary/interior/moving-sensor traces
//!    and compares them against the two-sided bounds produced from the
//!    extrema of phi', yielding pass/fail reports with live constants.
//!
//! Heavy inner loops (per-mode quadratures, certification grids, Gram
//! assembly) are data-parallel via rayon under the default `parallel`
//! feature and run sequentially without it.

pub mod abel;

pub mod boundary;
pub mod config;
pub mod error;
pub mod observability;
pub mod par;
pub mod quad;
pub mod rootfind;
pub mod spline;
pub mod suite;
pub mod wave;

pub use error::{Error, Result};
