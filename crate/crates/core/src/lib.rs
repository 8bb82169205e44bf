//! Precision bounds for quantum-detector characterisation.
//!
//! The crate computes the detector Fisher information of a parametrized
//! POVM in its trace, spectral, and extended (tight) forms, multi-parameter
//! Cramér-Rao bounds, optimal probe states and their attainability, and
//! verifies everything against brute-force Fisher-information maximization
//! and Monte Carlo estimation experiments.
//!
//! Module map:
//! - [`linalg`] — dense complex-matrix kernels (eigendecomposition, PSD
//!   functions, Kronecker/vectorisation, real embedding);
//! - [`models`] — registry of named parametrized detector (POVM) families
//!   plus random-model generation;
//! - [`sld`] — per-outcome symmetric-logarithmic-derivative solvers and the
//!   information operator Q;
//! - [`fisher`] — classical/quantum Fisher quantities, probe optimization,
//!   attainability and ordering checks, closed-form multi-parameter bounds;
//! - [`sdp`] — a small dense semidefinite-program solver and the SDP-based
//!   bounds (extended detector information, spectral QCRB, ensemble CCRB*);
//! - [`multicopy`] — n-copy information operators and scaling checks;
//! - [`geometry`] — Bures distance between POVMs and convexity harnesses;
//! - [`montecarlo`] — estimator simulation with bootstrap error bars;
//! - [`cli`] — command-line front-end emitting CSV/JSON reports.

pub mod cli;
pub mod error;
pub mod fisher;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod montecarlo;
pub mod multicopy;
pub mod optim;
pub mod sdp;
pub mod sld;

pub use error::{Error, Result};
pub use linalg::{C64, CMatrix, CVector, RMatrix, RVector};
