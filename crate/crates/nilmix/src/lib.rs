//! Verification laboratory for mixing properties of commuting automorphism
//! actions on tori and Heisenberg nilmanifolds.
//!
//! The crate computes the spectral and Diophantine quantities attached to a
//! commuting family of lattice automorphisms exactly or with certified
//! interval enclosures, and checks mixing and cocycle-rigidity statements at
//! desk scale: exact Fourier correlation oracles on tori, Monte-Carlo
//! estimation on the Heisenberg nilmanifold, and exact linear algebra for
//! coboundary equations.
//!
//! Module map:
//!
//! - [`exact`]: integer matrices and polynomials, certified root enclosures,
//!   number fields with certified embeddings.
//! - [`spectrum`]: characters of a `Z^l`-action, Galois orbits, the Lyapunov
//!   functional, growth constants, ergodicity and Anosov certificates.
//! - [`dioph`]: heights, lower bounds for linear forms in logarithms, and
//!   brute-force S-unit inequality searches.
//! - [`toral`]: trigonometric polynomials and the exact multi-correlation
//!   oracle on `T^d`, separation statistics, decay fitting.
//! - [`heis`]: the polarized Heisenberg nilmanifold, lattice-preserving
//!   automorphisms, seeded Monte-Carlo correlation, box-map dichotomy tests.
//! - [`cocycle`]: Fourier-side coboundary solving and the rank-2 rigidity
//!   pipeline.

pub mod cocycle;
pub mod dioph;
pub mod error;
pub mod exact;
pub mod heis;
pub mod json;
pub mod spectrum;
pub mod toral;

pub use error::{Error, Result};
