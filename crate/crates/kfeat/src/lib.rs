//! Explicit finite-dimensional feature maps for the Gaussian kernel —
//! truncated-series monomial features, random Fourier features, and exact
//! polynomial-kernel features — together with a Pegasos-style linear SVM
//! that computes features on the fly, a shared flop cost model, an
//! optimality-gap sandwich check against an exact-kernel solver, and
//! numerical verification of the kernel's Hermite eigen-expansion.
//!
//! Everything is deterministic given a seed: randomness comes from
//! [`rng::PortableRng`], a fixed-stream generator whose output does not
//! depend on platform or library version.

pub mod analysis;
pub mod data;
mod error;
pub mod features;
pub mod fourier;
pub mod hermite;
pub mod polynomial;
pub mod rng;
pub mod svm;
pub mod taylor;

pub use error::{Error, Result};
