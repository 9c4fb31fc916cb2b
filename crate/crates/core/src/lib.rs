//! Distances on metric-valued responses and Fréchet sufficient dimension
//! reduction.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be
//! embedded anywhere; file formats, the experiment runner and the CLI live
//! in the `frechet-sdr-bench` companion crate.
//!
//! Module map:
//!
//! - [`matfun`]: Cholesky, symmetric eigendecomposition, spectral
//!   `logm`/`expm`, pool-adjacent-violators.
//! - [`metrics`]: ℓ1/ℓ2/Mahalanobis, Wasserstein, Hellinger, Frobenius
//!   variants, centrality and diffusion graph distances, and the pairwise
//!   [`metrics::DistanceMatrix`] builder.
//! - [`sdr`]: surrogate responses (random projections, Gaussian kernel) and
//!   the FOLS / FSIR / sa-OLS / sa-SIR estimators, plus the subspace error.
//! - [`frechet_wass`]: global Fréchet regression for distributional
//!   responses and the leave-one-out prediction error.
//! - [`simgen`]: seeded generators for the predictor law and response
//!   models I–XI.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod frechet_wass;
pub mod linalg;
pub mod matfun;
mod math;
pub mod metrics;
pub mod rng;
pub mod sdr;
pub mod simgen;

pub use error::{Error, Result};
pub use linalg::Matrix;
