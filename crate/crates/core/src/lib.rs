//! Physics-informed state-space recurrent forecasting for indoor CO₂.
//!
//! The crate bundles:
//!
//! - [`numerics`]: row-vector linear algebra and a reverse-mode tape,
//! - [`decompose`]: moving-average trend/seasonal split,
//! - [`model`]: the PI-SRNN cell and the decomposed PIAD-SRNN forecaster,
//! - [`baselines`]: persistence, Linear, DLinear and a tanh RNN,
//! - [`physics`]: a mass-balance CO₂ simulator for synthetic data,
//! - [`dataio`]: CSV frames, normalisation, splits and windows,
//! - [`train`]: losses, Adam, early-stopped training and gradient checks,
//! - [`evalsuite`]: horizon metrics, gap imputation and IQR event scoring,
//! - [`cli`]: the `co2cast` command line.
//!
//! See `examples/` for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod dataio;
pub mod decompose;
pub mod error;
pub mod evalsuite;
pub mod model;
pub mod numerics;
pub mod physics;
pub mod train;

pub use error::{Error, Result};
