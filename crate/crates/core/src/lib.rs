//! Wideband signal localization toolkit.
//!
//! The crate covers the whole localization loop for wideband RF captures:
//!
//! - [`waveforms`]: band-layout synthesis of multi-signal baseband records,
//!   AWGN injection at a target SNR, and SigMF (`ci16_le`) record I/O.
//! - [`radiometer`]: a block channelized radiometer, histogram-bootstrapped
//!   Gaussian noise fit and a single CFAR threshold.
//! - [`clustering`]: rectangle-growing density clustering of decision masks,
//!   connected-components labelling, and precision repair filters.
//! - [`metrics`]: time-frequency IoU, greedy one-to-one matching, SNR sweeps
//!   and the SGM1 mask interchange format.
//! - [`cli`]: the `speclocate` command line (generate, detect, score-masks,
//!   evaluate) driven by a JSON run configuration.
//!
//! ```text
//! samples -> channelize_integrate -> histogram -> noise fit -> CFAR mask
//!         -> cluster_spectrogram | connected_components -> filters -> boxes
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod pipeline;
pub mod radiometer;
pub mod seeds;
pub mod waveforms;

pub use error::{Error, Result};
pub use exec::Exec;

/// Complex baseband sample type used throughout the crate.
pub type Sample = num_complex::Complex64;
