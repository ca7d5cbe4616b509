//! Block channelized radiometer with a histogram-bootstrapped CFAR threshold.
//!
//! Each radiometer step consumes `channels * integration` fresh samples:
//! `integration` back-to-back frames of `channels` samples go through a
//! unitary DFT and their `|X|^2` are summed per channel. Channel 0 is the
//! lowest frequency (-0.5 cycles/sample). Steps never share samples.
//!
//! The noise model comes from the statistics themselves: histogram (Rice
//! rule), mode bin `k`, Gaussian pulse pinned at the mode with height
//! `counts[k]`, width fitted over bins `[0, 2k)`, then a one-sided Gaussian
//! quantile at the false-alarm rate. By default the fit runs on the cube
//! root of the statistic, where the chi-square law of an energy detector is
//! close to Gaussian (Wilson-Hilferty); the threshold is mapped back to
//! statistic units.

mod channelize;
mod fit;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use channelize::{channelize_integrate, channelize_integrate_with};
pub use fit::{
    apply_threshold, build_statistic_histogram, cfar_threshold, fit_noise_gaussian, fit_noise_model,
    rice_bin_count, Histogram, MIN_HISTOGRAM_STATS,
};

/// Domain in which the histogram and Gaussian fit are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitDomain {
    /// Raw radiometer statistic.
    Raw,
    /// Cube root of the statistic.
    #[default]
    CubeRoot,
}

impl FitDomain {
    pub fn forward(self, x: f64) -> f64 {
        match self {
            FitDomain::Raw => x,
            FitDomain::CubeRoot => x.cbrt(),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            FitDomain::Raw => y,
            FitDomain::CubeRoot => y * y * y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiometerConfig {
    pub channels: usize,
    pub integration: usize,
    pub false_alarm_rate: f64,
    pub fit_domain: FitDomain,
}

impl Default for RadiometerConfig {
    fn default() -> Self {
        RadiometerConfig {
            channels: 256,
            integration: 2,
            false_alarm_rate: 0.05,
            fit_domain: FitDomain::CubeRoot,
        }
    }
}

impl RadiometerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.channels.is_power_of_two() || self.channels < 2 {
            return Err(Error::InvalidArgument(format!(
                "channels {} must be a power of two >= 2",
                self.channels
            )));
        }
        if self.integration == 0 {
            return Err(Error::InvalidArgument("integration must be >= 1".into()));
        }
        if !(self.false_alarm_rate > 0.0 && self.false_alarm_rate < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "false alarm rate {} outside (0, 0.5)",
                self.false_alarm_rate
            )));
        }
        Ok(())
    }

    /// Samples consumed per radiometer step.
    pub fn step_stride(&self) -> usize {
        self.channels * self.integration
    }
}

/// Radiometer output: `[steps x channels]` statistics and decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionGrid {
    pub stats: Array2<f64>,
    pub mask: Array2<bool>,
    pub step_stride_samples: usize,
}

impl DetectionGrid {
    pub fn steps(&self) -> usize {
        self.stats.nrows()
    }

    pub fn channels(&self) -> usize {
        self.stats.ncols()
    }
}

/// Fitted noise model. `mode_mu` and `sigma` live in `domain`; `threshold`
/// is in raw statistic units and feeds [`apply_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub mode_mu: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub histogram_bins: usize,
    pub fit_mse: f64,
    pub domain: FitDomain,
    pub false_alarm_rate: f64,
}
