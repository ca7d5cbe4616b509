//! Multi-signal record synthesis, noise injection and SigMF I/O.
//!
//! A [`BandLayout`] is generated first (metadata), then each [`SignalBurst`]
//! is modulated at a native rate, resampled to its target bandwidth and
//! duration, mixed to its centre frequency and summed into the record.
//! Records are noise free; [`add_awgn`] adds receiver noise afterwards.
//!
//! SNR everywhere is the ratio of total-band powers, so an oversampled
//! signal reports a lower SNR than its in-band SNR.

mod layout;
mod modulate;
mod noise;
mod resample;
mod rrc;
mod sigmf;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use layout::{generate_layout, LayoutRanges};
pub use modulate::{constellation, cpfsk, modulate_burst, GMSK_BT, OFDM_CYCLIC_PREFIX, OFDM_FFT_SIZE};
pub use noise::{add_awgn, add_awgn_in_place, measure_snr, mean_power, snr_to_noise_std};
pub use resample::Resampler;
pub use rrc::design_rrc;
pub use sigmf::{read_sigmf, write_sigmf, Annotation, SigmfMeta, SigmfRecord, DATATYPE_CI16_LE};
pub use synth::{synthesize_record, synthesize_record_with};

/// Subcarrier count carried by every OFDM burst.
pub const OFDM_SUBCARRIERS: usize = 512;

/// The fourteen supported modulation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "PSK2")]
    Psk2,
    #[serde(rename = "PSK4")]
    Psk4,
    #[serde(rename = "PSK8")]
    Psk8,
    #[serde(rename = "QAM16")]
    Qam16,
    #[serde(rename = "QAM64")]
    Qam64,
    #[serde(rename = "QAM256")]
    Qam256,
    #[serde(rename = "OFDM")]
    Ofdm,
    #[serde(rename = "FSK2")]
    Fsk2,
    #[serde(rename = "FSK4")]
    Fsk4,
    #[serde(rename = "GMSK")]
    Gmsk,
    #[serde(rename = "OOK")]
    Ook,
    #[serde(rename = "AM-DSB")]
    AmDsb,
    #[serde(rename = "AM-SSB")]
    AmSsb,
    #[serde(rename = "FM")]
    Fm,
}

impl Modulation {
    pub const ALL: [Modulation; 14] = [
        Modulation::Psk2,
        Modulation::Psk4,
        Modulation::Psk8,
        Modulation::Qam16,
        Modulation::Qam64,
        Modulation::Qam256,
        Modulation::Ofdm,
        Modulation::Fsk2,
        Modulation::Fsk4,
        Modulation::Gmsk,
        Modulation::Ook,
        Modulation::AmDsb,
        Modulation::AmSsb,
        Modulation::Fm,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Modulation::Psk2 => "PSK2",
            Modulation::Psk4 => "PSK4",
            Modulation::Psk8 => "PSK8",
            Modulation::Qam16 => "QAM16",
            Modulation::Qam64 => "QAM64",
            Modulation::Qam256 => "QAM256",
            Modulation::Ofdm => "OFDM",
            Modulation::Fsk2 => "FSK2",
            Modulation::Fsk4 => "FSK4",
            Modulation::Gmsk => "GMSK",
            Modulation::Ook => "OOK",
            Modulation::AmDsb => "AM-DSB",
            Modulation::AmSsb => "AM-SSB",
            Modulation::Fm => "FM",
        }
    }

    /// Single-carrier linear modulations shaped with a root-raised cosine.
    pub fn is_rrc_shaped(self) -> bool {
        matches!(
            self,
            Modulation::Psk2
                | Modulation::Psk4
                | Modulation::Psk8
                | Modulation::Qam16
                | Modulation::Qam64
                | Modulation::Qam256
                | Modulation::Ook
        )
    }

    pub fn is_analog(self) -> bool {
        matches!(self, Modulation::AmDsb | Modulation::AmSsb | Modulation::Fm)
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modulation::ALL
            .iter()
            .copied()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedModulation(s.to_string()))
    }
}

/// One signal in a band layout, in normalized units (cycles/sample, samples).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalBurst {
    pub modulation: Modulation,
    pub center_freq: f64,
    pub bandwidth: f64,
    pub start_sample: usize,
    pub duration_samples: usize,
    pub amplitude_db: f64,
    /// RRC roll-off for pulse-shaped modulations; drawn from the burst seed
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolloff: Option<f64>,
}

impl SignalBurst {
    pub fn subcarrier_count(&self) -> Option<usize> {
        (self.modulation == Modulation::Ofdm).then_some(OFDM_SUBCARRIERS)
    }

    pub fn freq_lower_edge(&self) -> f64 {
        self.center_freq - self.bandwidth / 2.0
    }

    pub fn freq_upper_edge(&self) -> f64 {
        self.center_freq + self.bandwidth / 2.0
    }

    /// Linear mean power, `10^(amplitude_db / 10)`.
    pub fn power(&self) -> f64 {
        10f64.powf(self.amplitude_db / 10.0)
    }

    /// Check the standalone invariants (band edges, sizes, roll-off).
    pub fn validate(&self) -> Result<()> {
        const EPS: f64 = 1e-12;
        if !(self.bandwidth > 0.0 && self.bandwidth <= 1.0) {
            return Err(Error::Layout(format!(
                "bandwidth {} outside (0, 1]",
                self.bandwidth
            )));
        }
        if !(-0.5..0.5).contains(&self.center_freq) {
            return Err(Error::Layout(format!(
                "center frequency {} outside [-0.5, 0.5)",
                self.center_freq
            )));
        }
        if self.freq_lower_edge() < -0.5 - EPS || self.freq_upper_edge() > 0.5 + EPS {
            return Err(Error::Layout(format!(
                "burst band [{}, {}] exceeds the sample bandwidth",
                self.freq_lower_edge(),
                self.freq_upper_edge()
            )));
        }
        if self.duration_samples == 0 {
            return Err(Error::Layout("burst duration must be > 0".into()));
        }
        if !self.amplitude_db.is_finite() {
            return Err(Error::Layout("amplitude_db must be finite".into()));
        }
        if let Some(beta) = self.rolloff {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::Layout(format!("rolloff {beta} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Validate against a record of `record_length` samples.
    pub fn validate_in(&self, record_length: usize) -> Result<()> {
        self.validate()?;
        let end = self.start_sample.checked_add(self.duration_samples);
        if end.is_none_or(|e| e > record_length) {
            return Err(Error::Layout(format!(
                "burst [{}, +{}) exceeds record length {record_length}",
                self.start_sample, self.duration_samples
            )));
        }
        Ok(())
    }
}

/// Ground-truth band layout of one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLayout {
    pub record_length_samples: usize,
    pub bursts: Vec<SignalBurst>,
    pub rng_seed: u64,
}

impl BandLayout {
    pub fn validate(&self) -> Result<()> {
        self.bursts
            .iter()
            .try_for_each(|b| b.validate_in(self.record_length_samples))
    }
}

/// Receiver noise: per-real-dimension standard deviation plus seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub std_dev: f64,
    pub rng_seed: u64,
}

impl NoiseSpec {
    pub fn new(std_dev: f64, rng_seed: u64) -> Result<Self> {
        if !(std_dev >= 0.0 && std_dev.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise std_dev {std_dev} must be finite and >= 0"
            )));
        }
        Ok(NoiseSpec { std_dev, rng_seed })
    }
}
