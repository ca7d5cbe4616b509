use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{snr_grid, SweepSpec};
use crate::pipeline::RadiometerPipeline;
use crate::waveforms::{LayoutRanges, Modulation, SignalBurst};

/// Everything a run needs besides its input paths. Relative paths inside
/// the file resolve against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub generate: GenerateConfig,
    pub pipeline: RadiometerPipeline,
    pub evaluate: EvaluateConfig,
    pub score: ScoreConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub records: usize,
    pub record_length: usize,
    pub sample_rate: f64,
    /// Fraction of records assigned to the test split.
    pub test_fraction: f64,
    /// Add AWGN at this total-band SNR; clean records when absent.
    pub snr_db: Option<f64>,
    pub layout: LayoutRanges,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            records: 4,
            record_length: 1 << 20,
            sample_rate: 1.0,
            test_fraction: 0.25,
            snr_db: None,
            layout: LayoutRanges::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub iou_threshold: f64,
    /// SigMF stem of a clean test record; the synthetic burst is used when
    /// absent.
    pub record: Option<PathBuf>,
    pub record_length: usize,
    pub test_burst: SignalBurst,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        let n = 1 << 20;
        EvaluateConfig {
            snr_db: snr_grid(-15.0, 15.0, 1.0),
            trials: 200,
            iou_threshold: 0.5,
            record: None,
            record_length: n,
            test_burst: default_test_burst(n),
        }
    }
}

/// QPSK at 5x oversampling (symbol rate 0.2, roll-off 0.35), centred, over
/// the middle three quarters of the record.
pub fn default_test_burst(record_length: usize) -> SignalBurst {
    SignalBurst {
        modulation: Modulation::Psk4,
        center_freq: 0.0,
        bandwidth: 0.2 * 1.35,
        start_sample: record_length / 8,
        duration_samples: record_length * 3 / 4,
        amplitude_db: 0.0,
        rolloff: Some(0.35),
    }
}

impl EvaluateConfig {
    pub fn sweep_spec(&self, master_seed: u64) -> SweepSpec {
        SweepSpec {
            snr_db: self.snr_db.clone(),
            trials: self.trials,
            iou_threshold: self.iou_threshold,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreConfig {
    pub iou_threshold: f64,
    /// Samples per mask row; the mask's channel count when absent.
    pub mask_stride: Option<usize>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { iou_threshold: 0.5, mask_stride: None }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let (Some(rec), Some(dir)) = (cfg.evaluate.record.as_mut(), path.parent()) {
            if rec.is_relative() {
                *rec = dir.join(&*rec);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let config = |e: Error| match e {
            Error::InvalidArgument(m) | Error::Layout(m) => Error::Config(m),
            e => e,
        };
        self.pipeline.validate().map_err(config)?;
        self.generate.layout.validate()?;
        if !(0.0..=1.0).contains(&self.generate.test_fraction) {
            return Err(Error::Config("test_fraction must lie in [0, 1]".into()));
        }
        if !(self.generate.sample_rate > 0.0) {
            return Err(Error::Config("sample_rate must be > 0".into()));
        }
        self.evaluate.sweep_spec(self.seed).validate().map_err(config)?;
        if self.evaluate.record.is_none() {
            self.evaluate
                .test_burst
                .validate_in(self.evaluate.record_length)
                .map_err(config)?;
        }
        if !(self.score.iou_threshold > 0.0 && self.score.iou_threshold < 1.0) {
            return Err(Error::Config("score iou_threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }
}
