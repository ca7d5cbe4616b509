use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{match_and_score, MatchResult, TimeFreqBox};
use crate::error::{Error, Result};
use crate::waveforms::{add_awgn, mean_power, snr_to_noise_std, NoiseSpec};
use crate::{seeds, Exec, Sample};

/// Seed stream reserved for calibration noise within an SNR step.
const CALIBRATION_STREAM: u64 = u64::MAX;

/// Anything that turns a noisy record into boxes.
pub trait Localizer: Sync {
    /// State fitted once per SNR step and shared by its trials.
    type Calibration: Send + Sync;

    fn calibrate(&self, noisy: &[Sample]) -> Result<Self::Calibration>;

    fn localize(&self, cal: &Self::Calibration, noisy: &[Sample]) -> Result<Vec<TimeFreqBox>>;
}

/// Returns the true boxes regardless of input.
#[derive(Debug, Clone)]
pub struct OracleLocalizer {
    pub truths: Vec<TimeFreqBox>,
}

impl Localizer for OracleLocalizer {
    type Calibration = ();

    fn calibrate(&self, _: &[Sample]) -> Result<()> {
        Ok(())
    }

    fn localize(&self, _: &(), _: &[Sample]) -> Result<Vec<TimeFreqBox>> {
        Ok(self.truths.clone())
    }
}

/// Clean test record and its truths.
#[derive(Debug, Clone)]
pub struct TestCase {
    pub clean: Vec<Sample>,
    pub truths: Vec<TimeFreqBox>,
}

impl TestCase {
    /// Mean power over the whole record; SNR targets refer to it.
    pub fn signal_power(&self) -> f64 {
        mean_power(&self.clean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub iou_threshold: f64,
    pub master_seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            snr_db: snr_grid(-15.0, 15.0, 1.0),
            trials: 200,
            iou_threshold: 0.5,
            master_seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials per step must be >= 1".into()));
        }
        if !(self.iou_threshold > 0.0 && self.iou_threshold < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "iou threshold {} outside (0, 1)",
                self.iou_threshold
            )));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("SNR values must be finite".into()));
        }
        Ok(())
    }
}

/// `lo, lo + step, ...` up to and including `hi`.
pub fn snr_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// One report row. `snr_db` is NaN when the scored data has no single SNR;
/// it is then left empty in CSV and null in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    #[serde(deserialize_with = "nan_from_null")]
    pub snr_db: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub p: usize,
    pub trials: usize,
}

impl EvalRow {
    pub fn from_counts(snr_db: f64, m: &MatchResult, trials: usize) -> Self {
        EvalRow {
            snr_db,
            precision: m.precision(),
            recall: m.recall(),
            tp: m.tp,
            fp: m.fp,
            p: m.p,
            trials,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "snr_db,precision,recall,tp,fp,p,trials";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            if r.snr_db.is_finite() {
                let _ = write!(s, "{}", r.snr_db);
            }
            let _ = writeln!(s, ",{},{},{},{},{},{}", r.precision, r.recall, r.tp, r.fp, r.p, r.trials);
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn row(&self, snr_db: f64) -> Option<&EvalRow> {
        self.rows.iter().find(|r| (r.snr_db - snr_db).abs() < 1e-9)
    }
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn noisy_copy(case: &TestCase, std_dev: f64, seed: u64) -> Vec<Sample> {
    add_awgn(&case.clean, &NoiseSpec { std_dev, rng_seed: seed })
}

/// Score `localizer` over seeded AWGN realizations at each SNR. Trial `k`
/// of step `i` uses noise seed `derive(master_seed, [i, k])`, so the report
/// does not depend on execution order.
pub fn sweep_snr<L: Localizer>(localizer: &L, case: &TestCase, spec: &SweepSpec, exec: Exec) -> Result<EvalReport> {
    spec.validate()?;
    let power = case.signal_power();
    let mut rows = Vec::with_capacity(spec.snr_db.len());
    for (i, &snr_db) in spec.snr_db.iter().enumerate() {
        let std_dev = snr_to_noise_std(power, snr_db)?;
        let context = |trial: usize, seed: u64| {
            move |e: Error| Error::Pipeline { snr_db, trial, seed, source: Box::new(e) }
        };
        let cal_seed = seeds::derive(spec.master_seed, &[i as u64, CALIBRATION_STREAM]);
        let cal = localizer
            .calibrate(&noisy_copy(case, std_dev, cal_seed))
            .map_err(context(usize::MAX, cal_seed))?;
        let results = exec.map_range(spec.trials, |k| {
            let seed = seeds::derive(spec.master_seed, &[i as u64, k as u64]);
            let noisy = noisy_copy(case, std_dev, seed);
            localizer
                .localize(&cal, &noisy)
                .map(|preds| match_and_score(&preds, &case.truths, spec.iou_threshold))
                .map_err(context(k, seed))
        });
        let mut total = MatchResult::default();
        for r in results {
            total.accumulate(&r?);
        }
        rows.push(EvalRow::from_counts(snr_db, &total, spec.trials));
    }
    Ok(EvalReport { rows })
}
