//! SigMF record pair: `<stem>.sigmf-meta` (JSON) and `<stem>.sigmf-data`
//! (interleaved I/Q, signed 16-bit little endian).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BandLayout, SignalBurst};
use crate::error::{Error, Result};
use crate::Sample;

pub const DATATYPE_CI16_LE: &str = "ci16_le";
const PEAK_FRACTION: f64 = 0.8;
const SIGMF_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Global {
    #[serde(rename = "core:datatype")]
    pub datatype: String,
    #[serde(rename = "core:sample_rate")]
    pub sample_rate: f64,
    #[serde(rename = "core:version", default = "default_version")]
    pub version: String,
    /// Multiplier from float samples to int16 counts.
    #[serde(rename = "speclocate:scale_factor", default, skip_serializing_if = "Option::is_none")]
    pub scale_factor: Option<f64>,
    #[serde(rename = "speclocate:sample_count", default, skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
}

fn default_version() -> String {
    SIGMF_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capture {
    #[serde(rename = "core:sample_start")]
    pub sample_start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(rename = "core:sample_start")]
    pub sample_start: usize,
    #[serde(rename = "core:sample_count")]
    pub sample_count: usize,
    #[serde(rename = "core:freq_lower_edge")]
    pub freq_lower_edge: f64,
    #[serde(rename = "core:freq_upper_edge")]
    pub freq_upper_edge: f64,
    #[serde(rename = "core:label")]
    pub label: String,
}

impl From<&SignalBurst> for Annotation {
    fn from(b: &SignalBurst) -> Self {
        Annotation {
            sample_start: b.start_sample,
            sample_count: b.duration_samples,
            freq_lower_edge: b.freq_lower_edge(),
            freq_upper_edge: b.freq_upper_edge(),
            label: b.modulation.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmfMeta {
    pub global: Global,
    #[serde(default)]
    pub captures: Vec<Capture>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

impl SigmfMeta {
    pub fn for_layout(layout: &BandLayout) -> Self {
        SigmfMeta {
            global: Global {
                datatype: DATATYPE_CI16_LE.to_string(),
                sample_rate: 1.0,
                version: default_version(),
                scale_factor: None,
                sample_count: Some(layout.record_length_samples),
            },
            captures: vec![Capture { sample_start: 0 }],
            annotations: layout.bursts.iter().map(Annotation::from).collect(),
        }
    }
}

/// Complex samples plus their metadata document.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmfRecord {
    pub meta: SigmfMeta,
    pub samples: Vec<Sample>,
}

impl SigmfRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.meta.annotations
    }

    /// Annotations must lie inside the sample range.
    pub fn check_annotations(&self) -> Result<()> {
        for a in &self.meta.annotations {
            let end = a.sample_start.checked_add(a.sample_count);
            if a.sample_count == 0 || end.is_none_or(|e| e > self.samples.len()) {
                return Err(Error::Consistency(format!(
                    "annotation [{}, +{}) outside record of {} samples",
                    a.sample_start,
                    a.sample_count,
                    self.samples.len()
                )));
            }
            if !(a.freq_lower_edge < a.freq_upper_edge)
                || a.freq_lower_edge < -0.5 - 1e-9
                || a.freq_upper_edge > 0.5 + 1e-9
            {
                return Err(Error::Consistency(format!(
                    "annotation band [{}, {}] invalid",
                    a.freq_lower_edge, a.freq_upper_edge
                )));
            }
        }
        Ok(())
    }
}

/// `<stem>.sigmf-meta` and `<stem>.sigmf-data`; a path already carrying one
/// of the suffixes is accepted as a stem.
pub fn stem_paths(stem: &Path) -> (PathBuf, PathBuf) {
    let s = stem.to_string_lossy();
    let base = s
        .strip_suffix(".sigmf-meta")
        .or_else(|| s.strip_suffix(".sigmf-data"))
        .unwrap_or(&s)
        .to_string();
    (
        PathBuf::from(format!("{base}.sigmf-meta")),
        PathBuf::from(format!("{base}.sigmf-data")),
    )
}

/// Write the record pair. Without a stored scale factor the record is scaled
/// so its peak component lands at 0.8 of full scale; the factor actually used
/// is recorded in the metadata, which is returned.
pub fn write_sigmf(record: &SigmfRecord, stem: &Path) -> Result<SigmfMeta> {
    let peak = record
        .samples
        .iter()
        .map(|v| v.re.abs().max(v.im.abs()))
        .fold(0.0f64, f64::max);
    let scale = match record.meta.global.scale_factor {
        Some(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("scale factor {s} must be > 0")));
            }
            if peak * s > i16::MAX as f64 + 0.5 {
                return Err(Error::Clipping { peak: peak * s, scale: s });
            }
            s
        }
        None if peak > 0.0 => PEAK_FRACTION * i16::MAX as f64 / peak,
        None => 1.0,
    };

    let mut bytes = Vec::with_capacity(record.samples.len() * 4);
    for v in &record.samples {
        bytes.extend_from_slice(&quantize(v.re * scale).to_le_bytes());
        bytes.extend_from_slice(&quantize(v.im * scale).to_le_bytes());
    }

    let mut meta = record.meta.clone();
    meta.global.datatype = DATATYPE_CI16_LE.to_string();
    meta.global.scale_factor = Some(scale);
    meta.global.sample_count = Some(record.samples.len());
    if meta.captures.is_empty() {
        meta.captures.push(Capture { sample_start: 0 });
    }

    let (meta_path, data_path) = stem_paths(stem);
    let json = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
    fs::write(&data_path, bytes).map_err(|e| Error::io(&data_path, e))?;
    Ok(meta)
}

fn quantize(x: f64) -> i16 {
    x.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

pub fn read_sigmf(stem: &Path) -> Result<SigmfRecord> {
    let (meta_path, data_path) = stem_paths(stem);
    let text = fs::read(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: SigmfMeta = serde_json::from_slice(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", meta_path.display())))?;
    if meta.global.datatype != DATATYPE_CI16_LE {
        return Err(Error::Parse(format!(
            "{}: unsupported datatype {:?}",
            meta_path.display(),
            meta.global.datatype
        )));
    }
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Consistency(format!(
            "{}: {} bytes is not a whole number of ci16 samples",
            data_path.display(),
            bytes.len()
        )));
    }
    let count = bytes.len() / 4;
    if let Some(declared) = meta.global.sample_count {
        if declared != count {
            return Err(Error::Consistency(format!(
                "{}: metadata declares {declared} samples, data holds {count}",
                data_path.display()
            )));
        }
    }
    let scale = meta.global.scale_factor.unwrap_or(1.0);
    let samples = bytes
        .chunks_exact(4)
        .map(|c| {
            let i = i16::from_le_bytes([c[0], c[1]]) as f64;
            let q = i16::from_le_bytes([c[2], c[3]]) as f64;
            Sample::new(i / scale, q / scale)
        })
        .collect();
    let record = SigmfRecord { meta, samples };
    record.check_annotations()?;
    Ok(record)
}
