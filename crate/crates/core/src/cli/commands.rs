use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::metrics::{
    boxes_from_annotations, match_and_score, read_mask, sweep_snr, write_mask, EvalReport, EvalRow, GridGeometry,
    MatchResult, Sgm1Mask, TestCase,
};
use crate::pipeline::{localize_mask, DetectionsDocument};
use crate::waveforms::{
    add_awgn_in_place, generate_layout, mean_power, read_sigmf, snr_to_noise_std, synthesize_record_with,
    write_sigmf, BandLayout, NoiseSpec, SigmfRecord,
};
use crate::{seeds, Exec};

const SPLIT_STREAM: u64 = 0x5EED_5917;
const NOISE_STREAM: u64 = 0xA3C5_0153;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub stem: String,
    pub seed: u64,
    pub split: Split,
    pub burst_count: usize,
    pub layout: BandLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub record_length: usize,
    pub sample_rate: f64,
    pub snr_db: Option<f64>,
    pub records: Vec<ManifestEntry>,
}

pub fn record_stem(i: usize) -> String {
    format!("rec_{i:04}")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Draw every layout and the split before synthesizing any samples.
pub fn build_manifest(cfg: &RunConfig) -> Result<Manifest> {
    let g = &cfg.generate;
    let n = g.records;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeds::rng(seeds::derive(cfg.seed, &[SPLIT_STREAM])));
    let n_test = (g.test_fraction * n as f64).round() as usize;
    let mut split = vec![Split::Train; n];
    for &i in &order[..n_test] {
        split[i] = Split::Test;
    }
    let records = (0..n)
        .zip(split)
        .map(|(i, split)| {
            let seed = seeds::derive(cfg.seed, &[i as u64]);
            let layout = generate_layout(&g.layout, g.record_length, seed)?;
            Ok(ManifestEntry {
                stem: record_stem(i),
                seed,
                split,
                burst_count: layout.bursts.len(),
                layout,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Manifest {
        seed: cfg.seed,
        record_length: g.record_length,
        sample_rate: g.sample_rate,
        snr_db: g.snr_db,
        records,
    })
}

fn synthesize_entry(entry: &ManifestEntry, manifest: &Manifest) -> Result<SigmfRecord> {
    let mut rec = synthesize_record_with(&entry.layout, Exec::Sequential)?;
    rec.meta.global.sample_rate = manifest.sample_rate;
    if let Some(snr) = manifest.snr_db {
        let power = mean_power(&rec.samples);
        if power > 0.0 {
            let noise = NoiseSpec::new(snr_to_noise_std(power, snr)?, seeds::derive(entry.seed, &[NOISE_STREAM]))?;
            add_awgn_in_place(&mut rec.samples, &noise);
        }
    }
    Ok(rec)
}

pub fn cmd_generate(cfg: &RunConfig, out: &Path, exec: Exec) -> Result<Manifest> {
    create_dir(out)?;
    let manifest = build_manifest(cfg)?;
    write_text(&out.join(MANIFEST_FILE), &to_json(&manifest))?;
    let results = exec.map_range(manifest.records.len(), |i| {
        let entry = &manifest.records[i];
        let rec = synthesize_entry(entry, &manifest)?;
        write_sigmf(&rec, &out.join(&entry.stem)).map(|_| ())
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct DetectOutputs {
    pub document: DetectionsDocument,
    pub detections_path: PathBuf,
    pub mask_path: Option<PathBuf>,
}

fn stem_name(stem: &Path) -> String {
    let name = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".sigmf-meta")
        .or_else(|| name.strip_suffix(".sigmf-data"))
        .unwrap_or(&name)
        .to_string()
}

pub fn cmd_detect(cfg: &RunConfig, record: &Path, out: &Path, emit_mask: bool, exec: Exec) -> Result<DetectOutputs> {
    let rec = read_sigmf(record)?;
    let pipeline = crate::pipeline::RadiometerPipeline { exec, ..cfg.pipeline };
    let det = pipeline.detect(&rec.samples, None)?;
    create_dir(out)?;
    let name = stem_name(record);
    let document = det.document();
    let detections_path = out.join(format!("{name}.detections.json"));
    write_text(&detections_path, &to_json(&document))?;
    let mask_path = if emit_mask {
        let p = out.join(format!("{name}.sgm1"));
        write_mask(&p, &Sgm1Mask::from_binary(&det.mask))?;
        write_text(&out.join(format!("{name}.noise.json")), &to_json(&det.noise))?;
        Some(p)
    } else {
        None
    };
    Ok(DetectOutputs { document, detections_path, mask_path })
}

fn list_with_suffix(dir: &Path, suffix: &str) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if let Some(stem) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(suffix)) {
            out.insert(stem.to_string(), path.clone());
        }
    }
    Ok(out)
}

/// Score every `<stem>.sgm1` in `masks` against `<stem>.sigmf-*` in
/// `records`, pooled into a single report row.
pub fn cmd_score_masks(cfg: &RunConfig, masks: &Path, records: &Path, exec: Exec) -> Result<EvalReport> {
    let mask_files = list_with_suffix(masks, ".sgm1")?;
    let record_stems = list_with_suffix(records, ".sigmf-meta")?;
    let orphans: Vec<String> = mask_files.keys().filter(|s| !record_stems.contains_key(*s)).cloned().collect();
    if !orphans.is_empty() {
        return Err(Error::Pairing { orphans });
    }
    let pairs: Vec<(&String, &PathBuf)> = mask_files.iter().collect();
    let results = exec.map_range(pairs.len(), |i| {
        let (stem, mask_path) = pairs[i];
        score_one(cfg, mask_path, &records.join(stem))
    });
    let mut total = MatchResult::default();
    for r in results {
        total.accumulate(&r?);
    }
    let snr_db = read_manifest(records).ok().and_then(|m| m.snr_db).unwrap_or(f64::NAN);
    Ok(EvalReport {
        rows: vec![EvalRow::from_counts(snr_db, &total, pairs.len())],
    })
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn score_one(cfg: &RunConfig, mask_path: &Path, stem: &Path) -> Result<MatchResult> {
    let mask = read_mask(mask_path)?;
    let rec = read_sigmf(stem)?;
    let truths = boxes_from_annotations(&rec)?;
    let (steps, channels) = mask.dim();
    let stride = cfg.score.mask_stride.unwrap_or(channels);
    if steps.checked_mul(stride).is_none_or(|n| n > rec.len()) {
        return Err(Error::Format(format!(
            "{}: {steps} rows of {stride} samples exceed the record's {} samples",
            mask_path.display(),
            rec.len()
        )));
    }
    let geometry = GridGeometry { step_stride_samples: stride, channels, steps };
    let preds = localize_mask(&mask.to_binary(), &geometry, &cfg.pipeline.filters);
    Ok(match_and_score(&preds, &truths, cfg.score.iou_threshold))
}

pub fn evaluation_case(cfg: &RunConfig) -> Result<TestCase> {
    let rec = match &cfg.evaluate.record {
        Some(stem) => read_sigmf(stem)?,
        None => {
            let layout = BandLayout {
                record_length_samples: cfg.evaluate.record_length,
                bursts: vec![cfg.evaluate.test_burst.clone()],
                rng_seed: seeds::derive(cfg.seed, &[u64::MAX]),
            };
            synthesize_record_with(&layout, Exec::Sequential)?
        }
    };
    let truths = boxes_from_annotations(&rec)?;
    Ok(TestCase { clean: rec.samples, truths })
}

pub fn cmd_evaluate(cfg: &RunConfig, out: &Path, exec: Exec) -> Result<EvalReport> {
    let case = evaluation_case(cfg)?;
    let pipeline = crate::pipeline::RadiometerPipeline { exec: Exec::Sequential, ..cfg.pipeline };
    let report = sweep_snr(&pipeline, &case, &cfg.evaluate.sweep_spec(cfg.seed), exec)?;
    create_dir(out)?;
    write_text(&out.join("report.csv"), &report.to_csv())?;
    write_text(&out.join("report.json"), &report.to_json())?;
    Ok(report)
}
