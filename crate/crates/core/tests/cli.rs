mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ndarray::Array2;
use speclocate::cli::{Manifest, RunConfig};
use speclocate::metrics::{iou, write_mask, GridGeometry, RasterRule, Sgm1Mask, TimeFreqBox};
use speclocate::pipeline::DetectionsDocument;
use speclocate::waveforms::*;
use speclocate::Sample;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_speclocate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, v: serde_json::Value) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_vec_pretty(&v).unwrap()).unwrap();
    p
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn generate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        serde_json::json!({"generate": {"records": 2, "record_length": 20000, "test_fraction": 0.5}}),
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["generate", "--config", s(&cfg), "--seed", "42", "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files = dir_bytes(&a);
    assert_eq!(files.len(), 5);
    assert_eq!(files, dir_bytes(&b));
    let m: Manifest = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m.seed, 42);
    assert_eq!(m.records.len(), 2);
    assert_eq!(m.records.iter().filter(|r| r.split == speclocate::cli::Split::Test).count(), 1);
    for r in &m.records {
        let rec = read_sigmf(&a.join(&r.stem)).unwrap();
        assert_eq!(rec.annotations().len(), r.burst_count);
        rec.check_annotations().unwrap();
    }
    let c = tmp.path().join("c");
    run(&["generate", "--config", s(&cfg), "--seed", "43", "--out", s(&c)]);
    assert_ne!(dir_bytes(&c), files);
}

#[test]
fn generate_zero_records_writes_manifest_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), serde_json::json!({"generate": {"records": 0}}));
    let out = tmp.path().join("o");
    assert!(run(&["generate", "--config", s(&cfg), "--out", s(&out)]).status.success());
    let names: Vec<String> = dir_bytes(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, vec!["manifest.json"]);
}

#[test]
fn default_layouts_pass_self_check() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), serde_json::json!({"generate": {"records": 6, "record_length": 50000}}));
    let out = tmp.path().join("o");
    assert!(run(&["generate", "--config", s(&cfg), "--out", s(&out)]).status.success());
    let m: Manifest = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    for r in &m.records {
        let rec = read_sigmf(&out.join(&r.stem)).unwrap();
        rec.check_annotations().unwrap();
        for (a, b) in rec.annotations().iter().zip(&r.layout.bursts) {
            assert_eq!(a.sample_start, b.start_sample);
        }
    }
}

fn noisy_qpsk_record(dir: &Path, n: usize, snr_db: f64, seed: u64) -> (PathBuf, TimeFreqBox) {
    let rec = synthesize_record(&common::qpsk_layout(n, seed)).unwrap();
    let truth = speclocate::metrics::boxes_from_annotations(&rec).unwrap()[0];
    let std = snr_to_noise_std(mean_power(&rec.samples), snr_db).unwrap();
    let noisy = SigmfRecord {
        samples: add_awgn(&rec.samples, &NoiseSpec::new(std, seed + 1).unwrap()),
        meta: rec.meta,
    };
    let stem = dir.join(format!("qpsk_{seed}"));
    write_sigmf(&noisy, &stem).unwrap();
    (stem, truth)
}

#[test]
fn detect_finds_high_snr_qpsk() {
    let tmp = tempfile::tempdir().unwrap();
    let (stem, truth) = noisy_qpsk_record(tmp.path(), 1 << 18, 15.0, 3);
    let out = tmp.path().join("det");
    let o = run(&["detect", "--record", s(&stem), "--out", s(&out), "--emit-mask"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: DetectionsDocument =
        serde_json::from_slice(&fs::read(out.join("qpsk_3.detections.json")).unwrap()).unwrap();
    assert_eq!(doc.geometry, GridGeometry { step_stride_samples: 512, channels: 256, steps: 512 });
    assert_eq!(doc.boxes.len(), doc.grid_boxes.len());
    let good = doc.boxes.iter().filter(|b| iou(b, &truth) >= 0.5).count();
    assert!(good >= 1, "no box matches the burst");
    let m = speclocate::metrics::match_and_score(&doc.boxes, &[truth], 0.5);
    assert_eq!(m.tp, 1);

    let mask = speclocate::metrics::read_mask(&out.join("qpsk_3.sgm1")).unwrap();
    assert_eq!(mask.dim(), (512, 256));
    let noise: speclocate::radiometer::NoiseModel =
        serde_json::from_slice(&fs::read(out.join("qpsk_3.noise.json")).unwrap()).unwrap();
    assert_eq!(Some(noise), doc.noise_model);
}

#[test]
fn detect_on_noise_with_min_area_is_nearly_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let mut boxes = 0;
    let seeds = 20;
    for seed in 0..seeds {
        // 256 steps x 256 channels
        let x = common::white_noise(256 * 512, 1.0, 1000 + seed);
        let rec = SigmfRecord {
            meta: SigmfMeta::for_layout(&BandLayout { record_length_samples: x.len(), bursts: vec![], rng_seed: 0 }),
            samples: x,
        };
        let stem = tmp.path().join(format!("n{seed}"));
        write_sigmf(&rec, &stem).unwrap();
        let o = run(&["detect", "--record", s(&stem), "--filters", "min-area=4"]);
        assert!(o.status.success());
        let doc: DetectionsDocument =
            serde_json::from_slice(&fs::read(tmp.path().join(format!("n{seed}.detections.json"))).unwrap()).unwrap();
        boxes += doc.boxes.len();
    }
    let mean = boxes as f64 / seeds as f64;
    assert!(mean < 0.25, "mean spurious boxes {mean}");
}

#[test]
fn detect_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope");
    assert_eq!(run(&["detect", "--record", s(&missing)]).status.code(), Some(3));

    let silent = SigmfRecord {
        meta: SigmfMeta::for_layout(&BandLayout { record_length_samples: 1 << 16, bursts: vec![], rng_seed: 0 }),
        samples: vec![Sample::new(0.0, 0.0); 1 << 16],
    };
    let stem = tmp.path().join("silent");
    write_sigmf(&silent, &stem).unwrap();
    let o = run(&["detect", "--record", s(&stem)]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hint"));

    let cfg = write_config(tmp.path(), serde_json::json!({"pipeline": {"radiometer": {"channels": 100}}}));
    assert_eq!(run(&["detect", "--record", s(&stem), "--config", s(&cfg)]).status.code(), Some(2));
    let bad = write_config(tmp.path(), serde_json::json!({"bogus": 1}));
    assert_eq!(run(&["evaluate", "--config", s(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--filters", "shrink"]).status.code(), Some(2));
}

fn disjoint_truth_records(dir: &Path) -> Vec<(String, Vec<TimeFreqBox>)> {
    let n = 512 * 64;
    let burst = |fc: f64, bw: f64, start: usize, dur: usize| SignalBurst {
        modulation: Modulation::Psk2,
        center_freq: fc,
        bandwidth: bw,
        start_sample: start,
        duration_samples: dur,
        amplitude_db: 0.0,
        rolloff: None,
    };
    let layouts = [
        vec![burst(-0.3, 0.1, 1000, 10_000), burst(0.2, 0.15, 5000, 20_000)],
        vec![burst(0.0, 0.2, 0, n)],
        vec![burst(-0.2, 0.05, 2000, 4000), burst(-0.2, 0.05, 20_000, 4000), burst(0.3, 0.1, 100, 30_000)],
    ];
    layouts
        .into_iter()
        .enumerate()
        .map(|(i, bursts)| {
            let l = BandLayout { record_length_samples: n, bursts, rng_seed: i as u64 };
            let rec = synthesize_record(&l).unwrap();
            let stem = format!("r{i}");
            write_sigmf(&rec, &dir.join(&stem)).unwrap();
            (stem, speclocate::metrics::boxes_from_annotations(&rec).unwrap())
        })
        .collect()
}

#[test]
fn score_masks_oracle_and_empty_masks() {
    let tmp = tempfile::tempdir().unwrap();
    let records = tmp.path().join("records");
    fs::create_dir(&records).unwrap();
    let truths = disjoint_truth_records(&records);
    let oracle = tmp.path().join("oracle");
    let zeros = tmp.path().join("zeros");
    fs::create_dir(&oracle).unwrap();
    fs::create_dir(&zeros).unwrap();
    let g = GridGeometry { step_stride_samples: 512, channels: 512, steps: 64 };
    for (stem, boxes) in &truths {
        let mask = g.rasterize_all(boxes, RasterRule::Center);
        write_mask(&oracle.join(format!("{stem}.sgm1")), &Sgm1Mask::from_binary(&mask)).unwrap();
        let empty = Array2::from_elem((64, 512), false);
        write_mask(&zeros.join(format!("{stem}.sgm1")), &Sgm1Mask::from_binary(&empty)).unwrap();
    }
    let o = run(&["score-masks", "--masks", s(&oracle), "--records", s(&records)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv, "snr_db,precision,recall,tp,fp,p,trials\n,1,1,6,0,6,3\n");

    let out = tmp.path().join("scored");
    let o = run(&["score-masks", "--masks", s(&zeros), "--records", s(&records), "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(out.join("score.csv")).unwrap(),
        "snr_db,precision,recall,tp,fp,p,trials\n,1,0,0,0,6,3\n"
    );

    write_mask(&zeros.join("stray.sgm1"), &Sgm1Mask::from_binary(&Array2::from_elem((2, 2), false))).unwrap();
    let o = run(&["score-masks", "--masks", s(&zeros), "--records", s(&records)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stray"));
}

#[test]
fn score_masks_rejects_oversized_mask() {
    let tmp = tempfile::tempdir().unwrap();
    let records = tmp.path().join("records");
    fs::create_dir(&records).unwrap();
    disjoint_truth_records(&records);
    let masks = tmp.path().join("masks");
    fs::create_dir(&masks).unwrap();
    for i in 0..3 {
        let m = Array2::from_elem((65, 512), false);
        write_mask(&masks.join(format!("r{i}.sgm1")), &Sgm1Mask::from_binary(&m)).unwrap();
    }
    let o = run(&["score-masks", "--masks", s(&masks), "--records", s(&records)]);
    assert_eq!(o.status.code(), Some(3));
}

fn small_eval_config(dir: &Path) -> PathBuf {
    let n = 1 << 16;
    write_config(
        dir,
        serde_json::json!({
            "evaluate": {
                "snr_db": [-10.0, 0.0, 10.0, 15.0],
                "trials": 4,
                "record_length": n,
                "test_burst": {
                    "modulation": "PSK4", "center_freq": 0.0, "bandwidth": 0.27,
                    "start_sample": n / 8, "duration_samples": 3 * n / 4, "amplitude_db": 0.0, "rolloff": 0.35
                }
            }
        }),
    )
}

#[test]
fn evaluate_is_byte_deterministic_and_filters_help() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_eval_config(tmp.path());
    let out = |name: &str| tmp.path().join(name);
    for (name, extra) in [("a", vec![]), ("b", vec!["--sequential"]), ("m", vec!["--filters", "contained-merge"])] {
        let mut args = vec!["evaluate", "--config", s(&cfg), "--seed", "5", "--out"];
        let o = out(name);
        args.push(s(&o));
        args.extend(extra);
        let r = run(&args);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let a = fs::read(out("a").join("report.csv")).unwrap();
    assert_eq!(a, fs::read(out("b").join("report.csv")).unwrap());
    assert_eq!(
        fs::read(out("a").join("report.json")).unwrap(),
        fs::read(out("b").join("report.json")).unwrap()
    );
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 5);
    let parse = |t: &str| -> Vec<f64> { t.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect() };
    let merged = fs::read_to_string(out("m").join("report.csv")).unwrap();
    for (base, m) in parse(&text).iter().zip(parse(&merged)) {
        assert!(m >= *base, "{m} < {base}");
    }
}

#[test]
fn config_file_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig::default();
    let p = write_config(tmp.path(), serde_json::to_value(&cfg).unwrap());
    assert_eq!(RunConfig::load(&p).unwrap(), cfg);
}
