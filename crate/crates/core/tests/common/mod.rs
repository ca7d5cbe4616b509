//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speclocate::clustering::GridBox;
use speclocate::metrics::TimeFreqBox;
use speclocate::waveforms::{BandLayout, Modulation, SignalBurst};
use speclocate::Sample;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// IoU by counting unit cells on an integer lattice. Frequencies are
/// multiplied by `f_scale` and must land on integers.
pub fn brute_force_iou(a: &TimeFreqBox, b: &TimeFreqBox, f_scale: f64) -> f64 {
    let fa = ((a.freq_lo * f_scale).round() as i64, (a.freq_hi * f_scale).round() as i64);
    let fb = ((b.freq_lo * f_scale).round() as i64, (b.freq_hi * f_scale).round() as i64);
    let t0 = a.start_sample.min(b.start_sample);
    let t1 = a.stop_sample.max(b.stop_sample);
    let f0 = fa.0.min(fb.0);
    let f1 = fa.1.max(fb.1);
    let (mut inter, mut union) = (0u64, 0u64);
    for t in t0..t1 {
        for f in f0..f1 {
            let in_a = (a.start_sample..a.stop_sample).contains(&t) && (fa.0..fa.1).contains(&f);
            let in_b = (b.start_sample..b.stop_sample).contains(&t) && (fb.0..fb.1).contains(&f);
            inter += (in_a && in_b) as u64;
            union += (in_a || in_b) as u64;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// 8-connected flood fill; bounding boxes sorted.
pub fn flood_fill_boxes(mask: &Array2<bool>) -> Vec<GridBox> {
    let (rows, cols) = mask.dim();
    let mut seen = Array2::from_elem((rows, cols), false);
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if !mask[[r, c]] || seen[[r, c]] {
                continue;
            }
            let mut b = GridBox { t_lo: r, t_hi: r, f_lo: c, f_hi: c };
            let mut stack = vec![(r, c)];
            seen[[r, c]] = true;
            while let Some((y, x)) = stack.pop() {
                b.t_lo = b.t_lo.min(y);
                b.t_hi = b.t_hi.max(y);
                b.f_lo = b.f_lo.min(x);
                b.f_hi = b.f_hi.max(x);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                        if ny < 0 || nx < 0 || ny >= rows as i64 || nx >= cols as i64 {
                            continue;
                        }
                        let (ny, nx) = (ny as usize, nx as usize);
                        if mask[[ny, nx]] && !seen[[ny, nx]] {
                            seen[[ny, nx]] = true;
                            stack.push((ny, nx));
                        }
                    }
                }
            }
            out.push(b);
        }
    }
    out.sort();
    out
}

pub fn random_mask(rows: usize, cols: usize, density: f64, seed: u64) -> Array2<bool> {
    let mut r = rng(seed);
    Array2::from_shape_fn((rows, cols), |_| r.random::<f64>() < density)
}

pub fn paint(mask: &mut Array2<bool>, b: &GridBox) {
    for t in b.t_lo..=b.t_hi {
        for f in b.f_lo..=b.f_hi {
            mask[[t, f]] = true;
        }
    }
}

/// Complex white Gaussian noise with per-dimension std `s`, via Box-Muller.
pub fn white_noise(n: usize, s: f64, seed: u64) -> Vec<Sample> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - r.random::<f64>();
            let u2: f64 = r.random();
            let m = s * (-2.0 * u1.ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u2;
            Sample::new(m * th.cos(), m * th.sin())
        })
        .collect()
}

/// One standard normal draw via Box-Muller.
pub fn gauss(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - r.random::<f64>();
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Power spectral density by averaged unwindowed periodograms, bins in
/// ascending frequency order starting at -0.5.
pub fn psd(x: &[Sample], nfft: usize) -> Vec<f64> {
    let frames = x.len() / nfft;
    let mut acc = vec![0.0; nfft];
    let tw: Vec<Sample> = (0..nfft)
        .map(|k| Sample::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / nfft as f64))
        .collect();
    for fr in 0..frames {
        let seg = &x[fr * nfft..(fr + 1) * nfft];
        for (k, a) in acc.iter_mut().enumerate() {
            // naive DFT, independent of the library's FFT
            let mut s = Sample::new(0.0, 0.0);
            for (n, v) in seg.iter().enumerate() {
                s += v * tw[(k * n) % nfft];
            }
            *a += s.norm_sqr();
        }
    }
    let mut out = vec![0.0; nfft];
    for (k, v) in acc.into_iter().enumerate() {
        out[(k + nfft / 2) % nfft] = v / (frames * nfft) as f64;
    }
    out
}

pub fn qpsk_layout(n: usize, seed: u64) -> BandLayout {
    BandLayout {
        record_length_samples: n,
        bursts: vec![SignalBurst {
            modulation: Modulation::Psk4,
            center_freq: 0.0,
            bandwidth: 0.27,
            start_sample: n / 8,
            duration_samples: 3 * n / 4,
            amplitude_db: 0.0,
            rolloff: Some(0.35),
        }],
        rng_seed: seed,
    }
}
