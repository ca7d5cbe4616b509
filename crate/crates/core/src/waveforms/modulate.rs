//! Per-modulation baseband generators.
//!
//! Every scheme is generated at a native rate where it occupies a known
//! fraction of the band, then resampled so that fraction maps onto the
//! burst's bandwidth. Generators emit steady-state samples only; filter and
//! phase transients are produced before the requested window and dropped.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use super::{design_rrc, Modulation, Resampler, SignalBurst};
use crate::error::Result;
use crate::seeds;
use crate::Sample;

const LINEAR_SPS: usize = 4;
const RRC_SPAN: usize = 11;
const FSK_SPS: usize = 16;
const FSK_INDEX: f64 = 1.0;
const GMSK_SPS: usize = 8;
const GMSK_INDEX: f64 = 0.5;
pub const GMSK_BT: f64 = 0.3;
pub const OFDM_FFT_SIZE: usize = 1024;
pub const OFDM_CYCLIC_PREFIX: usize = OFDM_FFT_SIZE / 8;

/// Highest audio tone, cycles per native sample (8 kHz at a 64 kHz rate).
const AUDIO_FMAX: f64 = 0.125;
const AUDIO_FMIN: f64 = 50.0 / 64_000.0;
const AUDIO_TONES: usize = 8;
const AM_INDEX: f64 = 0.5;
const FM_DEVIATION: f64 = 5_000.0 / 64_000.0;

/// Unit-average-energy symbol alphabet for the linear digital schemes.
pub fn constellation(modulation: Modulation) -> Option<Vec<Sample>> {
    let psk = |m: usize| -> Vec<Sample> {
        (0..m)
            .map(|k| Sample::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
            .collect()
    };
    let qam = |m: usize| -> Vec<Sample> {
        let side = (m as f64).sqrt().round() as i32;
        let norm = (2.0 * (m as f64 - 1.0) / 3.0).sqrt();
        let levels: Vec<f64> = (0..side).map(|i| (2 * i - side + 1) as f64).collect();
        levels
            .iter()
            .flat_map(|&i| levels.iter().map(move |&q| Sample::new(i, q) / norm))
            .collect()
    };
    let points = match modulation {
        Modulation::Psk2 => psk(2),
        Modulation::Psk4 => psk(4),
        Modulation::Psk8 => psk(8),
        Modulation::Qam16 => qam(16),
        Modulation::Qam64 => qam(64),
        Modulation::Qam256 => qam(256),
        Modulation::Ook => vec![Sample::new(0.0, 0.0), Sample::new(2f64.sqrt(), 0.0)],
        _ => return None,
    };
    Some(points)
}

/// Continuous-phase FSK: symbol `a` holds frequency `h * a / (2 * sps)`.
pub fn cpfsk(symbols: &[i32], sps: usize, index: f64) -> Vec<Sample> {
    let step = PI * index / sps as f64;
    let mut phase = 0.0f64;
    let mut out = Vec::with_capacity(symbols.len() * sps);
    for &a in symbols {
        for _ in 0..sps {
            out.push(Sample::from_polar(1.0, phase));
            phase = (phase + step * a as f64).rem_euclid(2.0 * PI);
        }
    }
    out
}

/// Modulate one burst: `duration_samples` samples at its centre frequency
/// with mean power `10^(amplitude_db/10)`.
pub fn modulate_burst(burst: &SignalBurst, rng_seed: u64) -> Result<Vec<Sample>> {
    burst.validate()?;
    let mut rng = seeds::rng(rng_seed);
    let beta = match burst.rolloff {
        Some(b) => b,
        None if burst.modulation.is_rrc_shaped() => rng.random_range(0.2..=0.4),
        None => 0.0,
    };
    let occupancy = native_occupancy(burst.modulation, beta);
    let resampler = Resampler::new(occupancy / burst.bandwidth);
    let margin = resampler.margin();
    let native_len =
        (burst.duration_samples as f64 / resampler.ratio()).ceil() as usize + 2 * margin + 2;
    let native = generate_native(burst.modulation, beta, native_len, &mut rng);
    let mut out = resampler.process(&native, margin as f64, burst.duration_samples);

    let w = 2.0 * PI * burst.center_freq;
    for (n, v) in out.iter_mut().enumerate() {
        *v *= Sample::from_polar(1.0, (w * n as f64).rem_euclid(2.0 * PI));
    }
    let p = super::mean_power(&out);
    if p > 0.0 {
        let g = (burst.power() / p).sqrt();
        out.iter_mut().for_each(|v| *v *= g);
    }
    Ok(out)
}

/// Fraction of the native rate occupied by the scheme's nominal bandwidth.
fn native_occupancy(modulation: Modulation, beta: f64) -> f64 {
    match modulation {
        m if m.is_rrc_shaped() => (1.0 + beta) / LINEAR_SPS as f64,
        Modulation::Ofdm => super::OFDM_SUBCARRIERS as f64 / OFDM_FFT_SIZE as f64,
        Modulation::Fsk2 => (FSK_INDEX + 2.0) / FSK_SPS as f64,
        Modulation::Fsk4 => (3.0 * FSK_INDEX + 2.0) / FSK_SPS as f64,
        Modulation::Gmsk => 1.0 / GMSK_SPS as f64,
        Modulation::AmDsb => 2.0 * AUDIO_FMAX,
        Modulation::AmSsb => AUDIO_FMAX - AUDIO_FMIN,
        Modulation::Fm => 2.0 * (FM_DEVIATION + AUDIO_FMAX),
        _ => unreachable!("all modulations covered"),
    }
}

fn generate_native(modulation: Modulation, beta: f64, len: usize, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    match modulation {
        m if m.is_rrc_shaped() => {
            let alphabet = constellation(m).expect("linear scheme");
            linear(&alphabet, beta, len, rng)
        }
        Modulation::Ofdm => ofdm(len, rng),
        Modulation::Fsk2 => fsk(&[-1, 1], len, rng),
        Modulation::Fsk4 => fsk(&[-3, -1, 1, 3], len, rng),
        Modulation::Gmsk => gmsk(len, rng),
        Modulation::AmDsb => {
            let audio = audio(len, rng);
            audio
                .into_iter()
                .map(|a| Sample::new(1.0 + AM_INDEX * a, 0.0))
                .collect()
        }
        Modulation::AmSsb => {
            // analytic sum of tones is the upper sideband; shift to centre it
            let tones = audio_tones(rng);
            let shift = -(AUDIO_FMAX + AUDIO_FMIN) / 2.0;
            (0..len)
                .map(|n| {
                    let t = n as f64;
                    tones
                        .iter()
                        .map(|(a, f, ph)| Sample::from_polar(*a, 2.0 * PI * (f + shift) * t + ph))
                        .sum()
                })
                .collect()
        }
        Modulation::Fm => {
            let audio = audio(len, rng);
            let mut phase = 0.0f64;
            audio
                .into_iter()
                .map(|a| {
                    let s = Sample::from_polar(1.0, phase);
                    phase = (phase + 2.0 * PI * FM_DEVIATION * a).rem_euclid(2.0 * PI);
                    s
                })
                .collect()
        }
        _ => unreachable!("all modulations covered"),
    }
}

fn linear(alphabet: &[Sample], beta: f64, len: usize, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let taps = design_rrc(beta, LINEAR_SPS, RRC_SPAN).expect("valid rrc parameters");
    let lead = taps.len() - 1;
    let n_sym = (len + lead) / LINEAR_SPS + 2;
    let symbols: Vec<Sample> = (0..n_sym)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect();
    (lead..lead + len)
        .map(|n| {
            // taps index k = n - j*sps must lie in [0, taps.len())
            let j_hi = n / LINEAR_SPS;
            let j_lo = (n + 1).saturating_sub(taps.len()).div_ceil(LINEAR_SPS);
            (j_lo..=j_hi.min(n_sym - 1))
                .map(|j| symbols[j] * taps[n - j * LINEAR_SPS])
                .sum()
        })
        .collect()
}

fn ofdm(len: usize, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(OFDM_FFT_SIZE);
    let half = super::OFDM_SUBCARRIERS as isize / 2;
    let qpsk = constellation(Modulation::Psk4).expect("qpsk");
    let mut out = Vec::with_capacity(len + OFDM_FFT_SIZE + OFDM_CYCLIC_PREFIX);
    let mut buf = vec![Sample::new(0.0, 0.0); OFDM_FFT_SIZE];
    while out.len() < len {
        buf.iter_mut().for_each(|v| *v = Sample::new(0.0, 0.0));
        for k in -half..half {
            let idx = k.rem_euclid(OFDM_FFT_SIZE as isize) as usize;
            buf[idx] = qpsk[rng.random_range(0..4)];
        }
        ifft.process(&mut buf);
        out.extend_from_slice(&buf[OFDM_FFT_SIZE - OFDM_CYCLIC_PREFIX..]);
        out.extend_from_slice(&buf);
    }
    out.truncate(len);
    out
}

fn fsk(levels: &[i32], len: usize, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let n_sym = len.div_ceil(FSK_SPS);
    let symbols: Vec<i32> = (0..n_sym)
        .map(|_| levels[rng.random_range(0..levels.len())])
        .collect();
    let mut out = cpfsk(&symbols, FSK_SPS, FSK_INDEX);
    out.truncate(len);
    out
}

fn gmsk(len: usize, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let span = 4;
    let sigma = (2f64.ln()).sqrt() / (2.0 * PI * GMSK_BT) * GMSK_SPS as f64;
    let half = (span * GMSK_SPS / 2) as isize;
    let mut g: Vec<f64> = (-half..=half)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let gsum: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= gsum);

    let lead = g.len();
    let n_sym = (len + 2 * lead).div_ceil(GMSK_SPS);
    let nrz: Vec<f64> = (0..n_sym)
        .flat_map(|_| {
            let a = if rng.random::<bool>() { 1.0 } else { -1.0 };
            std::iter::repeat_n(a, GMSK_SPS)
        })
        .collect();
    let step = PI * GMSK_INDEX / GMSK_SPS as f64;
    let mut phase = 0.0f64;
    let mut out = Vec::with_capacity(len);
    for n in lead..lead + len {
        out.push(Sample::from_polar(1.0, phase));
        let f: f64 = g.iter().enumerate().map(|(k, gk)| gk * nrz[n + k - g.len() / 2]).sum();
        phase = (phase + step * f).rem_euclid(2.0 * PI);
    }
    out
}

/// (amplitude, frequency, phase) triples of the synthetic programme source.
fn audio_tones(rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    let mut tones: Vec<(f64, f64, f64)> = (0..AUDIO_TONES)
        .map(|_| {
            (
                rng.random_range(0.2..1.0),
                rng.random_range(AUDIO_FMIN..AUDIO_FMAX),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let total: f64 = tones.iter().map(|t| t.0).sum();
    tones.iter_mut().for_each(|t| t.0 /= total);
    tones
}

/// Real audio with peak magnitude at most 1.
fn audio(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let tones = audio_tones(rng);
    (0..len)
        .map(|n| {
            tones
                .iter()
                .map(|(a, f, ph)| a * (2.0 * PI * f * n as f64 + ph).cos())
                .sum()
        })
        .collect()
}
