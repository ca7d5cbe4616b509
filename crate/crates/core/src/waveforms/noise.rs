use rand_distr::{Distribution, StandardNormal};

use super::NoiseSpec;
use crate::error::{Error, Result};
use crate::{seeds, Sample};

/// Mean of `|x|^2`, zero for an empty slice.
pub fn mean_power(samples: &[Sample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Add circular white Gaussian noise in place.
pub fn add_awgn_in_place(samples: &mut [Sample], noise: &NoiseSpec) {
    if noise.std_dev == 0.0 {
        return;
    }
    let mut rng = seeds::rng(noise.rng_seed);
    for v in samples.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *v += Sample::new(re, im) * noise.std_dev;
    }
}

pub fn add_awgn(samples: &[Sample], noise: &NoiseSpec) -> Vec<Sample> {
    let mut out = samples.to_vec();
    add_awgn_in_place(&mut out, noise);
    out
}

/// `10 log10(P_signal / P_noise)` over total-band mean powers.
pub fn measure_snr(signal: &[Sample], noise: &[Sample]) -> Result<f64> {
    if signal.is_empty() || noise.is_empty() {
        return Err(Error::InvalidArgument("SNR needs non-empty inputs".into()));
    }
    let pn = mean_power(noise);
    if pn == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    Ok(10.0 * (mean_power(signal) / pn).log10())
}

/// Per-real-dimension noise std that puts `signal_power` at `snr_db`.
pub fn snr_to_noise_std(signal_power: f64, snr_db: f64) -> Result<f64> {
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "signal power {signal_power} must be > 0"
        )));
    }
    Ok((signal_power * 10f64.powf(-snr_db / 10.0) / 2.0).sqrt())
}
