//! Arbitrary-ratio polyphase resampler.
//!
//! The prototype is a Kaiser-windowed sinc tabulated at [`PHASES`] points
//! per input sample; fractional delays between tabulated phases are linearly
//! interpolated. When decimating, the prototype is stretched so its cutoff
//! sits at the output Nyquist frequency.

use std::f64::consts::PI;

use crate::Sample;

/// Table resolution per unit of (scaled) time.
const PHASES: usize = 512;
/// Half width of the prototype in scaled time units.
const HALF_WIDTH: usize = 8;
const KAISER_BETA: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct Resampler {
    ratio: f64,
    scale: f64,
    table: Vec<f64>,
}

impl Resampler {
    /// `ratio` is output rate over input rate.
    pub fn new(ratio: f64) -> Self {
        assert!(ratio > 0.0 && ratio.is_finite(), "resample ratio must be > 0");
        let scale = ratio.min(1.0);
        let n = 2 * HALF_WIDTH * PHASES + 1;
        let i0_beta = bessel_i0(KAISER_BETA);
        let table = (0..n)
            .map(|i| {
                let u = i as f64 / PHASES as f64 - HALF_WIDTH as f64;
                let w = 1.0 - (u / HALF_WIDTH as f64).powi(2);
                let win = bessel_i0(KAISER_BETA * w.max(0.0).sqrt()) / i0_beta;
                scale * sinc(u) * win
            })
            .collect();
        Resampler {
            ratio,
            scale,
            table,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Input samples needed on each side of an output instant.
    pub fn margin(&self) -> usize {
        (HALF_WIDTH as f64 / self.scale).ceil() as usize + 1
    }

    fn kernel(&self, t: f64) -> f64 {
        let u = t * self.scale;
        let pos = (u + HALF_WIDTH as f64) * PHASES as f64;
        if pos <= 0.0 || pos >= (self.table.len() - 1) as f64 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.table[i] + frac * (self.table[i + 1] - self.table[i])
    }

    /// Produce `out_len` samples; output `m` sits at input time
    /// `offset + m / ratio`. Input outside its bounds is treated as zero.
    pub fn process(&self, input: &[Sample], offset: f64, out_len: usize) -> Vec<Sample> {
        let reach = HALF_WIDTH as f64 / self.scale;
        (0..out_len)
            .map(|m| {
                let tau = offset + m as f64 / self.ratio;
                let lo = ((tau - reach).ceil().max(0.0)) as usize;
                let hi = ((tau + reach).floor() as isize).min(input.len() as isize - 1);
                let mut acc = Sample::new(0.0, 0.0);
                if hi < lo as isize {
                    return acc;
                }
                for (n, x) in input.iter().enumerate().take(hi as usize + 1).skip(lo) {
                    acc += x * self.kernel(tau - n as f64);
                }
                acc
            })
            .collect()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}
