use statrs::distribution::{ContinuousCDF, Normal};

use super::{DetectionGrid, FitDomain, NoiseModel};
use crate::error::{Error, Result};

/// Fewest statistics accepted for a noise histogram.
pub const MIN_HISTOGRAM_STATS: usize = 64;
const MAX_ITERATIONS: usize = 500;
const INITIAL_STEP: f64 = 0.1;

/// Equal-width histogram over `[0, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Rice rule: `ceil(2 n^(1/3))` bins for `n` values.
pub fn rice_bin_count(n: usize) -> usize {
    ((2.0 * (n as f64).cbrt()).ceil() as usize).max(1)
}

pub fn build_statistic_histogram(values: &[f64]) -> Result<Histogram> {
    if values.len() < MIN_HISTOGRAM_STATS {
        return Err(Error::InsufficientInput {
            needed: MIN_HISTOGRAM_STATS,
            got: values.len(),
        });
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "statistic {bad} is not a finite non-negative value"
        )));
    }
    let bins = rice_bin_count(values.len());
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let width = max / bins as f64;
    let edges = (0..=bins).map(|i| i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = if width > 0.0 {
            ((v / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Width of a Gaussian pulse pinned at the histogram mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub mode_bin: usize,
    pub mode_mu: f64,
    pub sigma: f64,
    pub fit_mse: f64,
    pub iterations: usize,
}

/// Fit `A exp(-(x - mu)^2 / (2 sigma^2))` to the bins below twice the mode
/// index, with `mu` and `A` taken from the mode (refined within the peak
/// bins) and `sigma` found by gradient descent on the mean squared error.
pub fn fit_noise_gaussian(edges: &[f64], counts: &[f64]) -> Result<GaussianFit> {
    if counts.is_empty() || edges.len() != counts.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} edges do not bound {} bins",
            edges.len(),
            counts.len()
        )));
    }
    let k = counts
        .iter()
        .enumerate()
        .fold(0, |best, (i, c)| if *c > counts[best] { i } else { best });
    if k < 2 {
        return Err(Error::DegenerateHistogram { mode_bin: k });
    }
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let (mu, height) = refine_peak(&centers, counts, k);
    let keep = (2 * k).min(counts.len());
    let xs = &centers[..keep];
    let ys = &counts[..keep];

    // normalized objective and its derivative with respect to ln(sigma)
    let objective = |u: f64| -> (f64, f64) {
        let s2 = (2.0 * u).exp();
        let (mut f, mut g) = (0.0, 0.0);
        for (x, y) in xs.iter().zip(ys) {
            let d2 = (x - mu).powi(2);
            let e = (-d2 / (2.0 * s2)).exp();
            let r = (e * height - y) / height;
            f += r * r;
            g += 2.0 * r * e * d2 / s2;
        }
        (f / keep as f64, g / keep as f64)
    };

    let mut u = initial_sigma(&centers, counts, k).ln();
    let (mut f, mut g) = objective(u);
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if g == 0.0 {
            break;
        }
        let trial = u - step * g;
        let (ft, gt) = objective(trial);
        if ft < f {
            let du = (trial - u).abs();
            u = trial;
            f = ft;
            g = gt;
            step *= 1.5;
            if du < 1e-12 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-300 {
                break;
            }
        }
    }
    Ok(GaussianFit {
        mode_bin: k,
        mode_mu: mu,
        sigma: u.exp(),
        fit_mse: f * height * height,
        iterations,
    })
}

/// Vertex of a least-squares parabola through the log counts of the
/// contiguous bins above half maximum around `k`. Falls back to the bin
/// centre when the peak is too narrow or the parabola does not open down.
fn refine_peak(centers: &[f64], counts: &[f64], k: usize) -> (f64, f64) {
    let half = counts[k] / 2.0;
    let mut lo = k;
    while lo > 0 && counts[lo - 1] > half {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < counts.len() && counts[hi + 1] > half {
        hi += 1;
    }
    let fallback = (centers[k], counts[k]);
    if hi - lo < 2 {
        return fallback;
    }
    // centred abscissa in bin units
    let width = centers[1] - centers[0];
    let (mut s, mut sy) = ([0.0f64; 5], [0.0f64; 3]);
    for i in lo..=hi {
        let x = (centers[i] - centers[k]) / width;
        let y = counts[i].ln();
        let mut p = 1.0;
        for (j, sj) in s.iter_mut().enumerate() {
            *sj += p;
            if j < 3 {
                sy[j] += p * y;
            }
            p *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let Some([c0, c1, c2]) = solve3(m, sy) else {
        return fallback;
    };
    if !(c2 < 0.0) {
        return fallback;
    }
    let x = -c1 / (2.0 * c2);
    if !(x.abs() <= (hi - lo) as f64) {
        return fallback;
    }
    (centers[k] + x * width, (c0 + c1 * x + c2 * x * x).exp())
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut a = m;
        for r in 0..3 {
            a[r][c] = b[r];
        }
        *o = det(a) / d;
    }
    Some(out)
}

/// Half width at half maximum on the low side of the mode, as a sigma.
fn initial_sigma(centers: &[f64], counts: &[f64], k: usize) -> f64 {
    let half = counts[k] / 2.0;
    let width = centers[1] - centers[0];
    let hwhm = (0..k)
        .rev()
        .find(|&i| counts[i] < half)
        .map(|i| {
            // interpolate the crossing between bins i and i + 1
            let (c0, c1) = (counts[i], counts[i + 1]);
            let t = if c1 > c0 { (half - c0) / (c1 - c0) } else { 0.5 };
            centers[k] - (centers[i] + t * width)
        })
        .unwrap_or(centers[k]);
    (hwhm / (2.0 * 2f64.ln()).sqrt()).max(width * 1e-3)
}

/// `mu + sigma * z` with `P(N(0,1) > z) = false_alarm_rate`.
pub fn cfar_threshold(mode_mu: f64, sigma: f64, false_alarm_rate: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma {sigma} must be > 0")));
    }
    if !(false_alarm_rate > 0.0 && false_alarm_rate <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "false alarm rate {false_alarm_rate} outside (0, 0.5]"
        )));
    }
    if false_alarm_rate == 0.5 {
        return Ok(mode_mu);
    }
    let z = Normal::standard().inverse_cdf(1.0 - false_alarm_rate);
    Ok(mode_mu + sigma * z)
}

/// Histogram, Gaussian fit and CFAR threshold over a set of statistics.
pub fn fit_noise_model(stats: &[f64], false_alarm_rate: f64, domain: FitDomain) -> Result<NoiseModel> {
    let values: Vec<f64> = stats.iter().map(|&v| domain.forward(v)).collect();
    let hist = build_statistic_histogram(&values)?;
    let fit = fit_noise_gaussian(&hist.edges, &hist.counts_f64())?;
    let t = cfar_threshold(fit.mode_mu, fit.sigma, false_alarm_rate)?;
    Ok(NoiseModel {
        mode_mu: fit.mode_mu,
        sigma: fit.sigma,
        threshold: domain.inverse(t),
        histogram_bins: hist.bins(),
        fit_mse: fit.fit_mse,
        domain,
        false_alarm_rate,
    })
}

/// Fill the mask with `stats > threshold`.
pub fn apply_threshold(mut grid: DetectionGrid, threshold: f64) -> DetectionGrid {
    ndarray::Zip::from(&mut grid.mask)
        .and(&grid.stats)
        .for_each(|m, &s| *m = s > threshold);
    grid
}
