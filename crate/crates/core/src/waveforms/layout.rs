use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BandLayout, Modulation, SignalBurst};
use crate::error::{Error, Result};
use crate::seeds;

/// Randomization ranges for generated band layouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutRanges {
    /// Inclusive range of bursts per record.
    pub bursts: [usize; 2],
    /// Bandwidth in cycles/sample.
    pub bandwidth: [f64; 2],
    /// Duration as a fraction of the record length.
    pub duration_fraction: [f64; 2],
    pub amplitude_db: [f64; 2],
    pub modulations: Vec<Modulation>,
}

impl Default for LayoutRanges {
    fn default() -> Self {
        LayoutRanges {
            bursts: [1, 8],
            bandwidth: [0.01, 0.25],
            duration_fraction: [0.05, 0.8],
            amplitude_db: [-20.0, 0.0],
            modulations: Modulation::ALL.to_vec(),
        }
    }
}

impl LayoutRanges {
    pub fn validate(&self) -> Result<()> {
        let ordered = |name: &str, r: [f64; 2]| {
            if r[0] <= r[1] && r[0].is_finite() && r[1].is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} range {:?} is not ordered", r)))
            }
        };
        if self.bursts[0] > self.bursts[1] {
            return Err(Error::Config(format!("bursts range {:?} is not ordered", self.bursts)));
        }
        ordered("bandwidth", self.bandwidth)?;
        ordered("duration_fraction", self.duration_fraction)?;
        ordered("amplitude_db", self.amplitude_db)?;
        if !(self.bandwidth[0] > 0.0 && self.bandwidth[1] <= 1.0) {
            return Err(Error::Config("bandwidth must lie in (0, 1]".into()));
        }
        if !(self.duration_fraction[0] > 0.0 && self.duration_fraction[1] <= 1.0) {
            return Err(Error::Config("duration_fraction must lie in (0, 1]".into()));
        }
        if self.modulations.is_empty() && self.bursts[1] > 0 {
            return Err(Error::Config("no modulations to draw from".into()));
        }
        Ok(())
    }
}

fn uniform(rng: &mut impl Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

/// Draw a random band layout; identical inputs give identical layouts.
pub fn generate_layout(ranges: &LayoutRanges, record_length: usize, seed: u64) -> Result<BandLayout> {
    ranges.validate()?;
    if record_length == 0 {
        return Err(Error::Config("record length must be > 0".into()));
    }
    let mut rng = seeds::rng(seed);
    let count = rng.random_range(ranges.bursts[0]..=ranges.bursts[1]);
    let bursts = (0..count)
        .map(|_| {
            let modulation = ranges.modulations[rng.random_range(0..ranges.modulations.len())];
            let bandwidth = uniform(&mut rng, ranges.bandwidth);
            let half = bandwidth / 2.0;
            // keep the upper edge strictly inside so the centre stays < 0.5
            let center_freq = uniform(&mut rng, [-0.5 + half, (0.5 - half).max(-0.5 + half)]);
            let frac = uniform(&mut rng, ranges.duration_fraction);
            let duration_samples = ((frac * record_length as f64).round() as usize).clamp(1, record_length);
            let start_sample = rng.random_range(0..=record_length - duration_samples);
            SignalBurst {
                modulation,
                center_freq,
                bandwidth,
                start_sample,
                duration_samples,
                amplitude_db: uniform(&mut rng, ranges.amplitude_db),
                rolloff: None,
            }
        })
        .collect();
    let layout = BandLayout {
        record_length_samples: record_length,
        bursts,
        rng_seed: seed,
    };
    layout.validate()?;
    Ok(layout)
}
