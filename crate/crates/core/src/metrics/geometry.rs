use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::GridBox;
use crate::error::{Error, Result};
use crate::waveforms::SigmfRecord;

/// Half-open sample interval times a frequency interval (cycles/sample).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFreqBox {
    pub start_sample: usize,
    pub stop_sample: usize,
    pub freq_lo: f64,
    pub freq_hi: f64,
}

impl TimeFreqBox {
    pub fn new(start_sample: usize, stop_sample: usize, freq_lo: f64, freq_hi: f64) -> Result<Self> {
        let b = TimeFreqBox { start_sample, stop_sample, freq_lo, freq_hi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_sample >= self.stop_sample {
            return Err(Error::InvalidArgument(format!(
                "empty time interval [{}, {})",
                self.start_sample, self.stop_sample
            )));
        }
        if !(self.freq_lo < self.freq_hi) || self.freq_lo < -0.5 - 1e-9 || self.freq_hi > 0.5 + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "frequency interval [{}, {}) invalid",
                self.freq_lo, self.freq_hi
            )));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        (self.stop_sample - self.start_sample) as f64
    }

    pub fn bandwidth(&self) -> f64 {
        self.freq_hi - self.freq_lo
    }

    pub fn area(&self) -> f64 {
        self.duration() * self.bandwidth()
    }
}

/// Intersection over union in the (samples x frequency) plane.
pub fn iou(a: &TimeFreqBox, b: &TimeFreqBox) -> f64 {
    let dt = a.stop_sample.min(b.stop_sample) as f64 - a.start_sample.max(b.start_sample) as f64;
    let df = a.freq_hi.min(b.freq_hi) - a.freq_lo.max(b.freq_lo);
    if dt <= 0.0 || df <= 0.0 {
        return 0.0;
    }
    let inter = dt * df;
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Which grid bins a continuous box paints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterRule {
    /// Bins whose centre lies inside the box.
    #[default]
    Center,
    /// Every bin the box touches.
    Inclusive,
}

/// Mapping between grid indices and absolute units. Step `t` covers samples
/// `[t * stride, (t + 1) * stride)`; channel `j` is centred on
/// `-0.5 + j / channels` and is one channel width wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub step_stride_samples: usize,
    pub channels: usize,
    pub steps: usize,
}

impl GridGeometry {
    pub fn channel_width(&self) -> f64 {
        1.0 / self.channels as f64
    }

    fn channel_edges(&self, j: usize) -> (f64, f64) {
        let c = self.channels as f64;
        (-0.5 + (j as f64 - 0.5) / c, -0.5 + (j as f64 + 0.5) / c)
    }

    /// Absolute box covered by grid bins, clamped to the sampled band.
    pub fn to_absolute(&self, b: &GridBox) -> TimeFreqBox {
        TimeFreqBox {
            start_sample: b.t_lo * self.step_stride_samples,
            stop_sample: (b.t_hi + 1) * self.step_stride_samples,
            freq_lo: self.channel_edges(b.f_lo).0.max(-0.5),
            freq_hi: self.channel_edges(b.f_hi).1.min(0.5),
        }
    }

    /// Grid bins painted by `b`, or `None` when it paints nothing.
    pub fn rasterize(&self, b: &TimeFreqBox, rule: RasterRule) -> Option<GridBox> {
        let stride = self.step_stride_samples as f64;
        let c = self.channels as f64;
        let (t_lo, t_hi, f_lo, f_hi) = match rule {
            RasterRule::Inclusive => (
                (b.start_sample / self.step_stride_samples) as isize,
                ((b.stop_sample - 1) / self.step_stride_samples) as isize,
                ((b.freq_lo + 0.5) * c - 0.5).floor() as isize + 1,
                ((b.freq_hi + 0.5) * c + 0.5).ceil() as isize - 1,
            ),
            RasterRule::Center => (
                (b.start_sample as f64 / stride - 0.5).ceil() as isize,
                (b.stop_sample as f64 / stride - 0.5).ceil() as isize - 1,
                ((b.freq_lo + 0.5) * c).ceil() as isize,
                ((b.freq_hi + 0.5) * c).ceil() as isize - 1,
            ),
        };
        let t_lo = t_lo.max(0);
        let t_hi = t_hi.min(self.steps as isize - 1);
        let f_lo = f_lo.max(0);
        let f_hi = f_hi.min(self.channels as isize - 1);
        (t_lo <= t_hi && f_lo <= f_hi).then_some(GridBox {
            t_lo: t_lo as usize,
            t_hi: t_hi as usize,
            f_lo: f_lo as usize,
            f_hi: f_hi as usize,
        })
    }

    /// Binary mask painted by a set of boxes.
    pub fn rasterize_all(&self, boxes: &[TimeFreqBox], rule: RasterRule) -> Array2<bool> {
        let mut mask = Array2::from_elem((self.steps, self.channels), false);
        for g in boxes.iter().filter_map(|b| self.rasterize(b, rule)) {
            mask.slice_mut(ndarray::s![g.t_lo..=g.t_hi, g.f_lo..=g.f_hi]).fill(true);
        }
        mask
    }
}

/// Ground-truth boxes from a record's annotations.
pub fn boxes_from_annotations(record: &SigmfRecord) -> Result<Vec<TimeFreqBox>> {
    record.check_annotations()?;
    record
        .annotations()
        .iter()
        .map(|a| {
            TimeFreqBox::new(
                a.sample_start,
                a.sample_start + a.sample_count,
                a.freq_lower_edge.max(-0.5),
                a.freq_upper_edge.min(0.5),
            )
            .map_err(|e| Error::Consistency(e.to_string()))
        })
        .collect()
}
