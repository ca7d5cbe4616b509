//! Turning binary decision masks into rectangular detections.
//!
//! Two localizers are provided. [`cluster_spectrogram`] grows axis-aligned
//! rectangles from dense seed bins and only accepts a one-bin-thick strip
//! when enough of it passes the threshold, so a thin bridge between two
//! signals cannot merge them. [`connected_components`] is plain 8-connected
//! labelling for clean masks. [`filter_detections`] applies the optional
//! precision repairs.

mod components;
mod density;
mod filter;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use components::{connected_components, label_components};
pub use density::{cluster_spectrogram, cluster_spectrogram_traced, find_core_points, ClusterTrace, Direction, Expansion};
pub use filter::{filter_detections, FilterPolicy};

/// Inclusive rectangle of grid bins: steps `t_lo..=t_hi`, channels `f_lo..=f_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridBox {
    pub t_lo: usize,
    pub t_hi: usize,
    pub f_lo: usize,
    pub f_hi: usize,
}

impl GridBox {
    pub fn point(t: usize, f: usize) -> Self {
        GridBox { t_lo: t, t_hi: t, f_lo: f, f_hi: f }
    }

    pub fn area(&self) -> usize {
        (self.t_hi - self.t_lo + 1) * (self.f_hi - self.f_lo + 1)
    }

    pub fn contains_point(&self, t: usize, f: usize) -> bool {
        (self.t_lo..=self.t_hi).contains(&t) && (self.f_lo..=self.f_hi).contains(&f)
    }

    pub fn contains(&self, other: &GridBox) -> bool {
        self.t_lo <= other.t_lo && other.t_hi <= self.t_hi && self.f_lo <= other.f_lo && other.f_hi <= self.f_hi
    }

    fn include(&mut self, t: usize, f: usize) {
        self.t_lo = self.t_lo.min(t);
        self.t_hi = self.t_hi.max(t);
        self.f_lo = self.f_lo.min(f);
        self.f_hi = self.f_hi.max(f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L1,
    #[default]
    L2,
}

/// Bins within `radius` of a bin (excluding itself) are its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub norm: Norm,
    pub radius: f64,
}

impl Default for Neighborhood {
    fn default() -> Self {
        Neighborhood {
            norm: Norm::L2,
            radius: std::f64::consts::SQRT_2,
        }
    }
}

impl Neighborhood {
    /// Relative `(dt, df)` offsets of the neighbours.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.radius.max(0.0).floor() as isize + 1;
        let mut out = Vec::new();
        for dt in -r..=r {
            for df in -r..=r {
                if dt == 0 && df == 0 {
                    continue;
                }
                let d = match self.norm {
                    Norm::L1 => (dt.abs() + df.abs()) as f64,
                    Norm::L2 => ((dt * dt + df * df) as f64).sqrt(),
                };
                if d <= self.radius + 1e-9 {
                    out.push((dt, df));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub min_neighbors: usize,
    pub neighborhood: Neighborhood,
    /// Passing fraction a new strip needs to be accepted.
    pub fill_ratio: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            min_neighbors: 5,
            neighborhood: Neighborhood::default(),
            fill_ratio: 0.5,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fill_ratio > 0.0 && self.fill_ratio <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fill ratio {} outside (0, 1]",
                self.fill_ratio
            )));
        }
        if !(self.neighborhood.radius >= 1.0) {
            return Err(Error::InvalidArgument("neighbourhood radius must be >= 1".into()));
        }
        Ok(())
    }
}
