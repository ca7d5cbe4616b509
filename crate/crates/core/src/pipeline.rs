//! End-to-end localizers: radiometer grid to absolute boxes, and binary
//! masks to absolute boxes.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    cluster_spectrogram, connected_components, filter_detections, find_core_points, ClusterParams, FilterPolicy,
    GridBox,
};
use crate::error::Result;
use crate::metrics::{GridGeometry, Localizer, TimeFreqBox};
use crate::radiometer::{apply_threshold, channelize_integrate_with, fit_noise_model, NoiseModel, RadiometerConfig};
use crate::{Exec, Sample};

/// When the noise model is fitted during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFitPolicy {
    /// Once per SNR step, on a dedicated calibration realization.
    #[default]
    PerStep,
    /// On every trial's own record.
    PerTrial,
}

/// How mask bins are grouped into boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    #[default]
    Density,
    Components,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiometerPipeline {
    pub radiometer: RadiometerConfig,
    pub cluster: ClusterParams,
    pub grouping: Grouping,
    pub filters: FilterPolicy,
    pub noise_fit: NoiseFitPolicy,
    #[serde(skip)]
    pub exec: Exec,
}

#[derive(Debug, Clone)]
pub struct Detections {
    pub geometry: GridGeometry,
    pub boxes: Vec<GridBox>,
    pub mask: Array2<bool>,
    pub noise: NoiseModel,
}

impl Detections {
    pub fn absolute(&self) -> Vec<TimeFreqBox> {
        self.boxes.iter().map(|b| self.geometry.to_absolute(b)).collect()
    }

    pub fn document(&self) -> DetectionsDocument {
        DetectionsDocument {
            geometry: self.geometry,
            channel_width: self.geometry.channel_width(),
            noise_model: Some(self.noise),
            grid_boxes: self.boxes.clone(),
            boxes: self.absolute(),
        }
    }
}

/// JSON form of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionsDocument {
    pub geometry: GridGeometry,
    pub channel_width: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_model: Option<NoiseModel>,
    pub grid_boxes: Vec<GridBox>,
    pub boxes: Vec<TimeFreqBox>,
}

impl RadiometerPipeline {
    pub fn validate(&self) -> Result<()> {
        self.radiometer.validate()?;
        self.cluster.validate()
    }

    /// Fit a noise model on the radiometer statistics of `samples`.
    pub fn fit_noise(&self, samples: &[Sample]) -> Result<NoiseModel> {
        let grid = channelize_integrate_with(samples, &self.radiometer, self.exec)?;
        fit_noise_model(
            grid.stats.as_slice().expect("standard layout"),
            self.radiometer.false_alarm_rate,
            self.radiometer.fit_domain,
        )
    }

    /// Channelize, threshold, group and filter. Fits the noise model on
    /// `samples` unless one is supplied.
    pub fn detect(&self, samples: &[Sample], noise: Option<&NoiseModel>) -> Result<Detections> {
        let grid = channelize_integrate_with(samples, &self.radiometer, self.exec)?;
        let noise = match noise {
            Some(n) => *n,
            None => fit_noise_model(
                grid.stats.as_slice().expect("standard layout"),
                self.radiometer.false_alarm_rate,
                self.radiometer.fit_domain,
            )?,
        };
        let grid = apply_threshold(grid, noise.threshold);
        let geometry = GridGeometry {
            step_stride_samples: grid.step_stride_samples,
            channels: grid.channels(),
            steps: grid.steps(),
        };
        let raw = match self.grouping {
            Grouping::Density => {
                let cores = find_core_points(&grid.mask, &self.cluster);
                cluster_spectrogram(&grid.mask, &cores, &self.cluster)
            }
            Grouping::Components => connected_components(&grid.mask),
        };
        Ok(Detections {
            geometry,
            boxes: filter_detections(&raw, &self.filters),
            mask: grid.mask,
            noise,
        })
    }
}

impl Localizer for RadiometerPipeline {
    type Calibration = Option<NoiseModel>;

    fn calibrate(&self, noisy: &[Sample]) -> Result<Option<NoiseModel>> {
        match self.noise_fit {
            NoiseFitPolicy::PerStep => self.fit_noise(noisy).map(Some),
            NoiseFitPolicy::PerTrial => Ok(None),
        }
    }

    fn localize(&self, cal: &Option<NoiseModel>, noisy: &[Sample]) -> Result<Vec<TimeFreqBox>> {
        Ok(self.detect(noisy, cal.as_ref())?.absolute())
    }
}

/// Boxes from a binary mask via connected components and filters.
pub fn localize_mask(mask: &Array2<bool>, geometry: &GridGeometry, filters: &FilterPolicy) -> Vec<TimeFreqBox> {
    filter_detections(&connected_components(mask), filters)
        .iter()
        .map(|b| geometry.to_absolute(b))
        .collect()
}
