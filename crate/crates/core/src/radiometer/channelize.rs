use ndarray::Array2;
use rustfft::FftPlanner;

use super::{DetectionGrid, RadiometerConfig};
use crate::error::{Error, Result};
use crate::{Exec, Sample};

pub fn channelize_integrate(samples: &[Sample], cfg: &RadiometerConfig) -> Result<DetectionGrid> {
    channelize_integrate_with(samples, cfg, Exec::default())
}

/// Statistics grid of `samples`; a trailing partial step is discarded.
pub fn channelize_integrate_with(
    samples: &[Sample],
    cfg: &RadiometerConfig,
    exec: Exec,
) -> Result<DetectionGrid> {
    cfg.validate()?;
    let c = cfg.channels;
    let stride = cfg.step_stride();
    if samples.len() < stride {
        return Err(Error::InsufficientInput {
            needed: stride,
            got: samples.len(),
        });
    }
    let steps = samples.len() / stride;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(c);
    let norm = 1.0 / c as f64;
    let half = c / 2;

    let mut stats = vec![0.0f64; steps * c];
    exec.for_each_chunk_mut(&mut stats, c, |step, row| {
        let mut frame = vec![Sample::new(0.0, 0.0); c];
        let mut scratch = vec![Sample::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = &samples[step * stride..(step + 1) * stride];
        for chunk in block.chunks_exact(c) {
            frame.copy_from_slice(chunk);
            fft.process_with_scratch(&mut frame, &mut scratch);
            // bin k -> channel (k + c/2) mod c puts -0.5 cycles/sample at 0
            for (k, v) in frame.iter().enumerate() {
                row[(k + half) % c] += v.norm_sqr() * norm;
            }
        }
    });
    let stats = Array2::from_shape_vec((steps, c), stats).expect("shape matches buffer");
    Ok(DetectionGrid {
        mask: Array2::from_elem((steps, c), false),
        stats,
        step_stride_samples: stride,
    })
}
