use super::{modulate_burst, BandLayout, SigmfMeta, SigmfRecord};
use crate::error::Result;
use crate::{seeds, Exec, Sample};

/// Noise-free record: the sum of every burst of `layout` at its place.
pub fn synthesize_record(layout: &BandLayout) -> Result<SigmfRecord> {
    synthesize_record_with(layout, Exec::default())
}

pub fn synthesize_record_with(layout: &BandLayout, exec: Exec) -> Result<SigmfRecord> {
    layout.validate()?;
    let waves = exec.map_range(layout.bursts.len(), |i| {
        modulate_burst(&layout.bursts[i], seeds::derive(layout.rng_seed, &[i as u64]))
    });
    let mut samples = vec![Sample::new(0.0, 0.0); layout.record_length_samples];
    for (burst, wave) in layout.bursts.iter().zip(waves) {
        let wave = wave?;
        for (dst, v) in samples[burst.start_sample..].iter_mut().zip(wave) {
            *dst += v;
        }
    }
    Ok(SigmfRecord {
        meta: SigmfMeta::for_layout(layout),
        samples,
    })
}
