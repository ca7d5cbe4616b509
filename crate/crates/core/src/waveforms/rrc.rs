use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Root-raised cosine taps with unit energy.
///
/// Returns `span_symbols * sps + 1` taps centred on the middle one, rounded
/// up to the next odd length when that product is odd.
pub fn design_rrc(beta: f64, sps: usize, span_symbols: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("roll-off {beta} outside [0, 1]")));
    }
    if sps < 2 {
        return Err(Error::InvalidArgument(format!("sps {sps} < 2")));
    }
    if span_symbols < 4 {
        return Err(Error::InvalidArgument(format!("span {span_symbols} < 4 symbols")));
    }
    let len = 2 * (span_symbols * sps).div_ceil(2) + 1;
    let mid = (len - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| rrc_pulse((i as f64 - mid) / sps as f64, beta))
        .collect();
    // exact symmetry regardless of rounding in the pulse evaluation
    for i in 0..len / 2 {
        let avg = 0.5 * (taps[i] + taps[len - 1 - i]);
        taps[i] = avg;
        taps[len - 1 - i] = avg;
    }
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let norm = energy.sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    Ok(taps)
}

/// Continuous RRC pulse at `t` symbol periods.
fn rrc_pulse(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && ((4.0 * beta * t).abs() - 1.0).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}
