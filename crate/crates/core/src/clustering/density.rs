use ndarray::Array2;

use super::{ClusterParams, GridBox};

/// Growth directions in their fixed cycle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Forward in time.
    TimeForward,
    /// Lower in frequency.
    FreqDown,
    /// Backward in time.
    TimeBackward,
    /// Upper in frequency.
    FreqUp,
}

const CYCLE: [Direction; 4] = [
    Direction::TimeForward,
    Direction::FreqDown,
    Direction::TimeBackward,
    Direction::FreqUp,
];

/// One accepted strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub direction: Direction,
    pub strip: GridBox,
    pub passing: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTrace {
    pub seed: (usize, usize),
    pub bbox: GridBox,
    pub expansions: Vec<Expansion>,
}

/// Passing bins with at least `min_neighbors` passing neighbours, row-major.
pub fn find_core_points(mask: &Array2<bool>, params: &ClusterParams) -> Vec<(usize, usize)> {
    let (rows, cols) = mask.dim();
    let offsets = params.neighborhood.offsets();
    let mut cores = Vec::new();
    for t in 0..rows {
        for f in 0..cols {
            if !mask[[t, f]] {
                continue;
            }
            let n = offsets
                .iter()
                .filter(|(dt, df)| {
                    let (tt, ff) = (t as isize + dt, f as isize + df);
                    tt >= 0
                        && ff >= 0
                        && (tt as usize) < rows
                        && (ff as usize) < cols
                        && mask[[tt as usize, ff as usize]]
                })
                .count();
            if n >= params.min_neighbors {
                cores.push((t, f));
            }
        }
    }
    cores
}

/// Summed-area table for O(1) rectangle counts.
struct PassCounts {
    sums: Array2<u32>,
}

impl PassCounts {
    fn new(mask: &Array2<bool>) -> Self {
        let (rows, cols) = mask.dim();
        let mut sums = Array2::<u32>::zeros((rows + 1, cols + 1));
        for t in 0..rows {
            let mut run = 0;
            for f in 0..cols {
                run += mask[[t, f]] as u32;
                sums[[t + 1, f + 1]] = sums[[t, f + 1]] + run;
            }
        }
        PassCounts { sums }
    }

    fn count(&self, b: &GridBox) -> usize {
        let s = &self.sums;
        (s[[b.t_hi + 1, b.f_hi + 1]] + s[[b.t_lo, b.f_lo]] - s[[b.t_lo, b.f_hi + 1]] - s[[b.t_hi + 1, b.f_lo]]) as usize
    }
}

fn strip(b: &GridBox, dir: Direction, rows: usize, cols: usize) -> Option<GridBox> {
    match dir {
        Direction::TimeForward => (b.t_hi + 1 < rows).then(|| GridBox { t_lo: b.t_hi + 1, t_hi: b.t_hi + 1, ..*b }),
        Direction::TimeBackward => (b.t_lo > 0).then(|| GridBox { t_lo: b.t_lo - 1, t_hi: b.t_lo - 1, ..*b }),
        Direction::FreqDown => (b.f_lo > 0).then(|| GridBox { f_lo: b.f_lo - 1, f_hi: b.f_lo - 1, ..*b }),
        Direction::FreqUp => (b.f_hi + 1 < cols).then(|| GridBox { f_lo: b.f_hi + 1, f_hi: b.f_hi + 1, ..*b }),
    }
}

pub fn cluster_spectrogram(mask: &Array2<bool>, core_points: &[(usize, usize)], params: &ClusterParams) -> Vec<GridBox> {
    cluster_spectrogram_traced(mask, core_points, params)
        .into_iter()
        .map(|c| c.bbox)
        .collect()
}

/// Grow a rectangle from every core point not already inside a finished
/// rectangle. Directions are tried in the order forward time, lower
/// frequency, backward time, upper frequency; a strip is kept when its
/// passing fraction reaches `fill_ratio`. Rejected directions are retried
/// on later cycles, and growth stops after a cycle with no accepted strip.
pub fn cluster_spectrogram_traced(
    mask: &Array2<bool>,
    core_points: &[(usize, usize)],
    params: &ClusterParams,
) -> Vec<ClusterTrace> {
    let (rows, cols) = mask.dim();
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let mut order = core_points.to_vec();
    order.sort_unstable();
    order.dedup();
    let counts = PassCounts::new(mask);
    let mut covered = Array2::from_elem((rows, cols), false);
    let mut clusters = Vec::new();

    for (t, f) in order {
        if covered[[t, f]] {
            continue;
        }
        let mut bbox = GridBox::point(t, f);
        let mut expansions = Vec::new();
        loop {
            let mut grew = false;
            for dir in CYCLE {
                let Some(s) = strip(&bbox, dir, rows, cols) else {
                    continue;
                };
                let passing = counts.count(&s);
                if passing as f64 >= params.fill_ratio * s.area() as f64 {
                    bbox.include(s.t_lo, s.f_lo);
                    bbox.include(s.t_hi, s.f_hi);
                    expansions.push(Expansion { direction: dir, strip: s, passing });
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        covered
            .slice_mut(ndarray::s![bbox.t_lo..=bbox.t_hi, bbox.f_lo..=bbox.f_hi])
            .fill(true);
        clusters.push(ClusterTrace { seed: (t, f), bbox, expansions });
    }
    clusters
}
