use serde::{Deserialize, Serialize};

use super::{iou, TimeFreqBox};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    /// Number of ground-truth objects.
    pub p: usize,
    /// Accepted `(prediction, truth, iou)` pairs.
    pub pairs: Vec<(usize, usize, f64)>,
}

impl MatchResult {
    /// `TP / (TP + FP)`, defined as 1.0 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    /// `TP / P`; 0.0 with no ground truth.
    pub fn recall(&self) -> f64 {
        if self.p == 0 {
            0.0
        } else {
            self.tp as f64 / self.p as f64
        }
    }

    /// Sum counts of independent trials; pairs are not carried over.
    pub fn accumulate(&mut self, other: &MatchResult) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.p += other.p;
    }
}

/// Greedy one-to-one matching in descending IoU order.
pub fn match_and_score(preds: &[TimeFreqBox], truths: &[TimeFreqBox], iou_threshold: f64) -> MatchResult {
    let mut candidates: Vec<(usize, usize, f64)> = preds
        .iter()
        .enumerate()
        .flat_map(|(i, p)| truths.iter().enumerate().map(move |(j, t)| (i, j, iou(p, t))))
        .filter(|&(_, _, v)| v >= iou_threshold && v > 0.0)
        .collect();
    // ties break on (pred, truth) index for determinism
    candidates.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut pred_used = vec![false; preds.len()];
    let mut truth_used = vec![false; truths.len()];
    let mut pairs = Vec::new();
    for (i, j, v) in candidates {
        if !pred_used[i] && !truth_used[j] {
            pred_used[i] = true;
            truth_used[j] = true;
            pairs.push((i, j, v));
        }
    }
    MatchResult {
        tp: pairs.len(),
        fp: preds.len() - pairs.len(),
        p: truths.len(),
        pairs,
    }
}
