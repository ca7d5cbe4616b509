//! Scoring localizers against ground truth.
//!
//! Predictions and truths meet as [`TimeFreqBox`]es in absolute units
//! (samples x cycles/sample). A prediction is a true positive when it wins a
//! greedy one-to-one match at IoU >= threshold; precision is `TP / (TP + FP)`
//! (1.0 with no predictions) and recall is `TP / P`.

mod geometry;
mod matching;
mod sgm1;
mod sweep;

pub use geometry::{boxes_from_annotations, iou, GridGeometry, RasterRule, TimeFreqBox};
pub use matching::{match_and_score, MatchResult};
pub use sgm1::{read_mask, write_mask, Sgm1Mask, SGM1_HEADER_LEN, SGM1_MAGIC};
pub use sweep::{snr_grid, sweep_snr, EvalReport, EvalRow, Localizer, OracleLocalizer, SweepSpec, TestCase};
