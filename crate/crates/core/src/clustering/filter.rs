use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GridBox;
use crate::error::{Error, Result};

/// Precision repairs; both off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterPolicy {
    /// Absorb boxes lying entirely inside another box.
    pub contained_merge: bool,
    /// Drop boxes with fewer bins than this.
    pub min_area: Option<usize>,
}

impl FilterPolicy {
    pub fn is_noop(&self) -> bool {
        !self.contained_merge && self.min_area.is_none_or(|a| a <= 1)
    }
}

/// Parses `contained-merge`, `min-area=K`, comma separated, or `none`.
impl FromStr for FilterPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = FilterPolicy::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "none" => {}
                "contained-merge" => p.contained_merge = true,
                _ => {
                    let k = item
                        .strip_prefix("min-area=")
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| Error::Config(format!("unknown filter {item:?}")))?;
                    p.min_area = Some(k);
                }
            }
        }
        Ok(p)
    }
}

pub fn filter_detections(boxes: &[GridBox], policy: &FilterPolicy) -> Vec<GridBox> {
    let mut out: Vec<GridBox> = match policy.min_area {
        Some(a) => boxes.iter().copied().filter(|b| b.area() >= a).collect(),
        None => boxes.to_vec(),
    };
    if policy.contained_merge {
        // largest first so containers are kept before their contents
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(out[i].area()));
        let mut kept: Vec<usize> = Vec::new();
        for i in order {
            if !kept.iter().any(|&k| out[k].contains(&out[i])) {
                kept.push(i);
            }
        }
        kept.sort_unstable();
        out = kept.into_iter().map(|i| out[i]).collect();
    }
    out
}
