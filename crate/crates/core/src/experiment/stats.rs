use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Count, mean, population variance and range of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

/// Population variance (divides by `count`), via Welford's update.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Empty("cannot summarize an empty sample".into()));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
        min = min.min(x);
        max = max.max(x);
    }
    Ok(SummaryStats {
        count: values.len(),
        mean: mean.clamp(min, max),
        variance: (m2 / values.len() as f64).max(0.0),
        min,
        max,
    })
}
