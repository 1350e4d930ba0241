use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot summarize an empty sample")]
pub struct EmptySamples;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation (divides by n).
    pub stddev: f64,
    pub histogram: BTreeMap<i64, u64>,
}

/// Integer-dollar bucket: nearest integer, halves rounded up (17.5 -> 18, -0.5 -> 0).
pub fn bucket(s: f64) -> i64 {
    let f = s.floor();
    if s - f >= 0.5 {
        f as i64 + 1
    } else {
        f as i64
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn summarize(samples: &[f64]) -> Result<Summary, EmptySamples> {
    if samples.is_empty() {
        return Err(EmptySamples);
    }
    let n = samples.len() as f64;
    let mean = compensated_sum(samples.iter().copied()) / n;
    let var = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean))) / n;
    let mut histogram = BTreeMap::new();
    for s in samples {
        *histogram.entry(bucket(*s)).or_insert(0) += 1;
    }
    Ok(Summary {
        mean,
        stddev: var.sqrt(),
        histogram,
    })
}

/// Fraction of samples whose bucket lies in `lo..=hi`.
pub fn bucket_share(histogram: &BTreeMap<i64, u64>, lo: i64, hi: i64) -> f64 {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return 0.0;
    }
    let inside: u64 = histogram.range(lo..=hi).map(|(_, c)| c).sum();
    inside as f64 / total as f64
}
