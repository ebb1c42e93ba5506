//! Robust pre-estimates of location and scale: the half-sample mode and the
//! median absolute deviation about an arbitrary center.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{median_sorted, sorted, total_cmp};

/// Normal-consistency factor of the MAD, `1 / Φ⁻¹(3/4)`.
pub const MAD_NORMAL_CONSISTENCY: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub raw: f64,
    pub consistent: f64,
    pub center: f64,
}

fn check(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sample"));
    }
    Ok(())
}

pub fn median(data: &[f64]) -> Result<f64> {
    check(data)?;
    Ok(median_sorted(&sorted(data)))
}

/// Half-sample mode by recursive shortest half.
///
/// The sorted sample is repeatedly replaced by the contiguous run of
/// `⌈n/2⌉` points with the smallest range until at most two points remain,
/// whose mean is returned. Ranges equal up to rounding are ties and go to the
/// leftmost run.
pub fn half_sample_mode(data: &[f64]) -> Result<f64> {
    check(data)?;
    let v = sorted(data);
    let magnitude = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tie = 8.0 * f64::EPSILON * magnitude;
    let mut lo = 0;
    let mut len = v.len();
    while len > 2 {
        let h = len.div_ceil(2);
        let mut best = lo;
        let mut best_range = v[lo + h - 1] - v[lo];
        for i in lo + 1..=lo + len - h {
            let range = v[i + h - 1] - v[i];
            if range < best_range - tie {
                best = i;
                best_range = range;
            }
        }
        lo = best;
        len = h;
    }
    Ok(v[lo..lo + len].iter().sum::<f64>() / len as f64)
}

/// Median absolute deviation about `center`.
pub fn mad_about(data: &[f64], center: f64) -> Result<ScaleEstimate> {
    check(data)?;
    if !center.is_finite() {
        return Err(Error::NonFinite("center"));
    }
    let mut dev: Vec<f64> = data.iter().map(|x| (x - center).abs()).collect();
    dev.sort_unstable_by(total_cmp);
    let raw = median_sorted(&dev);
    Ok(ScaleEstimate {
        raw,
        consistent: raw * MAD_NORMAL_CONSISTENCY,
        center,
    })
}

/// MAD about the half-sample mode.
pub fn mad_about_hsm(data: &[f64]) -> Result<ScaleEstimate> {
    mad_about(data, half_sample_mode(data)?)
}

/// MAD about the sample median.
pub fn mad_about_median(data: &[f64]) -> Result<ScaleEstimate> {
    mad_about(data, median(data)?)
}
