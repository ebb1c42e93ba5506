use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{median_sorted, sorted, total_cmp};

/// Up to this many points every pair is a candidate.
pub const LMS_EXHAUSTIVE_LIMIT: usize = 200;
/// Candidate pairs drawn for larger inputs.
pub const LMS_RANDOM_PAIRS: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmsLine {
    pub slope: f64,
    pub intercept: f64,
    /// The `(⌊n/2⌋+1)`-th smallest squared standardized residual.
    pub criterion: f64,
}

fn criterion(
    xs: &[f64],
    ys: &[f64],
    sigmas: Option<&[f64]>,
    slope: f64,
    intercept: f64,
    buf: &mut Vec<f64>,
) -> f64 {
    buf.clear();
    buf.extend(xs.iter().zip(ys).enumerate().map(|(i, (x, y))| {
        let r = (y - intercept - slope * x) / sigmas.map_or(1.0, |s| s[i]);
        r * r
    }));
    let h = buf.len() / 2;
    *buf.select_nth_unstable_by(h, total_cmp).1
}

/// Least-median-of-squares line through candidate point pairs.
///
/// Ties keep the first candidate in enumeration order. When no pair has
/// distinct abscissae the horizontal line through the median of `y` is
/// returned.
pub fn lms_line(xs: &[f64], ys: &[f64], sigmas: Option<&[f64]>, seed: u64) -> Result<LmsLine> {
    let n = xs.len();
    if ys.len() != n || sigmas.is_some_and(|s| s.len() != n) {
        return Err(Error::Dimension("x, y and sigmas must have equal length"));
    }
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("points"));
    }
    if let Some(s) = sigmas {
        if !s.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::InvalidParameter(
                "sigmas must be positive and finite",
            ));
        }
    }

    let mut best: Option<LmsLine> = None;
    let mut buf = Vec::with_capacity(n);
    let mut consider = |i: usize, j: usize, best: &mut Option<LmsLine>| {
        let dx = xs[j] - xs[i];
        if dx == 0.0 {
            return;
        }
        let slope = (ys[j] - ys[i]) / dx;
        let intercept = ys[i] - slope * xs[i];
        let c = criterion(xs, ys, sigmas, slope, intercept, &mut buf);
        if best.is_none_or(|b| c < b.criterion) {
            *best = Some(LmsLine {
                slope,
                intercept,
                criterion: c,
            });
        }
    };

    if n <= LMS_EXHAUSTIVE_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                consider(i, j, &mut best);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..LMS_RANDOM_PAIRS {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            consider(i.min(j), i.max(j), &mut best);
        }
    }

    Ok(best.unwrap_or_else(|| {
        let intercept = median_sorted(&sorted(ys));
        let c = criterion(xs, ys, sigmas, 0.0, intercept, &mut buf);
        LmsLine {
            slope: 0.0,
            intercept,
            criterion: c,
        }
    }))
}
