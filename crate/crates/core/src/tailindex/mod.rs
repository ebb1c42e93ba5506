//! Tail-index estimation: the Hill estimator and a forward search on the
//! Pareto quantile plot driven by the N-type regression estimator.
//!
//! Samples are analysed through their absolute values, so two-sided heavy
//! tails (e.g. Student's t) contribute both tails.

mod experiment;
mod forward;
mod lms;

use alloc::vec::Vec;

pub use experiment::{tail_experiment, TailExperimentConfig, TailRow};
pub use forward::{forward_search, ForwardSearchConfig, ForwardSearchResult, StopReason};
pub use lms::{lms_line, LmsLine, LMS_EXHAUSTIVE_LIMIT, LMS_RANDOM_PAIRS};

use crate::error::{Error, Result};
use crate::math::{exp, ln, normal_pdf, powf, sorted, sqrt, std_dev, total_cmp};

/// Minimum number of positive values for a Pareto quantile plot.
pub const MIN_PLOT_SAMPLE: usize = 50;
/// Fraction of the largest observations dropped before regression.
pub const DISCARD_FRACTION: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillEstimate {
    pub k: usize,
    pub inv_alpha: f64,
    pub alpha: f64,
}

/// Absolute values sorted ascending.
fn abs_sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sample"));
    }
    let mut v: Vec<f64> = sample.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(total_cmp);
    Ok(v)
}

/// `1/α̂_k = (1/k) Σ_{j=1..k} log X_(n−j+1) − log X_(n−k)` on `|X|`.
pub fn hill(sample: &[f64], k: usize) -> Result<HillEstimate> {
    let v = abs_sorted(sample)?;
    let n = v.len();
    if k == 0 || k >= n {
        return Err(Error::OrderOutOfRange { k, n });
    }
    let threshold = v[n - k - 1];
    if threshold <= 0.0 {
        return Err(Error::NonPositive(threshold));
    }
    let top: f64 = v[n - k..].iter().map(|x| ln(*x)).sum::<f64>() / k as f64;
    let inv_alpha = top - ln(threshold);
    Ok(HillEstimate {
        k,
        inv_alpha,
        alpha: 1.0 / inv_alpha,
    })
}

/// `1/α̂_k` for `k = 1 ..= n − 1`, stopping early at the first non-positive
/// threshold. Entry `i` holds `k = i + 1`.
pub fn hill_curve(sample: &[f64]) -> Result<Vec<f64>> {
    let v = abs_sorted(sample)?;
    let n = v.len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut top = 0.0;
    for k in 1..n {
        top += ln(v[n - k]);
        let threshold = v[n - k - 1];
        if threshold <= 0.0 {
            break;
        }
        out.push(top / k as f64 - ln(threshold));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotPoint {
    /// Rank from the top, `1` is the largest observation.
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

/// Pareto quantile plot, ordered by increasing `j` (decreasing `x`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPlot {
    /// Number of positive sample values the coordinates refer to.
    pub n: usize,
    pub points: Vec<PlotPoint>,
}

/// `x_j = −log(j / (n + 1))`.
pub fn pareto_x(j: usize, n: usize) -> f64 {
    -ln(j as f64 / (n + 1) as f64)
}

impl ParetoPlot {
    /// Plot from explicit points; `x` must strictly decrease and every
    /// `sigma` must be positive.
    pub fn from_points(n: usize, points: Vec<PlotPoint>) -> Result<Self> {
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::NonFinite("plot point"));
        }
        if points
            .iter()
            .any(|p| !(p.sigma.is_finite() && p.sigma > 0.0))
        {
            return Err(Error::InvalidParameter("plot sigmas must be positive"));
        }
        if points.windows(2).any(|w| w[1].x >= w[0].x) {
            return Err(Error::InvalidParameter("plot x must strictly decrease"));
        }
        Ok(Self { n, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Silverman's rule `0.9 min(sd, IQR/1.34) n^{-1/5}`.
pub fn silverman_bandwidth(data: &[f64]) -> Result<f64> {
    if data.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: data.len(),
        });
    }
    let v = sorted(data);
    let sd = std_dev(&v);
    let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if spread.is_nan() || spread <= 0.0 {
        return Err(Error::InvalidParameter("zero spread: bandwidth undefined"));
    }
    Ok(0.9 * spread * powf(v.len() as f64, -0.2))
}

/// Gaussian kernel density estimate over sorted data.
struct GaussianKde<'a> {
    data: &'a [f64],
    bandwidth: f64,
}

impl GaussianKde<'_> {
    fn density(&self, at: f64) -> f64 {
        let reach = 9.0 * self.bandwidth;
        let lo = self.data.partition_point(|&x| x < at - reach);
        let hi = self.data.partition_point(|&x| x <= at + reach);
        let sum: f64 = self.data[lo..hi]
            .iter()
            .map(|&x| normal_pdf((at - x) / self.bandwidth))
            .sum();
        sum / (self.data.len() as f64 * self.bandwidth)
    }
}

/// Builds the Pareto quantile plot of `|sample|`.
///
/// The largest `⌈0.005 n⌉` points are dropped. The scale of `y_j` is the
/// asymptotic standard error of the `p_j` sample quantile of the log data,
/// `√(p(1−p)/n) / ĝ(y_j)`, with `ĝ` a Gaussian KDE of the log sample.
pub fn pareto_plot(sample: &[f64]) -> Result<ParetoPlot> {
    let mut desc: Vec<f64> = abs_sorted(sample)?
        .into_iter()
        .filter(|x| *x > 0.0)
        .collect();
    desc.reverse();
    let n = desc.len();
    if n < MIN_PLOT_SAMPLE {
        return Err(Error::TooFewPoints {
            needed: MIN_PLOT_SAMPLE,
            got: n,
        });
    }
    let logs_desc: Vec<f64> = desc.iter().map(|x| ln(*x)).collect();
    let mut logs: Vec<f64> = logs_desc.clone();
    logs.reverse();
    let kde = GaussianKde {
        data: &logs,
        bandwidth: silverman_bandwidth(&logs)?,
    };
    let discard = libm::ceil(DISCARD_FRACTION * n as f64) as usize;
    let nf = n as f64;
    let points = (discard + 1..=n)
        .map(|j| {
            let y = logs_desc[j - 1];
            let p = 1.0 - j as f64 / (nf + 1.0);
            PlotPoint {
                j,
                x: pareto_x(j, n),
                y,
                sigma: sqrt(p * (1.0 - p) / nf) / kde.density(y),
            }
        })
        .collect();
    ParetoPlot::from_points(n, points)
}

/// Deterministic quantiles `X_(i) = ((n+1)/(n+1−i))^{1/α}` of a Pareto law.
pub fn pareto_quantile_sample(n: usize, alpha: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| exp(ln((n + 1) as f64 / (n + 1 - i) as f64) / alpha))
        .collect()
}
