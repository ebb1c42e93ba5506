use alloc::vec::Vec;

use super::lms::lms_line;
use super::ParetoPlot;
use crate::error::{Error, Result};
use crate::irls::{fit_linear, weighted_ls_with, AnnealingSchedule, IrlsConfig};
use crate::kernels::EstimatorKernel;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardSearchConfig {
    /// Block size `m`.
    pub block: usize,
    pub cutoff: f64,
    pub temperature: f64,
    pub stop_fraction: f64,
    pub weight_ratio: f64,
    pub lms_seed: u64,
    pub max_inner_iterations: usize,
    pub tol: f64,
}

impl Default for ForwardSearchConfig {
    fn default() -> Self {
        Self {
            block: 10,
            cutoff: 2.576,
            temperature: 1.0,
            stop_fraction: 0.5,
            weight_ratio: 0.99,
            lms_seed: 0,
            max_inner_iterations: 100,
            tol: 1e-10,
        }
    }
}

impl ForwardSearchConfig {
    /// Defaults with `m` set to one percent of `n` (at least 2).
    pub fn for_sample_size(n: usize) -> Self {
        Self {
            block: (n / 100).max(2),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block == 0 {
            return Err(Error::InvalidParameter("block size must be positive"));
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction <= 1.0) {
            return Err(Error::InvalidParameter("stop fraction must lie in (0, 1]"));
        }
        if !(self.weight_ratio > 0.0 && self.weight_ratio <= 1.0) {
            return Err(Error::InvalidParameter("weight ratio must lie in (0, 1]"));
        }
        EstimatorKernel::normal(self.cutoff, self.temperature).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// A new block had too many small weights; it is not included.
    WeightsCollapsed,
    /// Every plot point was included.
    Exhausted,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WeightsCollapsed => "weights_collapsed",
            Self::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSearchResult {
    /// Estimate of `1/α`.
    pub slope: f64,
    pub intercept: f64,
    pub n_included: usize,
    /// Weights of the included points, in plot order.
    pub frozen_weights: Vec<f64>,
    pub stop_reason: StopReason,
}

/// Forward search on the Pareto quantile plot.
///
/// The first block is fitted by fixed-temperature IRLS from the LMS line.
/// Afterwards each block's weights come from the current line and are frozen;
/// the line is refitted by weighted least squares on all included points.
/// The search stops before a block in which at least `stop_fraction` of the
/// weights fall below `weight_ratio · w_max`.
pub fn forward_search(
    plot: &ParetoPlot,
    config: &ForwardSearchConfig,
) -> Result<ForwardSearchResult> {
    config.validate()?;
    let m = config.block;
    let total = plot.len();
    if total < 2 * m {
        return Err(Error::TooFewPoints {
            needed: 2 * m,
            got: total,
        });
    }
    let xs = plot.xs();
    let ys = plot.ys();
    let sigmas = plot.sigmas();
    let design =
        |n: usize| Matrix::from_rows(&xs[..n].iter().map(|x| [1.0, *x]).collect::<Vec<_>>());

    let lms = lms_line(&xs[..m], &ys[..m], Some(&sigmas[..m]), config.lms_seed)?;
    let irls = IrlsConfig {
        max_inner_iterations: config.max_inner_iterations,
        tol: config.tol,
        ..IrlsConfig::normal(config.cutoff, AnnealingSchedule::fixed(config.temperature)?)
    };
    let fit = fit_linear(
        &design(m)?,
        &ys[..m],
        &sigmas[..m],
        &irls,
        Some(&[lms.intercept, lms.slope]),
    )?;
    let mut line = fit.estimate;
    let mut weights = fit.weights;

    let kernel = EstimatorKernel::normal(config.cutoff, config.temperature)?;
    let threshold = config.weight_ratio * kernel.max_weight();
    let mut included = m;
    let stop_reason = loop {
        if included == total {
            break StopReason::Exhausted;
        }
        let end = (included + m).min(total);
        let block: Vec<f64> = (included..end)
            .map(|i| kernel.weight((ys[i] - line[0] - line[1] * xs[i]) / sigmas[i]))
            .collect::<Result<_>>()?;
        let low = block.iter().filter(|w| **w < threshold).count();
        if low as f64 >= config.stop_fraction * block.len() as f64 {
            break StopReason::WeightsCollapsed;
        }
        weights.extend(block);
        included = end;
        line = weighted_ls_with(
            &design(included)?,
            &ys[..included],
            &sigmas[..included],
            &weights,
        )?;
    };

    Ok(ForwardSearchResult {
        slope: line[1],
        intercept: line[0],
        n_included: included,
        frozen_weights: weights,
        stop_reason,
    })
}
