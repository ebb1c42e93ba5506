//! Location estimation on a two-component normal mixture with mean-shift
//! outliers, tracing the objective as the temperature falls.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::irls::{
    estimate_location, location_objective, AnnealingSchedule, FitResult, IrlsConfig,
};
use crate::scale::{half_sample_mode, mad_about, median, ScaleEstimate};

/// `h(x) = p φ(x) + (1 − p) φ((x − m)/σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureConfig {
    pub p: f64,
    pub m: f64,
    pub sigma: f64,
    pub n: usize,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self {
            p: 0.7,
            m: 6.0,
            sigma: 1.0,
            n: 500,
        }
    }
}

/// Mixture sample and per-point outlier flags.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSample {
    pub values: Vec<f64>,
    pub is_outlier: Vec<bool>,
}

impl MixtureSample {
    pub fn n_inliers(&self) -> usize {
        self.is_outlier.iter().filter(|o| !**o).count()
    }
}

pub fn mixture_sample<R: Rng + ?Sized>(
    config: &MixtureConfig,
    rng: &mut R,
) -> Result<MixtureSample> {
    if !(0.0..=1.0).contains(&config.p) || !config.m.is_finite() {
        return Err(Error::InvalidParameter("mixture weight must lie in [0, 1]"));
    }
    let inlier = Normal::new(0.0, 1.0).map_err(|_| Error::InvalidParameter("inlier density"))?;
    let outlier = Normal::new(config.m, config.sigma)
        .map_err(|_| Error::InvalidParameter("outlier sigma"))?;
    let mut values = Vec::with_capacity(config.n);
    let mut is_outlier = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let out = rng.random::<f64>() >= config.p;
        values.push(if out {
            outlier.sample(rng)
        } else {
            inlier.sample(rng)
        });
        is_outlier.push(out);
    }
    Ok(MixtureSample { values, is_outlier })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationDemoConfig {
    pub mixture: MixtureConfig,
    pub cutoff: f64,
    pub schedule: AnnealingSchedule,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_steps: usize,
    /// Starting value of the iteration; `None` starts at the sample median.
    pub start: Option<f64>,
    pub seed: u64,
}

impl Default for LocationDemoConfig {
    fn default() -> Self {
        Self {
            mixture: MixtureConfig::default(),
            cutoff: 2.5,
            schedule: AnnealingSchedule::cooling_to(0.1).expect("valid default schedule"),
            mu_min: -4.0,
            mu_max: 10.0,
            mu_steps: 1401,
            start: None,
            seed: 1,
        }
    }
}

impl LocationDemoConfig {
    pub fn mu_grid(&self) -> Vec<f64> {
        let steps = self.mu_steps.max(2);
        (0..steps)
            .map(|i| self.mu_min + (self.mu_max - self.mu_min) * i as f64 / (steps - 1) as f64)
            .collect()
    }
}

/// `M(μ)` on the grid at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveCurve {
    pub temperature: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocationDemo {
    pub sample: MixtureSample,
    pub median: f64,
    pub hsm: f64,
    pub scale_hsm: ScaleEstimate,
    pub scale_median: ScaleEstimate,
    pub start: f64,
    pub fit: FitResult,
    pub mu_grid: Vec<f64>,
    pub curves: Vec<ObjectiveCurve>,
}

impl LocationDemo {
    pub fn estimate(&self) -> f64 {
        self.fit.estimate[0]
    }

    /// Observations with final weight above one half.
    pub fn n_weight_inliers(&self) -> usize {
        self.fit.weights.iter().filter(|w| **w > 0.5).count()
    }

    pub fn final_curve(&self) -> &ObjectiveCurve {
        self.curves.last().expect("at least one temperature")
    }
}

/// Robust scale used by the demo: normal-consistent MAD about the HSM.
pub fn demo_scale(values: &[f64]) -> Result<ScaleEstimate> {
    mad_about(values, half_sample_mode(values)?)
}

/// Objective values on `grid` at temperature `t`.
pub fn objective_curve(
    values: &[f64],
    scale: f64,
    cutoff: f64,
    t: f64,
    grid: &[f64],
) -> Result<Vec<f64>> {
    let kernel = IrlsConfig::normal(cutoff, AnnealingSchedule::fixed(t)?).kernel_at(t)?;
    grid.iter()
        .map(|&mu| location_objective(values, scale, mu, &kernel))
        .collect()
}

pub fn run_location_demo(config: &LocationDemoConfig) -> Result<LocationDemo> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sample = mixture_sample(&config.mixture, &mut rng)?;
    run_location_demo_on(config, sample)
}

pub fn run_location_demo_on(
    config: &LocationDemoConfig,
    sample: MixtureSample,
) -> Result<LocationDemo> {
    let values = &sample.values;
    let med = median(values)?;
    let hsm = half_sample_mode(values)?;
    let scale_hsm = mad_about(values, hsm)?;
    let scale_median = mad_about(values, med)?;
    let s = scale_hsm.consistent;
    if s <= 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate sample: zero robust scale",
        ));
    }
    let start = config.start.unwrap_or(med);
    let irls = IrlsConfig::normal(config.cutoff, config.schedule);
    let fit = estimate_location(values, s, &irls, start)?;
    let mu_grid = config.mu_grid();
    let curves = config
        .schedule
        .temperatures()
        .into_iter()
        .map(|t| {
            Ok(ObjectiveCurve {
                temperature: t,
                values: objective_curve(values, s, config.cutoff, t, &mu_grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocationDemo {
        sample,
        median: med,
        hsm,
        scale_hsm,
        scale_median,
        start,
        fit,
        mu_grid,
        curves,
    })
}

/// Interior strict local minima of a sampled curve; a flat run counts once
/// when both of its neighbours are higher.
pub fn count_local_minima(values: &[f64]) -> usize {
    let mut runs: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if runs.last() != Some(&v) {
            runs.push(v);
        }
    }
    runs.windows(3)
        .filter(|w| w[1] < w[0] && w[1] < w[2])
        .count()
}
