use std::path::PathBuf;

use anyhow::Result;
use redescend_core::demo::{
    count_local_minima, run_location_demo, LocationDemoConfig, MixtureConfig,
};
use serde::Serialize;

use super::ScheduleArgs;
use crate::output::{num, write_json, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Inlier proportion.
    #[arg(long, default_value_t = 0.7)]
    pub p: f64,
    /// Outlier mean shift.
    #[arg(long, default_value_t = 6.0)]
    pub m: f64,
    /// Outlier standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long = "c", alias = "cutoff", default_value_t = 2.5)]
    pub c: f64,
    #[arg(long, default_value_t = 0.1)]
    pub t_end: f64,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 1401)]
    pub mu_steps: usize,
    /// Starting value; defaults to the sample median.
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Step {
    temperature: f64,
    start: f64,
    estimate: f64,
    iterations: usize,
    converged: bool,
    local_minima: usize,
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    n: usize,
    n_inliers: usize,
    n_outliers: usize,
    n_weight_gt_05: usize,
    n_weight_lt_05: usize,
    median: f64,
    half_sample_mode: f64,
    mad_about_hsm: f64,
    mad_about_median: f64,
    cutoff: f64,
    start: f64,
    estimate: f64,
    converged: bool,
    steps: Vec<Step>,
}

pub fn run(args: &Args) -> Result<()> {
    let config = LocationDemoConfig {
        mixture: MixtureConfig {
            p: args.p,
            m: args.m,
            sigma: args.sigma,
            n: args.n,
        },
        cutoff: args.c,
        schedule: args.schedule.to(args.t_end)?,
        mu_min: args.mu_min,
        mu_max: args.mu_max,
        mu_steps: args.mu_steps,
        start: args.start,
        seed: args.seed,
    };
    let demo = run_location_demo(&config)?;

    let mut sample = Table::create(&args.out, "sample.csv", &["x", "outlier", "weight"])?;
    for ((x, o), w) in demo
        .sample
        .values
        .iter()
        .zip(&demo.sample.is_outlier)
        .zip(&demo.fit.weights)
    {
        sample.row([num(*x), (*o as u8).to_string(), num(*w)])?;
    }
    sample.finish()?;

    let mut objective = Table::create(&args.out, "objective.csv", &["T", "mu", "M"])?;
    for curve in &demo.curves {
        for (mu, m) in demo.mu_grid.iter().zip(&curve.values) {
            objective.row([curve.temperature, *mu, *m].map(num))?;
        }
    }
    objective.finish()?;

    let n = demo.sample.values.len();
    let n_inliers = demo.sample.n_inliers();
    let n_weight_gt_05 = demo.n_weight_inliers();
    let steps = demo
        .fit
        .trace
        .iter()
        .zip(&demo.curves)
        .map(|(s, c)| Step {
            temperature: s.temperature,
            start: s.start[0],
            estimate: s.estimate[0],
            iterations: s.iterations,
            converged: s.converged,
            local_minima: count_local_minima(&c.values),
        })
        .collect();
    let summary = Summary {
        seed: args.seed,
        n,
        n_inliers,
        n_outliers: n - n_inliers,
        n_weight_gt_05,
        n_weight_lt_05: n - n_weight_gt_05,
        median: demo.median,
        half_sample_mode: demo.hsm,
        mad_about_hsm: demo.scale_hsm.consistent,
        mad_about_median: demo.scale_median.consistent,
        cutoff: args.c,
        start: demo.start,
        estimate: demo.estimate(),
        converged: demo.fit.converged,
        steps,
    };
    write_json(&args.out, "location_summary.json", &summary)
}
