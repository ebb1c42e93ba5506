use std::path::PathBuf;

use anyhow::Result;
use redescend_core::tailindex::{
    forward_search, hill, pareto_plot, tail_experiment, ForwardSearchConfig, TailExperimentConfig,
};
use serde::Serialize;

use crate::grid::parse_grid;
use crate::output::{num, read_column, write_json, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Degrees of freedom, `start:step:end` or a comma list.
    #[arg(long, default_value = "1:0.5:10")]
    pub nu_grid: String,
    /// Sample size.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Block size; defaults to one percent of the sample.
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long = "c", alias = "cutoff", default_value_t = 2.576)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 0.5)]
    pub stop_fraction: f64,
    #[arg(long, default_value_t = 0.99)]
    pub weight_ratio: f64,
    /// Analyse one sample from a one-column CSV instead of simulating.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl Args {
    fn search(&self, n: usize) -> ForwardSearchConfig {
        let base = ForwardSearchConfig::for_sample_size(n);
        ForwardSearchConfig {
            block: self.block.unwrap_or(base.block),
            cutoff: self.c,
            temperature: self.temperature,
            stop_fraction: self.stop_fraction,
            weight_ratio: self.weight_ratio,
            lms_seed: self.seed,
            ..base
        }
    }
}

#[derive(Serialize)]
struct TailFit {
    n: usize,
    n_plot: usize,
    block: usize,
    slope: f64,
    intercept: f64,
    alpha: f64,
    n_included: usize,
    proportion: f64,
    stop_reason: &'static str,
    hill_at_included: Option<f64>,
}

pub fn run(args: &Args) -> Result<()> {
    match &args.input {
        Some(path) => fit_sample(args, &read_column(path)?),
        None => simulate(args),
    }
}

fn simulate(args: &Args) -> Result<()> {
    let config = TailExperimentConfig {
        nu_grid: parse_grid(&args.nu_grid)?,
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        search: args.search(args.n),
    };
    let rows = tail_experiment(&config)?;
    let mut oracle = Table::create(
        &args.out,
        "tail_hill_oracle.csv",
        &["nu", "p_opt", "rmse_opt"],
    )?;
    let mut alg = Table::create(
        &args.out,
        "tail_algorithm_a.csv",
        &["nu", "p_used_mean", "p_used_sd", "rmse_algA"],
    )?;
    for r in &rows {
        oracle.row([r.nu, r.p_opt, r.rmse_opt].map(num))?;
        alg.row([r.nu, r.p_used_mean, r.p_used_sd, r.rmse_alg_a].map(num))?;
    }
    oracle.finish()?;
    alg.finish()
}

fn fit_sample(args: &Args, sample: &[f64]) -> Result<()> {
    let plot = pareto_plot(sample)?;
    let search = args.search(plot.n);
    let result = forward_search(&plot, &search)?;

    let mut table = Table::create(
        &args.out,
        "pareto_plot.csv",
        &["j", "x", "y", "sigma", "weight"],
    )?;
    for (i, p) in plot.points.iter().enumerate() {
        let w = result
            .frozen_weights
            .get(i)
            .map_or_else(String::new, |w| num(*w));
        table.row([p.j.to_string(), num(p.x), num(p.y), num(p.sigma), w])?;
    }
    table.finish()?;

    // Hill estimate over the same upper order statistics as the regression.
    let k = result.n_included + plot.points[0].j - 1;
    let fit = TailFit {
        n: sample.len(),
        n_plot: plot.len(),
        block: search.block,
        slope: result.slope,
        intercept: result.intercept,
        alpha: 1.0 / result.slope,
        n_included: result.n_included,
        proportion: result.n_included as f64 / plot.n as f64,
        stop_reason: result.stop_reason.name(),
        hill_at_included: hill(sample, k).ok().map(|h| h.inv_alpha),
    };
    write_json(&args.out, "tail_fit.json", &fit)
}
