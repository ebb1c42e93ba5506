use std::path::PathBuf;

use anyhow::Result;
use redescend_core::vertex::{
    simulate_events, table1_experiment, ExperimentConfig, Scheme, SimulationConfig,
};

use super::ScheduleArgs;
use crate::output::{num, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 1000)]
    pub events: usize,
    #[arg(long, default_value_t = 20)]
    pub n_primary: usize,
    #[arg(long, default_value_t = 8)]
    pub n_secondary: usize,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sigma_track: f64,
    #[arg(long, default_value_t = 0.3)]
    pub displacement: f64,
    #[arg(long, default_value_t = 0.05)]
    pub vertex_spread: f64,
    #[arg(long = "c", alias = "cutoff", default_value_t = 2.5)]
    pub c: f64,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Tolerance radius for a found vertex; defaults to five ideal standard errors.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<()> {
    let sim = SimulationConfig {
        n_primary: args.n_primary,
        n_secondary: args.n_secondary,
        dim: args.dim,
        sigma_track: args.sigma_track,
        secondary_displacement: args.displacement,
        vertex_spread: args.vertex_spread,
        seed: args.seed,
    };
    let events = simulate_events(&sim, args.events)?;
    let defaults = ExperimentConfig::for_simulation(&sim);
    let config = ExperimentConfig {
        cutoff: args.c,
        radius: args.radius.unwrap_or(defaults.radius),
        annealing: args.schedule.to(1.0)?,
        ..defaults
    };
    let rows = table1_experiment(&events, &Scheme::TABLE, &config)?;
    let mut table = Table::create(
        &args.out,
        "table1.csv",
        &[
            "scheme",
            "primary_w_lt_05",
            "primary_w_gt_05",
            "secondary_w_lt_05",
            "secondary_w_gt_05",
            "n_rec",
        ],
    )?;
    for r in rows {
        table.row([
            r.scheme.label(),
            num(r.primary_w_lt_05),
            num(r.primary_w_gt_05),
            num(r.secondary_w_lt_05),
            num(r.secondary_w_gt_05),
            r.n_rec.to_string(),
        ])?;
    }
    table.finish()
}
