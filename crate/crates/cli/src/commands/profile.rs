use std::path::PathBuf;

use anyhow::Result;
use redescend_core::influence::log_temperature_grid;
use redescend_core::InfluenceProfile;

use crate::output::{num, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Cutoff values.
    #[arg(long = "c", alias = "cutoff", value_delimiter = ',', default_values_t = [1.5, 2.0, 2.5, 3.0])]
    pub c: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub t_max: f64,
    /// Temperatures per decade.
    #[arg(long, default_value_t = 20)]
    pub per_decade: usize,
    /// Contamination level defining the effective rejection point.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<()> {
    let temps = log_temperature_grid(args.t_min, args.t_max, args.per_decade)?;
    let mut table = Table::create(
        &args.out,
        "profile.csv",
        &["c", "T", "K", "r_max", "gamma_star", "rho_eff", "V"],
    )?;
    for &c in &args.c {
        for &t in &temps {
            let p = InfluenceProfile::compute(c, t, args.epsilon)?;
            table.row([p.c, p.t, p.k, p.r_max, p.gamma_star, p.rho_eff, p.v].map(num))?;
        }
    }
    table.finish()
}
