use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use redescend_core::{EstimatorKernel, KernelKind};

use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Normal,
    Hs,
    T,
    Welsch,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Kind::Normal)]
    pub kind: Kind,
    /// Degrees of freedom of the t kernel.
    #[arg(long, default_value_t = 3.0)]
    pub nu: f64,
    #[arg(long = "c", alias = "cutoff", default_value_t = 2.5)]
    pub c: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 1.0, 0.01])]
    pub temperatures: Vec<f64>,
    /// Residual grid spans [-r_max, r_max].
    #[arg(long, default_value_t = 6)]
    pub r_max: u32,
    /// Grid points per unit residual; the grid hits every r = i / points_per_unit exactly.
    #[arg(long, default_value_t = 20)]
    pub points_per_unit: u32,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<()> {
    let kind = match args.kind {
        Kind::Normal => KernelKind::Normal,
        Kind::Hs => KernelKind::HyperbolicSecant,
        Kind::T => KernelKind::StudentT { nu: args.nu },
        Kind::Welsch => KernelKind::Welsch,
    };
    let ppu = args.points_per_unit.max(1) as i64;
    let half = args.r_max as i64 * ppu;
    let mut table = Table::create(&args.out, "kernel_dump.csv", &["r", "T", "w", "psi", "rho"])?;
    for &t in &args.temperatures {
        let kernel = EstimatorKernel::new(kind, args.c, t)?;
        for i in -half..=half {
            let r = i as f64 / ppu as f64;
            let v = kernel.evaluate(r)?;
            table.row([r, t, v.w, v.psi, v.rho].map(num))?;
        }
    }
    table.finish()
}
