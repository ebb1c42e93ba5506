pub mod kernel_dump;
pub mod location;
pub mod profile;
pub mod tail;
pub mod vertex;

use clap::Args as ClapArgs;
use redescend_core::AnnealingSchedule;

/// Annealing schedule flags shared by several commands.
#[derive(Debug, Clone, ClapArgs)]
pub struct ScheduleArgs {
    /// Initial temperature.
    #[arg(long, default_value_t = 256.0)]
    pub t0: f64,
    /// Geometric cooling factor.
    #[arg(long, default_value_t = 0.25)]
    pub q: f64,
    /// Schedule stops once within this distance of the final temperature.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon_t: f64,
}

impl ScheduleArgs {
    pub fn to(&self, t_end: f64) -> redescend_core::Result<AnnealingSchedule> {
        AnnealingSchedule::new(self.t0, t_end, self.q, self.epsilon_t)
    }
}
