use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StudentT};

use super::forward::{forward_search, ForwardSearchConfig};
use super::{hill_curve, pareto_plot};
use crate::error::{Error, Result};
use crate::math::{mean, sqrt, std_dev};
use crate::vertex::event_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct TailExperimentConfig {
    pub nu_grid: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub search: ForwardSearchConfig,
}

impl TailExperimentConfig {
    /// `ν = 1, 1.5, …, 10`.
    pub fn default_nu_grid() -> Vec<f64> {
        (0..19).map(|i| 1.0 + 0.5 * i as f64).collect()
    }

    pub fn new(nu_grid: Vec<f64>, n: usize, reps: usize, seed: u64) -> Self {
        Self {
            nu_grid,
            n,
            reps,
            seed,
            search: ForwardSearchConfig::for_sample_size(n),
        }
    }
}

/// Per-ν summary; RMSEs are taken against the true `1/α = 1/ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub nu: f64,
    /// Oracle-optimal Hill order statistic and its proportion `k/n`.
    pub k_opt: usize,
    pub p_opt: f64,
    pub rmse_opt: f64,
    /// Proportion of the sample included by the forward search.
    pub p_used_mean: f64,
    pub p_used_sd: f64,
    pub rmse_alg_a: f64,
    /// Replications where the forward search failed.
    pub n_failed: usize,
}

/// Seed of replication `rep` at grid index `i`.
pub fn replication_seed(seed: u64, i: usize, rep: usize) -> u64 {
    event_seed(event_seed(seed, i as u64), rep as u64)
}

pub fn tail_experiment(config: &TailExperimentConfig) -> Result<Vec<TailRow>> {
    if config.reps == 0 {
        return Err(Error::InvalidParameter("at least one replication required"));
    }
    config.search.validate()?;
    config
        .nu_grid
        .iter()
        .enumerate()
        .map(|(i, &nu)| tail_row(config, i, nu))
        .collect()
}

fn tail_row(config: &TailExperimentConfig, index: usize, nu: f64) -> Result<TailRow> {
    let dist = StudentT::new(nu)
        .map_err(|_| Error::InvalidParameter("degrees of freedom must be positive"))?;
    let truth = 1.0 / nu;
    let n = config.n;
    let mut hill_sq = vec![0.0; n.saturating_sub(1)];
    let mut hill_count = vec![0usize; n.saturating_sub(1)];
    let mut used = Vec::with_capacity(config.reps);
    let mut alg_sq = 0.0;
    let mut n_failed = 0;

    for rep in 0..config.reps {
        let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(config.seed, index, rep));
        let sample: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        for (k, h) in hill_curve(&sample)?.into_iter().enumerate() {
            hill_sq[k] += (h - truth) * (h - truth);
            hill_count[k] += 1;
        }
        match pareto_plot(&sample).and_then(|p| forward_search(&p, &config.search)) {
            Ok(r) => {
                alg_sq += (r.slope - truth) * (r.slope - truth);
                used.push(r.n_included as f64 / n as f64);
            }
            Err(_) => n_failed += 1,
        }
    }

    let (k_opt, rmse_opt) = hill_sq
        .iter()
        .zip(&hill_count)
        .enumerate()
        .filter(|(_, (_, c))| **c == config.reps)
        .map(|(k, (s, c))| (k + 1, sqrt(s / *c as f64)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    if k_opt == 0 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let ok = used.len();
    Ok(TailRow {
        nu,
        k_opt,
        p_opt: k_opt as f64 / n as f64,
        rmse_opt,
        p_used_mean: if ok > 0 { mean(&used) } else { f64::NAN },
        p_used_sd: if ok > 1 { std_dev(&used) } else { f64::NAN },
        rmse_alg_a: if ok > 0 {
            sqrt(alg_sq / ok as f64)
        } else {
            f64::NAN
        },
        n_failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_nineteen_values() {
        let g = TailExperimentConfig::default_nu_grid();
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[18], 10.0);
    }

    #[test]
    fn small_experiment_is_deterministic_and_ordered() {
        let cfg = TailExperimentConfig::new(vec![2.0, 4.0], 500, 4, 11);
        let a = tail_experiment(&cfg).unwrap();
        assert_eq!(a, tail_experiment(&cfg).unwrap());
        for row in &a {
            assert_eq!(row.n_failed, 0);
            assert!(row.rmse_alg_a >= row.rmse_opt);
            assert!(row.p_used_mean > 0.0 && row.p_used_mean <= 1.0);
        }
    }
}
