//! Annealed iteratively reweighted least squares.
//!
//! At each temperature of an [`AnnealingSchedule`] the weighted fixed point
//! is iterated to convergence, and its solution starts the next, cooler
//! temperature. Each inner step is a majorize–minimize step because the
//! weights decrease in `|r|`, so the objective `M = Σ ρ(r_i)` does not
//! increase within a temperature.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernels::{EstimatorKernel, KernelKind};
use crate::linalg::{weighted_least_squares, Matrix};
use crate::math::sqrt;

/// Weight sums below this mean every observation has been rejected.
pub const MIN_WEIGHT_SUM: f64 = 1e-30;

/// Geometric approach `T_{i+1} = T_end + q (T_i − T_end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealingSchedule {
    pub t0: f64,
    pub t_end: f64,
    pub q: f64,
    pub epsilon_t: f64,
}

impl AnnealingSchedule {
    pub const DEFAULT_T0: f64 = 256.0;
    pub const DEFAULT_Q: f64 = 0.25;
    pub const DEFAULT_EPSILON_T: f64 = 1e-3;

    pub fn new(t0: f64, t_end: f64, q: f64, epsilon_t: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidParameter(
                "final temperature must be positive",
            ));
        }
        if !(t0.is_finite() && t0 >= t_end) {
            return Err(Error::InvalidParameter(
                "initial temperature must be >= final temperature",
            ));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(
                "cooling factor q must lie in (0, 1)",
            ));
        }
        if !(epsilon_t.is_finite() && epsilon_t > 0.0) {
            return Err(Error::InvalidParameter(
                "temperature slack must be positive",
            ));
        }
        Ok(Self {
            t0,
            t_end,
            q,
            epsilon_t,
        })
    }

    /// `T0 = 256`, `q = 0.25`, `ε_T = 1e-3` down to `t_end`.
    pub fn cooling_to(t_end: f64) -> Result<Self> {
        Self::new(
            Self::DEFAULT_T0,
            t_end,
            Self::DEFAULT_Q,
            Self::DEFAULT_EPSILON_T,
        )
    }

    /// A single temperature, i.e. plain IRLS without annealing.
    pub fn fixed(t: f64) -> Result<Self> {
        Self::new(t, t, Self::DEFAULT_Q, Self::DEFAULT_EPSILON_T)
    }

    /// The temperatures visited, ending with exactly `t_end`.
    pub fn temperatures(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t = self.t0;
        while t - self.t_end >= self.epsilon_t {
            out.push(t);
            t = self.t_end + self.q * (t - self.t_end);
        }
        out.push(self.t_end);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsConfig {
    pub kind: KernelKind,
    pub cutoff: f64,
    pub schedule: AnnealingSchedule,
    pub max_inner_iterations: usize,
    /// Convergence threshold on the parameter change in scaled units.
    pub tol: f64,
}

impl IrlsConfig {
    pub const DEFAULT_TOL: f64 = 1e-8;
    pub const DEFAULT_MAX_INNER: usize = 100;

    /// N-type kernel with default inner-loop settings.
    pub fn normal(cutoff: f64, schedule: AnnealingSchedule) -> Self {
        Self {
            kind: KernelKind::Normal,
            cutoff,
            schedule,
            max_inner_iterations: Self::DEFAULT_MAX_INNER,
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_inner_iterations == 0 {
            return Err(Error::InvalidParameter("max_inner_iterations must be >= 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive"));
        }
        self.kernel_at(self.schedule.t_end).map(|_| ())
    }

    pub fn kernel_at(&self, t: f64) -> Result<EstimatorKernel> {
        EstimatorKernel::new(self.kind, self.cutoff, t)
    }
}

/// Outcome of the inner fixed-point iteration at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub estimate: Vec<f64>,
    pub weights: Vec<f64>,
    pub objective: f64,
    /// `M` at every iterate, starting point first, final estimate last.
    pub inner_objectives: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureStep {
    pub temperature: f64,
    pub start: Vec<f64>,
    pub estimate: Vec<f64>,
    pub objective: f64,
    pub inner_objectives: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub estimate: Vec<f64>,
    /// Weights at the final estimate and final temperature.
    pub weights: Vec<f64>,
    /// `Σ ρ(r_i; c, T_end)` at the final estimate.
    pub objective: f64,
    pub trace: Vec<TemperatureStep>,
    /// Every temperature reached its inner convergence criterion.
    pub converged: bool,
}

/// Runs `solve_at(T, start)` over the schedule, feeding each solution to the
/// next temperature.
pub fn anneal<F>(
    schedule: &AnnealingSchedule,
    start: Vec<f64>,
    mut solve_at: F,
) -> Result<FitResult>
where
    F: FnMut(f64, &[f64]) -> Result<InnerSolution>,
{
    let mut current = start;
    let mut trace = Vec::new();
    let mut last: Option<InnerSolution> = None;
    for t in schedule.temperatures() {
        let sol = solve_at(t, &current)?;
        trace.push(TemperatureStep {
            temperature: t,
            start: current.clone(),
            estimate: sol.estimate.clone(),
            objective: sol.objective,
            inner_objectives: sol.inner_objectives.clone(),
            iterations: sol.iterations,
            converged: sol.converged,
        });
        current = sol.estimate.clone();
        last = Some(sol);
    }
    let last = last.expect("a schedule always has at least one temperature");
    Ok(FitResult {
        converged: trace.iter().all(|s| s.converged),
        estimate: last.estimate,
        weights: last.weights,
        objective: last.objective,
        trace,
    })
}

/// `Σ ρ(r_i)` at the kernel's temperature.
pub fn objective(residuals: &[f64], kernel: &EstimatorKernel) -> Result<f64> {
    residuals
        .iter()
        .try_fold(0.0, |acc, &r| Ok(acc + kernel.rho(r)?))
}

/// `M(μ) = Σ ρ((x_i − μ)/s)`.
pub fn location_objective(
    data: &[f64],
    scale: f64,
    mu: f64,
    kernel: &EstimatorKernel,
) -> Result<f64> {
    data.iter()
        .try_fold(0.0, |acc, &x| Ok(acc + kernel.rho((x - mu) / scale)?))
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Annealed M-estimate of location with known scale `s`.
pub fn estimate_location(
    data: &[f64],
    scale: f64,
    config: &IrlsConfig,
    start: f64,
) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter("scale must be positive and finite"));
    }
    check_finite(data, "data")?;
    if !start.is_finite() {
        return Err(Error::NonFinite("start"));
    }
    config.validate()?;

    anneal(&config.schedule, vec![start], |t, from| {
        let kernel = config.kernel_at(t)?;
        let mut mu = from[0];
        let mut inner_objectives = Vec::new();
        let mut converged = false;
        let mut iterations = 0;
        while iterations < config.max_inner_iterations {
            let (mut sw, mut swx, mut m) = (0.0, 0.0, 0.0);
            for &x in data {
                let r = (x - mu) / scale;
                let w = kernel.weight_unchecked(r);
                sw += w;
                swx += w * x;
                m += kernel.rho(r)?;
            }
            inner_objectives.push(m);
            if sw < MIN_WEIGHT_SUM {
                return Err(Error::AllRejected(sw));
            }
            let next = swx / sw;
            iterations += 1;
            let step = (next - mu).abs();
            mu = next;
            if step < config.tol * scale {
                converged = true;
                break;
            }
        }
        let residuals: Vec<f64> = data.iter().map(|x| (x - mu) / scale).collect();
        let weights: Vec<f64> = residuals
            .iter()
            .map(|&r| kernel.weight_unchecked(r))
            .collect();
        let obj = objective(&residuals, &kernel)?;
        inner_objectives.push(obj);
        Ok(InnerSolution {
            estimate: vec![mu],
            weights,
            objective: obj,
            inner_objectives,
            iterations,
            converged,
        })
    })
}

/// Standardized residuals `(y_i − a_iᵀβ)/σ_i`.
pub fn standardized_residuals(
    design: &Matrix,
    response: &[f64],
    sigmas: &[f64],
    beta: &[f64],
) -> Vec<f64> {
    design
        .mul_vec(beta)
        .iter()
        .zip(response)
        .zip(sigmas)
        .map(|((fit, y), s)| (y - fit) / s)
        .collect()
}

/// σ-weighted least-squares solution, the usual starting point.
pub fn weighted_ls(design: &Matrix, response: &[f64], sigmas: &[f64]) -> Result<Vec<f64>> {
    check_regression_inputs(design, response, sigmas)?;
    let scale: Vec<f64> = sigmas.iter().map(|s| 1.0 / s).collect();
    weighted_least_squares(design, response, &scale)
}

/// Solves with explicit per-row weights, i.e. row weights `w_i / σ_i²`.
pub fn weighted_ls_with(
    design: &Matrix,
    response: &[f64],
    sigmas: &[f64],
    weights: &[f64],
) -> Result<Vec<f64>> {
    check_regression_inputs(design, response, sigmas)?;
    if weights.len() != design.rows() {
        return Err(Error::Dimension("weights must match design rows"));
    }
    let scale: Vec<f64> = weights
        .iter()
        .zip(sigmas)
        .map(|(w, s)| sqrt(*w) / s)
        .collect();
    weighted_least_squares(design, response, &scale)
}

fn check_regression_inputs(design: &Matrix, response: &[f64], sigmas: &[f64]) -> Result<()> {
    let n = design.rows();
    if response.len() != n || sigmas.len() != n {
        return Err(Error::Dimension(
            "response and sigmas must match design rows",
        ));
    }
    if n < design.cols() {
        return Err(Error::TooFewPoints {
            needed: design.cols(),
            got: n,
        });
    }
    check_finite(response, "response")?;
    if !sigmas.iter().all(|s| s.is_finite() && *s > 0.0) {
        return Err(Error::InvalidParameter(
            "sigmas must be positive and finite",
        ));
    }
    Ok(())
}

/// Annealed robust linear regression `y ≈ Aβ` with known per-row standard
/// errors. `start = None` uses the σ-weighted least-squares estimate.
pub fn fit_linear(
    design: &Matrix,
    response: &[f64],
    sigmas: &[f64],
    config: &IrlsConfig,
    start: Option<&[f64]>,
) -> Result<FitResult> {
    check_regression_inputs(design, response, sigmas)?;
    config.validate()?;
    let p = design.cols();
    let start = match start {
        Some(s) if s.len() != p => {
            return Err(Error::Dimension("start must have one entry per column"))
        }
        Some(s) => {
            check_finite(s, "start")?;
            s.to_vec()
        }
        None => weighted_ls(design, response, sigmas)?,
    };

    anneal(&config.schedule, start, |t, from| {
        let kernel = config.kernel_at(t)?;
        let mut beta = from.to_vec();
        let mut inner_objectives = Vec::new();
        let mut converged = false;
        let mut iterations = 0;
        while iterations < config.max_inner_iterations {
            let residuals = standardized_residuals(design, response, sigmas, &beta);
            let weights: Vec<f64> = residuals
                .iter()
                .map(|&r| kernel.weight_unchecked(r))
                .collect();
            inner_objectives.push(objective(&residuals, &kernel)?);
            let sw: f64 = weights.iter().sum();
            if sw < MIN_WEIGHT_SUM {
                return Err(Error::AllRejected(sw));
            }
            let scale: Vec<f64> = weights
                .iter()
                .zip(sigmas)
                .map(|(w, s)| sqrt(*w) / s)
                .collect();
            let next = weighted_least_squares(design, response, &scale)?;
            iterations += 1;
            let delta: Vec<f64> = next.iter().zip(&beta).map(|(a, b)| a - b).collect();
            let change = design
                .mul_vec(&delta)
                .iter()
                .zip(sigmas)
                .fold(0.0f64, |m, (d, s)| m.max((d / s).abs()));
            beta = next;
            if change < config.tol {
                converged = true;
                break;
            }
        }
        let residuals = standardized_residuals(design, response, sigmas, &beta);
        let weights: Vec<f64> = residuals
            .iter()
            .map(|&r| kernel.weight_unchecked(r))
            .collect();
        let obj = objective(&residuals, &kernel)?;
        inner_objectives.push(obj);
        Ok(InnerSolution {
            estimate: beta,
            weights,
            objective: obj,
            inner_objectives,
            iterations,
            converged,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t_end: f64) -> IrlsConfig {
        IrlsConfig::normal(2.5, AnnealingSchedule::cooling_to(t_end).unwrap())
    }

    #[test]
    fn schedule_sequence() {
        let s = AnnealingSchedule::cooling_to(1.0).unwrap();
        let temps = s.temperatures();
        assert_eq!(temps[0], 256.0);
        assert_eq!(temps[1], 64.75);
        assert_eq!(temps[2], 16.9375);
        assert!((temps[3] - 4.984_375).abs() < 1e-12);
        assert_eq!(*temps.last().unwrap(), 1.0);
        assert!(temps.windows(2).all(|w| w[1] < w[0]));
        // Second to last is within slack: 1 + 255 * 0.25^k first drops below 1e-3 at k = 9.
        assert_eq!(temps.len(), 10);
    }

    #[test]
    fn fixed_schedule_is_one_temperature() {
        assert_eq!(
            AnnealingSchedule::fixed(0.01).unwrap().temperatures(),
            vec![0.01]
        );
    }

    #[test]
    fn schedule_validation() {
        assert!(AnnealingSchedule::new(1.0, 2.0, 0.25, 1e-3).is_err());
        assert!(AnnealingSchedule::new(2.0, 1.0, 1.0, 1e-3).is_err());
        assert!(AnnealingSchedule::new(2.0, 0.0, 0.5, 1e-3).is_err());
        assert!(AnnealingSchedule::new(2.0, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn single_point_is_its_own_mean() {
        let fit = estimate_location(&[5.0], 1.0, &cfg(0.1), 0.0).unwrap();
        assert!((fit.estimate[0] - 5.0).abs() < 1e-12);
        assert!(fit.weights[0] > 0.5);
    }

    #[test]
    fn symmetric_data_fixed_point() {
        let fit = estimate_location(&[-1.0, 0.0, 1.0], 1.0, &cfg(1.0), 0.0).unwrap();
        assert_eq!(fit.estimate[0], 0.0);
    }

    #[test]
    fn location_errors() {
        assert_eq!(
            estimate_location(&[], 1.0, &cfg(1.0), 0.0),
            Err(Error::EmptySample)
        );
        assert!(estimate_location(&[1.0], 0.0, &cfg(1.0), 0.0).is_err());
        assert!(estimate_location(&[f64::NAN], 1.0, &cfg(1.0), 0.0).is_err());
        // Far from the only observation at a tiny fixed temperature every weight underflows.
        let c = IrlsConfig::normal(2.5, AnnealingSchedule::fixed(1e-3).unwrap());
        assert!(matches!(
            estimate_location(&[0.0], 1.0, &c, 1e3),
            Err(Error::AllRejected(_))
        ));
    }

    #[test]
    fn location_weights_and_objective_are_consistent() {
        let data = [0.1, -0.4, 0.3, 0.05, 7.0, 7.2, -0.2];
        let fit = estimate_location(&data, 0.5, &cfg(0.1), 3.0).unwrap();
        let kernel = EstimatorKernel::normal(2.5, 0.1).unwrap();
        let mu = fit.estimate[0];
        for (x, w) in data.iter().zip(&fit.weights) {
            assert_eq!(*w, kernel.weight((x - mu) / 0.5).unwrap());
        }
        let m = location_objective(&data, 0.5, mu, &kernel).unwrap();
        assert!((fit.objective - m).abs() < 1e-12);
        assert!(fit.weights[4] < 0.5 && fit.weights[5] < 0.5);
        for step in &fit.trace {
            for w in step.inner_objectives.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
            }
        }
    }

    #[test]
    fn objective_edge_cases() {
        let k = EstimatorKernel::normal(2.5, 1.0).unwrap();
        assert_eq!(objective(&[], &k).unwrap(), 0.0);
        assert_eq!(objective(&[0.0, 0.0, 0.0], &k).unwrap(), 0.0);
    }

    fn line_design(xs: &[f64]) -> Matrix {
        let rows: Vec<[f64; 2]> = xs.iter().map(|&x| [1.0, x]).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn interpolation_when_square() {
        let a = line_design(&[0.0, 2.0]);
        let fit = fit_linear(&a, &[1.0, 5.0], &[1.0, 1.0], &cfg(1.0), None).unwrap();
        assert!((fit.estimate[0] - 1.0).abs() < 1e-12 && (fit.estimate[1] - 2.0).abs() < 1e-12);
        let w0 = EstimatorKernel::normal(2.5, 1.0).unwrap().max_weight();
        for w in &fit.weights {
            assert!((w - w0).abs() < 1e-12);
        }
    }

    #[test]
    fn clean_line_is_recovered_exactly() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = fit_linear(&line_design(&xs), &ys, &[1.0; 20], &cfg(1.0), None).unwrap();
        assert!((fit.estimate[0] - 1.0).abs() < 1e-10);
        assert!((fit.estimate[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rank_deficient_design_errors() {
        let a = line_design(&[1.0, 1.0, 1.0]);
        let err = fit_linear(&a, &[1.0, 2.0, 3.0], &[1.0; 3], &cfg(1.0), None).unwrap_err();
        assert_eq!(
            err,
            Error::RankDeficient {
                rank: 1,
                columns: 2
            }
        );
    }

    #[test]
    fn high_temperature_equals_weighted_ls() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [0.3, 1.1, 2.4, 2.9, 4.4, 30.0];
        let sig = [1.0, 0.5, 2.0, 1.0, 1.5, 1.0];
        let a = line_design(&xs);
        let c = IrlsConfig::normal(2.5, AnnealingSchedule::fixed(1e8).unwrap());
        let fit = fit_linear(&a, &ys, &sig, &c, None).unwrap();
        let ls = weighted_ls(&a, &ys, &sig).unwrap();
        for (b, l) in fit.estimate.iter().zip(&ls) {
            assert!((b - l).abs() <= 1e-6 * l.abs().max(1.0));
        }
    }
}
