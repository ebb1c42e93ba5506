//! Influence-function analytics of the N-type estimator at the standard
//! normal model.
//!
//! `IF(r) = ψ(r; c, T) / K(c, T)` with `K = ∫ r ψ φ`. The point of maximum
//! influence has a closed form through the principal branch of Lambert's W:
//!
//! ```text
//! r_max = √(T (2ω + 1)),   ω = W(½ exp(c²/2T − ½))
//! γ*    = 2 √T ω / (√(2ω + 1) K)
//! ```
//!
//! Integrals over `[0, ∞)` are split at the cutoff and truncated where the
//! normal density underflows.

use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use crate::error::{Error, Result};
use crate::kernels::{EstimatorKernel, KernelKind};
use crate::math::{exp, ln, ln_1p, normal_cdf, normal_pdf, powf, sqrt};
use crate::quadrature::{integrate_pieces, QuadratureOptions};

/// Absolute tolerance of the `K` and `V` integrals.
pub const INFLUENCE_QUADRATURE_TOL: f64 = 1e-9;

/// Beyond this argument `exp` would overflow; `W` is then solved in log space.
const MAX_EXP_ARG: f64 = 700.0;

/// Principal branch `W₀(x)`, `x >= -1/e`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch_point = -1.0 / E;
    if x.is_nan() {
        return Err(Error::NonFinite("Lambert W argument"));
    }
    if x < branch_point {
        return Err(Error::LambertDomain(x));
    }
    if x == branch_point {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.32 {
        // Series about the branch point.
        let p = sqrt(2.0 * (E * x + 1.0));
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= 3.0 {
        let l = ln_1p(x);
        l * (1.0 - ln_1p(l) / (2.0 + l))
    } else {
        let l1 = ln(x);
        let l2 = ln(l1);
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = exp(w);
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// `W₀(e^L)` for any real `L`; large `L` is solved from `w + ln w = L`
/// without forming `e^L`.
pub fn lambert_w0_of_exp(log_x: f64) -> Result<f64> {
    if log_x.is_nan() {
        return Err(Error::NonFinite("Lambert W argument"));
    }
    if log_x <= MAX_EXP_ARG {
        return lambert_w0(exp(log_x));
    }
    let mut w = log_x - ln(log_x);
    for _ in 0..64 {
        let step = (w + ln(w) - log_x) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    Ok(w)
}

fn check_ct(c: f64, t: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(
            "cutoff must be positive and finite",
        ));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(
            "temperature must be positive and finite",
        ));
    }
    Ok(())
}

/// Integrates `g(r)` against the standard normal density over `[0, ∞)`,
/// splitting at the kernel's transition region.
fn half_line_normal_integral<G: Fn(f64) -> f64>(kernel: &EstimatorKernel, g: G) -> Result<f64> {
    let center = match kernel.kind() {
        KernelKind::Welsch => 0.0,
        _ => kernel.cutoff(),
    };
    // φ(r) underflows near r = 38.5, so nothing beyond center + 40 matters.
    let reach = (40.0 * sqrt(kernel.temperature()) + 10.0).min(40.0);
    let upper = center + reach;
    let points: Vec<f64> = kernel.breakpoints(upper);
    let q = integrate_pieces(
        |r| g(r) * normal_pdf(r),
        &points,
        QuadratureOptions::with_abs_tol(INFLUENCE_QUADRATURE_TOL),
    )?;
    Ok(q.value)
}

/// `K = ∫ r ψ(r) φ(r) dr` over the real line for any kernel.
pub fn normalization_k_for(kernel: &EstimatorKernel) -> Result<f64> {
    Ok(2.0 * half_line_normal_integral(kernel, |r| r * kernel.psi_unchecked(r))?)
}

/// `V = ∫ ψ² φ dr / K²` for any kernel.
pub fn asymptotic_variance_for(kernel: &EstimatorKernel) -> Result<f64> {
    let k = normalization_k_for(kernel)?;
    let num = 2.0
        * half_line_normal_integral(kernel, |r| {
            let p = kernel.psi_unchecked(r);
            p * p
        })?;
    Ok(num / (k * k))
}

/// `K(c, T)` of the N-type estimator.
pub fn normalization_k(c: f64, t: f64) -> Result<f64> {
    normalization_k_for(&EstimatorKernel::normal(c, t)?)
}

/// `ω(c, T) = W(½ exp(c²/2T − ½))`.
pub fn omega(c: f64, t: f64) -> Result<f64> {
    check_ct(c, t)?;
    lambert_w0_of_exp(c * c / (2.0 * t) - 0.5 - LN_2)
}

/// Point of maximum influence.
pub fn r_max(c: f64, t: f64) -> Result<f64> {
    let w = omega(c, t)?;
    Ok(sqrt(t * (2.0 * w + 1.0)))
}

/// `ψ(r_max)` from the closed form, `2√T ω / √(2ω + 1)`.
pub fn max_psi(c: f64, t: f64) -> Result<f64> {
    let w = omega(c, t)?;
    Ok(2.0 * sqrt(t) * w / sqrt(2.0 * w + 1.0))
}

/// `γ* = max_r IF(r)`.
pub fn gross_error_sensitivity(c: f64, t: f64) -> Result<f64> {
    Ok(max_psi(c, t)? / normalization_k(c, t)?)
}

/// Largest `r` with `IF(r) > ε`: the root of `ψ(r)/K = ε` beyond `r_max`.
pub fn effective_rejection_point(c: f64, t: f64, epsilon: f64) -> Result<f64> {
    check_ct(c, t)?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(
            "threshold must be positive and finite",
        ));
    }
    let k = normalization_k(c, t)?;
    let kernel = EstimatorKernel::normal(c, t)?;
    effective_rejection_point_with(&kernel, k, epsilon)
}

fn effective_rejection_point_with(kernel: &EstimatorKernel, k: f64, epsilon: f64) -> Result<f64> {
    let (c, t) = (kernel.cutoff(), kernel.temperature());
    let gamma_star = max_psi(c, t)? / k;
    if epsilon >= gamma_star {
        return Err(Error::ThresholdAboveMaximum {
            epsilon,
            gamma_star,
        });
    }
    let influence = |r: f64| kernel.psi_unchecked(r) / k;
    let mut lo = r_max(c, t)?;
    let mut hi = 2.0 * lo.max(c);
    while influence(hi) > epsilon {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonFinite("rejection point bracket"));
        }
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if influence(mid) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Asymptotic variance `V(c, T) = ∫ψ²φ / K²` of the N-type estimator.
pub fn asymptotic_variance(c: f64, t: f64) -> Result<f64> {
    asymptotic_variance_for(&EstimatorKernel::normal(c, t)?)
}

/// Closed-form asymptotic variance of the Welsch estimator,
/// `(1+T)³ / ((2+T)^{3/2} T^{3/2})`.
pub fn welsch_variance(t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(
            "temperature must be positive and finite",
        ));
    }
    let a = 1.0 + t;
    Ok(a * a * a / (powf(2.0 + t, 1.5) * powf(t, 1.5)))
}

/// `2Φ(c) − 1 − 2cφ(c)`: the `T → 0` limit of `K`, the mass a skipped mean
/// effectively uses.
pub fn k_low_temperature_limit(c: f64) -> f64 {
    2.0 * normal_cdf(c) - 1.0 - 2.0 * c * normal_pdf(c)
}

pub const K_HIGH_TEMPERATURE_LIMIT: f64 = 0.5;
pub const V_HIGH_TEMPERATURE_LIMIT: f64 = 1.0;

pub fn gamma_star_low_temperature_limit(c: f64) -> f64 {
    c / k_low_temperature_limit(c)
}

pub fn variance_low_temperature_limit(c: f64) -> f64 {
    1.0 / k_low_temperature_limit(c)
}

/// All influence quantities at one `(c, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceProfile {
    pub c: f64,
    pub t: f64,
    pub k: f64,
    pub r_max: f64,
    pub gamma_star: f64,
    pub epsilon: f64,
    pub rho_eff: f64,
    pub v: f64,
}

impl InfluenceProfile {
    pub fn compute(c: f64, t: f64, epsilon: f64) -> Result<Self> {
        let kernel = EstimatorKernel::normal(c, t)?;
        let k = normalization_k_for(&kernel)?;
        let num = 2.0
            * half_line_normal_integral(&kernel, |r| {
                let p = kernel.psi_unchecked(r);
                p * p
            })?;
        Ok(Self {
            c,
            t,
            k,
            r_max: r_max(c, t)?,
            gamma_star: max_psi(c, t)? / k,
            epsilon,
            rho_eff: effective_rejection_point_with(&kernel, k, epsilon)?,
            v: num / (k * k),
        })
    }
}

/// Log-spaced temperature grid from `t_min` to `t_max` inclusive with
/// `per_decade` points per factor of ten.
pub fn log_temperature_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidParameter("temperature grid bounds"));
    }
    let lo = libm::log10(t_min);
    let hi = libm::log10(t_max);
    let steps = libm::round((hi - lo) * per_decade as f64) as usize;
    if steps == 0 {
        return Ok(alloc::vec![t_min]);
    }
    Ok((0..=steps)
        .map(|i| powf(10.0, lo + (hi - lo) * i as f64 / steps as f64))
        .collect())
}
