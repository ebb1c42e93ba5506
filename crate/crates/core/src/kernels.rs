//! Weight, ψ and ρ functions of the annealing redescending M-estimators.
//!
//! Every kernel is generated by a unimodal symmetric density `f`:
//!
//! ```text
//! w_f(r; c, T) = f(r/√T) / (f(r/√T) + f(c/√T)),   ψ = r·w,   ρ = ∫₀^r ψ
//! ```
//!
//! Weights are evaluated as a logistic function of the log-density
//! difference, so no exponential is ever formed from an unbounded argument.
//! The Welsch kernel `w = exp(-r²/2T)` has no cutoff term; it is carried here
//! for comparison and ignores `c`.

use core::f64::consts::{FRAC_PI_2, PI};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_1p, ln_cosh, logistic, normal_pdf, powf, softplus, sqrt};
use crate::quadrature::{integrate_pieces, QuadratureOptions};

/// Absolute tolerance for ρ obtained by integrating ψ.
pub const RHO_QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Standard normal generator (N-type).
    Normal,
    /// Hyperbolic secant generator (HS-type).
    HyperbolicSecant,
    /// Student's t generator standardized to unit variance; requires `nu > 2`.
    StudentT { nu: f64 },
    /// Modified Welsch weight `exp(-r²/2T)`; the cutoff is ignored.
    Welsch,
}

impl KernelKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelKind::StudentT { nu } if !(nu.is_finite() && nu > 2.0) => Err(
                Error::InvalidParameter("degrees of freedom must satisfy nu > 2"),
            ),
            _ => Ok(()),
        }
    }

    /// True when the generator is rapidly varying at infinity, i.e. the zero
    /// temperature weight is a step function.
    pub fn is_rapidly_varying(&self) -> bool {
        !matches!(self, KernelKind::StudentT { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Normal => "normal",
            KernelKind::HyperbolicSecant => "hs",
            KernelKind::StudentT { .. } => "t",
            KernelKind::Welsch => "welsch",
        }
    }
}

/// Weight, ψ and ρ evaluated at one residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub w: f64,
    pub psi: f64,
    pub rho: f64,
}

/// A kernel at a fixed cutoff `c` and temperature `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorKernel {
    kind: KernelKind,
    cutoff: f64,
    temperature: f64,
}

impl EstimatorKernel {
    pub fn new(kind: KernelKind, cutoff: f64, temperature: f64) -> Result<Self> {
        kind.validate()?;
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter(
                "cutoff must be positive and finite",
            ));
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidParameter(
                "temperature must be positive and finite",
            ));
        }
        Ok(Self {
            kind,
            cutoff,
            temperature,
        })
    }

    /// N-type kernel.
    pub fn normal(cutoff: f64, temperature: f64) -> Result<Self> {
        Self::new(KernelKind::Normal, cutoff, temperature)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.kind, self.cutoff, temperature)
    }

    #[inline]
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    #[inline]
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    #[inline]
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn weight(&self, r: f64) -> Result<f64> {
        check_residual(r)?;
        Ok(self.weight_unchecked(r))
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        check_residual(r)?;
        Ok(r * self.weight_unchecked(r))
    }

    pub fn rho(&self, r: f64) -> Result<f64> {
        check_residual(r)?;
        self.rho_checked_finite(r)
    }

    pub fn evaluate(&self, r: f64) -> Result<KernelValue> {
        check_residual(r)?;
        let w = self.weight_unchecked(r);
        Ok(KernelValue {
            w,
            psi: r * w,
            rho: self.rho_checked_finite(r)?,
        })
    }

    /// Weight of a zero residual, the largest value the weight attains.
    pub fn max_weight(&self) -> f64 {
        self.weight_unchecked(0.0)
    }

    /// `ln f(r/√T) - ln f(c/√T)`; the weight is its logistic transform.
    fn log_density_gap(&self, r: f64) -> f64 {
        let (c, t) = (self.cutoff, self.temperature);
        match self.kind {
            KernelKind::Normal => (c * c - r * r) / (2.0 * t),
            KernelKind::HyperbolicSecant => {
                let s = FRAC_PI_2 / sqrt(t);
                ln_cosh(c * s) - ln_cosh(r * s)
            }
            KernelKind::StudentT { nu } => {
                let scale = t * (nu - 2.0);
                0.5 * (nu + 1.0) * (ln_1p(c * c / scale) - ln_1p(r * r / scale))
            }
            KernelKind::Welsch => unreachable!("Welsch weight has no cutoff term"),
        }
    }

    #[inline]
    pub(crate) fn weight_unchecked(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::Welsch => exp(-r * r / (2.0 * self.temperature)),
            _ => logistic(self.log_density_gap(r)),
        }
    }

    #[inline]
    pub(crate) fn psi_unchecked(&self, r: f64) -> f64 {
        r * self.weight_unchecked(r)
    }

    fn rho_checked_finite(&self, r: f64) -> Result<f64> {
        let (c, t) = (self.cutoff, self.temperature);
        match self.kind {
            KernelKind::Normal => Ok(normal_rho(r, c, t)),
            KernelKind::Welsch => Ok(t * -libm::expm1(-r * r / (2.0 * t))),
            KernelKind::HyperbolicSecant | KernelKind::StudentT { .. } => {
                self.rho_by_quadrature(r.abs())
            }
        }
    }

    /// Scale over which the weight falls from near 1 to near 0 around the
    /// cutoff (around zero for Welsch).
    pub(crate) fn transition_width(&self) -> f64 {
        let t = self.temperature;
        match self.kind {
            KernelKind::Normal => t / self.cutoff,
            KernelKind::HyperbolicSecant => 2.0 * sqrt(t) / PI,
            KernelKind::StudentT { nu } => sqrt(t * (nu - 2.0)),
            KernelKind::Welsch => sqrt(t),
        }
    }

    /// Sorted integration breakpoints on `[0, upper]`: dense around the
    /// weight transition, then geometric.
    pub(crate) fn breakpoints(&self, upper: f64) -> Vec<f64> {
        let center = match self.kind {
            KernelKind::Welsch => 0.0,
            _ => self.cutoff,
        };
        let width = self.transition_width();
        let mut points: Vec<f64> = vec![0.0, upper];
        if center > 0.0 {
            points.push(center);
        }
        let reach = center.max(upper - center);
        let mut step = width;
        while step < reach {
            points.push(center - step);
            points.push(center + step);
            step *= 4.0;
        }
        let mut edge = 2.0 * center.max(width);
        while edge < upper {
            points.push(edge);
            edge *= 2.0;
        }
        points.retain(|&x| (0.0..=upper).contains(&x));
        points.sort_unstable_by(f64::total_cmp);
        points.dedup();
        points
    }

    /// ρ for kernels without a closed form: `∫₀^|r| ψ`.
    fn rho_by_quadrature(&self, a: f64) -> Result<f64> {
        if a == 0.0 {
            return Ok(0.0);
        }
        let q = integrate_pieces(
            |x| self.psi_unchecked(x),
            &self.breakpoints(a),
            QuadratureOptions::with_abs_tol(RHO_QUADRATURE_TOL),
        )?;
        Ok(q.value)
    }
}

#[inline]
fn check_residual(r: f64) -> Result<()> {
    if r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("residual"))
    }
}

/// Branch of the N-type ρ used for `|r| < c`.
#[inline]
pub fn normal_rho_inner(r: f64, c: f64, t: f64) -> f64 {
    let a = c * c / (2.0 * t);
    0.5 * r * r + t * (ln_1p(exp(-a)) - softplus((r * r - c * c) / (2.0 * t)))
}

/// Branch of the N-type ρ used for `|r| >= c`.
#[inline]
pub fn normal_rho_outer(r: f64, c: f64, t: f64) -> f64 {
    let a = c * c / (2.0 * t);
    0.5 * c * c + t * (ln_1p(exp(-a)) - softplus((c * c - r * r) / (2.0 * t)))
}

#[inline]
pub(crate) fn normal_rho(r: f64, c: f64, t: f64) -> f64 {
    if r.abs() < c {
        normal_rho_inner(r, c, t)
    } else {
        normal_rho_outer(r, c, t)
    }
}

/// Zero-temperature limit of the weight at residual `r` (taken as `|r|`).
///
/// Rapidly varying generators give the step `H(c - |r|)` with `H(0) = 1/2`;
/// the t generator gives `c^{ν+1} / (c^{ν+1} + |r|^{ν+1})`.
pub fn limit_weight(kind: KernelKind, cutoff: f64, r: f64) -> Result<f64> {
    kind.validate()?;
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidParameter(
            "cutoff must be positive and finite",
        ));
    }
    check_residual(r)?;
    let r = r.abs();
    Ok(match kind {
        KernelKind::StudentT { nu } => {
            // Ratio form avoids overflow of the powers.
            1.0 / (1.0 + powf(r / cutoff, nu + 1.0))
        }
        _ => {
            if r < cutoff {
                1.0
            } else if r == cutoff {
                0.5
            } else {
                0.0
            }
        }
    })
}

/// Standardized generator density `f(r)` of a kernel kind.
///
/// The Welsch kind is generated by the normal density as well.
pub fn generator_density(kind: KernelKind, r: f64) -> Result<f64> {
    kind.validate()?;
    check_residual(r)?;
    Ok(match kind {
        KernelKind::Normal | KernelKind::Welsch => normal_pdf(r),
        KernelKind::HyperbolicSecant => 0.5 / libm::cosh(r * FRAC_PI_2),
        KernelKind::StudentT { nu } => {
            let log_norm =
                libm::lgamma(0.5 * (nu + 1.0)) - libm::lgamma(0.5 * nu) - 0.5 * ln(PI * (nu - 2.0));
            exp(log_norm - 0.5 * (nu + 1.0) * ln_1p(r * r / (nu - 2.0)))
        }
    })
}
