//! Normalising constants of `G = G* − e` as a one-dimensional integral.
//!
//! For a chordal `G*` containing the edge `e = {u, v}`,
//!
//! ```text
//! C_G(δ, D) = (1 / 2π) ∫_ℝ C_{G*}(δ, D + i t E) dt
//! ```
//!
//! where `E` is one at `(u, v)` and `(v, u)`, and the integrand is the chordal
//! closed form continued along the branch through `t = 0`. The identity holds for
//! any value of `D` at `e`, since `C_G` never sees that entry; shifting it moves the
//! contour. By default the scale is first replaced by its PD-completion with respect
//! to `G`, which makes the integrand close to non-oscillatory.
//!
//! The integral is evaluated after `t = tan θ` on `(−π/2, 0)` and `(0, π/2)`.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::completion::{pd_complete, CompletionOptions};
use crate::constants::{check_delta, complex_constant_from_decomposition, ln_gamma};
use crate::graph::{common_neighbor_count, decompose, Graph};
use crate::logscalar::LogScalar;
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, GaussLegendre};
use crate::symmat::{ComplexSymmetricMatrix, PerturbationEdge, SymmetricMatrix};
use crate::{Error, Result};

/// Gauss–Legendre nodes per sub-panel.
const RULE_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Starting panels on each side of `θ = 0`.
    pub initial_panels: usize,
    /// Integrate at the PD-completion of the scale with respect to `G* − e`.
    pub complete_scale: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_panels: 4096, initial_panels: 8, complete_scale: true }
    }
}

/// Value of the integral together with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierEstimate {
    pub value: LogScalar,
    /// `|Im ∫| / |Re ∫|`; zero up to rounding by conjugate symmetry.
    pub imaginary_ratio: f64,
    /// Relative change between the final composite rule and the same panels
    /// integrated with half the nodes.
    pub refinement_change: f64,
    /// `∫ |f| / |∫ f|`; large values mean heavy cancellation.
    pub cancellation: f64,
    pub panels: usize,
    /// Set when `δ + s < 0.5`: the tail decays too slowly for reliable convergence.
    pub slow_tail: bool,
}

/// `C_{G* − e}(δ, scale)` by the one-dimensional Fourier integral.
pub fn fourier_constant(
    g_star: &Graph,
    e: (usize, usize),
    delta: f64,
    scale: &SymmetricMatrix,
    cfg: &QuadratureConfig,
) -> Result<LogScalar> {
    fourier_constant_detailed(g_star, e, delta, scale, cfg).map(|r| r.value)
}

pub fn fourier_constant_detailed(
    g_star: &Graph,
    e: (usize, usize),
    delta: f64,
    scale: &SymmetricMatrix,
    cfg: &QuadratureConfig,
) -> Result<FourierEstimate> {
    check_delta(delta)?;
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::InvalidParameter("rel_tol must be positive"));
    }
    let (u, v) = e;
    let s = common_neighbor_count(g_star, u, v)?;
    let dec = decompose(g_star)?;
    if scale.dim() != g_star.n() {
        return Err(Error::DimensionMismatch { expected: g_star.n(), found: scale.dim() });
    }
    if !scale.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let base = if cfg.complete_scale {
        let g = g_star.without_edge(u, v)?;
        pd_complete(scale, &g, CompletionOptions::default())?.completed
    } else {
        scale.clone()
    };

    let integrand_ln = |t: f64| -> Result<LogScalar> {
        let perturbed = ComplexSymmetricMatrix::perturbed(&base, &PerturbationEdge::new(u, v, t)?)?;
        complex_constant_from_decomposition(&dec, delta, &perturbed)
    };

    // shift by the largest log-magnitude seen on a coarse grid
    let mut shift = integrand_ln(0.0)?.log_magnitude();
    for k in 1..64 {
        let theta = FRAC_PI_2 * k as f64 / 64.0;
        let m = integrand_ln(libm::tan(theta))?.log_magnitude() - 2.0 * libm::log(libm::cos(theta));
        shift = shift.max(m);
    }

    let rule = GaussLegendre::new(RULE_POINTS);
    let opts = AdaptiveOptions { rel_tol: cfg.rel_tol, max_panels: cfg.max_panels, initial_panels: cfg.initial_panels };
    let result = integrate_adaptive(&rule, &[-FRAC_PI_2, 0.0, FRAC_PI_2], opts, |theta| {
        let c = libm::cos(theta);
        if c <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let value = integrand_ln(libm::tan(theta))? * LogScalar::from_ln(-2.0 * libm::log(c));
        Ok(value.to_complex_scaled(shift))
    })?;

    let integral = result.value;
    if !(integral.re > 0.0) {
        return Err(Error::InvalidParameter("Fourier integral has non-positive real part"));
    }
    let value = LogScalar::from_ln(shift + libm::log(integral.re) - libm::log(2.0 * PI));
    Ok(FourierEstimate {
        value,
        imaginary_ratio: libm::fabs(integral.im) / integral.re,
        refinement_change: result.refinement_change(),
        cancellation: result.abs_integral / integral.norm(),
        panels: result.panels,
        slow_tail: delta + (s as f64) < 0.5,
    })
}

/// Ratio of `∫_ℝ (1+t²)^(−(δ+s+1)/2) dt` computed by the same quadrature to its
/// closed form `√π Γ((δ+s)/2) / Γ((δ+s+1)/2)`.
pub fn beta_integral_check(delta: f64, s: usize) -> Result<f64> {
    check_delta(delta)?;
    let k = 0.5 * (delta + s as f64 + 1.0);
    let rule = GaussLegendre::new(RULE_POINTS);
    let result = integrate_adaptive(&rule, &[-FRAC_PI_2, 0.0, FRAC_PI_2], AdaptiveOptions::default(), |theta| {
        // (1 + t²)^(−k) sec²θ = cos(θ)^(2k − 2)
        let c = libm::cos(theta);
        Ok(Complex64::new(if c > 0.0 { libm::pow(c, 2.0 * k - 2.0) } else { 0.0 }, 0.0))
    })?;
    let x = delta + s as f64;
    let closed = libm::exp(0.5 * libm::log(PI) + ln_gamma(0.5 * x) - ln_gamma(0.5 * (x + 1.0)));
    Ok(result.value.re / closed)
}
