//! Closed-form normalising constants and the ratio/conjecture formulas built on them.
//!
//! Every value is returned in log form. For a complete graph on `p` vertices
//!
//! ```text
//! C(delta, D) = 2^(p a) Γ_p(a) det(D)^(-a),   a = (delta + p - 1) / 2
//! ```
//!
//! and a chordal graph factorises as the product over cliques divided by the
//! product over separators. The same formula with `det(D + itE)` taken on the
//! branch continuous from `t = 0` is the analytic continuation used by the
//! Fourier evaluator.

use core::f64::consts::PI;

use crate::completion::{isserlis, isserlis_complement_block, pd_complete, CompletionOptions};
use crate::graph::{decompose, CliqueDecomposition, Graph};
use crate::logscalar::LogScalar;
use crate::symmat::{ComplexSymmetricMatrix, PerturbationEdge, SymmetricMatrix};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln Γ_p(a) = p(p-1)/4 ln π + Σ_{j=1..p} ln Γ(a - (j-1)/2)`.
pub fn ln_multivariate_gamma(p: usize, a: f64) -> f64 {
    let pf = p as f64;
    pf * (pf - 1.0) / 4.0 * libm::log(PI) + (0..p).map(|j| ln_gamma(a - 0.5 * j as f64)).sum::<f64>()
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// Complete-graph constant of dimension `p` given `log det` of its scale.
fn complete_from_logdet(p: usize, delta: f64, logdet: LogScalar) -> LogScalar {
    let a = 0.5 * (delta + p as f64 - 1.0);
    LogScalar::from_ln(p as f64 * a * LN_2 + ln_multivariate_gamma(p, a)) * logdet.powf(-a)
}

/// Wishart constant of the complete graph on `p` vertices.
pub fn complete_constant(p: usize, delta: f64, scale: &SymmetricMatrix) -> Result<LogScalar> {
    check_delta(delta)?;
    if scale.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: scale.dim() });
    }
    Ok(complete_from_logdet(p, delta, LogScalar::from_ln(scale.logdet()?)))
}

/// Clique/separator product for a given decomposition.
pub fn constant_from_decomposition(
    dec: &CliqueDecomposition,
    delta: f64,
    scale: &SymmetricMatrix,
) -> Result<LogScalar> {
    check_delta(delta)?;
    let mut value = LogScalar::ONE;
    for c in &dec.cliques {
        let sub = scale.principal_submatrix(c)?;
        value = value * complete_from_logdet(c.len(), delta, LogScalar::from_ln(sub.logdet()?));
    }
    for s in dec.separators.iter().filter(|s| !s.is_empty()) {
        let sub = scale.principal_submatrix(s)?;
        value = value / complete_from_logdet(s.len(), delta, LogScalar::from_ln(sub.logdet()?));
    }
    Ok(value)
}

/// Exact constant of a chordal graph.
pub fn chordal_constant(g: &Graph, delta: f64, scale: &SymmetricMatrix) -> Result<LogScalar> {
    check_scale(g, scale)?;
    constant_from_decomposition(&decompose(g)?, delta, scale)
}

fn check_scale(g: &Graph, scale: &SymmetricMatrix) -> Result<()> {
    if g.n() != scale.dim() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: scale.dim() });
    }
    if !scale.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// Clique/separator product at a complex scale. Every principal block must have a
/// positive-definite real part.
pub fn complex_constant_from_decomposition(
    dec: &CliqueDecomposition,
    delta: f64,
    scale: &ComplexSymmetricMatrix,
) -> Result<LogScalar> {
    check_delta(delta)?;
    let mut value = LogScalar::ONE;
    for c in &dec.cliques {
        let det = scale.principal_submatrix(c)?.logdet_continuous()?;
        value = value * complete_from_logdet(c.len(), delta, det);
    }
    for s in dec.separators.iter().filter(|s| !s.is_empty()) {
        let det = scale.principal_submatrix(s)?.logdet_continuous()?;
        value = value / complete_from_logdet(s.len(), delta, det);
    }
    Ok(value)
}

/// Chordal constant continued to the scale `scale + i t E`.
pub fn complex_chordal_constant(
    g: &Graph,
    delta: f64,
    scale: &SymmetricMatrix,
    p: &PerturbationEdge,
) -> Result<LogScalar> {
    check_scale(g, scale)?;
    let dec = decompose(g)?;
    complex_constant_from_decomposition(&dec, delta, &ComplexSymmetricMatrix::perturbed(scale, p)?)
}

/// `C(delta, I_4)` for the path on four vertices:
/// `2^(2δ+3) π^(3/2) Γ((δ+1)/2)^3 Γ(δ/2)`.
pub fn path4_identity(delta: f64) -> Result<LogScalar> {
    check_delta(delta)?;
    Ok(LogScalar::from_ln(
        (2.0 * delta + 3.0) * LN_2 + 1.5 * libm::log(PI) + 3.0 * ln_gamma(0.5 * (delta + 1.0)) + ln_gamma(0.5 * delta),
    ))
}

/// `C(delta, I_4)` for the four-cycle:
/// `2^(2δ+4) π² Γ(δ/2) Γ((δ+1)/2) Γ((δ+2)/2)^3 / Γ((δ+3)/2)`.
pub fn cycle4_identity(delta: f64) -> Result<LogScalar> {
    check_delta(delta)?;
    Ok(LogScalar::from_ln(
        (2.0 * delta + 4.0) * LN_2
            + 2.0 * libm::log(PI)
            + ln_gamma(0.5 * delta)
            + ln_gamma(0.5 * (delta + 1.0))
            + 3.0 * ln_gamma(0.5 * (delta + 2.0))
            - ln_gamma(0.5 * (delta + 3.0)),
    ))
}

/// Exact `C_path4(δ, I) / C_cycle4(δ, I)`.
pub fn true_ratio_c4(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let ln = 2.0 * ln_gamma(0.5 * (delta + 1.0)) + ln_gamma(0.5 * (delta + 3.0))
        - LN_2
        - 0.5 * libm::log(PI)
        - 3.0 * ln_gamma(0.5 * (delta + 2.0));
    Ok(libm::exp(ln))
}

/// Edge-removal ratio approximation `Γ((δ+s)/2) / (2√π Γ((δ+s+1)/2))`, where `s` is
/// the common-neighbour count of the removed edge.
pub fn approx_ratio(delta: f64, s: usize) -> Result<f64> {
    check_delta(delta)?;
    let x = delta + s as f64;
    Ok(libm::exp(ln_gamma(0.5 * x) - LN_2 - 0.5 * libm::log(PI) - ln_gamma(0.5 * (x + 1.0))))
}

/// Relative error of the approximation on the four-cycle,
/// `Γ((δ+2)/2)^3 Γ(δ/2) / (Γ((δ+1)/2)^3 Γ((δ+3)/2)) − 1`.
pub fn stirling_rel_error(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let ln = 3.0 * ln_gamma(0.5 * (delta + 2.0)) + ln_gamma(0.5 * delta)
        - 3.0 * ln_gamma(0.5 * (delta + 1.0))
        - ln_gamma(0.5 * (delta + 3.0));
    Ok(libm::expm1(ln))
}

/// Roverato's closed form
/// `2^(n/2) det(Iss_G(D^G))^(-1/2) det(D^G)^(-(δ-2)/2) C_G(δ, I_n)`,
/// with `c_identity` supplied by the caller.
pub fn roverato_estimate(g: &Graph, delta: f64, scale: &SymmetricMatrix, c_identity: LogScalar) -> Result<LogScalar> {
    check_delta(delta)?;
    check_scale(g, scale)?;
    let completed = pd_complete(scale, g, CompletionOptions::default())?.completed;
    let ln_iss = isserlis(&completed, g)?.logdet()?;
    let n = g.n() as f64;
    let ln = 0.5 * n * LN_2 - 0.5 * ln_iss - 0.5 * (delta - 2.0) * completed.logdet()?;
    Ok(LogScalar::from_ln(ln) * c_identity)
}

/// The same value through the complement block of `Iss((D^G)⁻¹)`:
/// `det(block)^(-1/2) det(D^G)^(-(δ-2)/2 - (n+1)/2) C_G(δ, I_n)`.
pub fn roverato_estimate_eq2(
    g: &Graph,
    delta: f64,
    scale: &SymmetricMatrix,
    c_identity: LogScalar,
) -> Result<LogScalar> {
    if g.is_complete() {
        return roverato_estimate(g, delta, scale, c_identity);
    }
    check_delta(delta)?;
    check_scale(g, scale)?;
    let completed = pd_complete(scale, g, CompletionOptions::default())?.completed;
    let inv = completed.inverse()?;
    let ln_block = isserlis_complement_block(&inv, g)?.logdet()?;
    let n = g.n() as f64;
    let ln = -0.5 * ln_block - (0.5 * (delta - 2.0) + 0.5 * (n + 1.0)) * completed.logdet()?;
    Ok(LogScalar::from_ln(ln) * c_identity)
}
