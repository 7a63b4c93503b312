//! Monte Carlo estimation of `C_G(δ, D)` for arbitrary graphs.
//!
//! Write `K = Φᵀ Φ` with `Φ` upper triangular and `D⁻¹ = Tᵀ T` with `T` upper
//! triangular, and set `Ψ = Φ T⁻¹`. The diagonal of `Ψ` and the positions of the
//! edges of `G` are free; every other upper entry is pinned by `K` vanishing on
//! the non-edges. Integrating out the free entries gives
//!
//! ```text
//! C_G(δ, D) = Π_i t_ii^(δ + ν_i + k_i) 2^((δ+ν_i)/2) Γ((δ+ν_i)/2) · (2π)^(m/2)
//!             · E[exp(−½ Σ_{pinned} ψ_ij²)]
//! ```
//!
//! with `ψ_ii² ~ χ²(δ + ν_i)`, free off-diagonal `ψ_ij ~ N(0, 1)`, `ν_i` the
//! neighbours of `i` later in the ordering and `k_i` those earlier.
//!
//! Randomness comes from `ChaCha20Rng::seed_from_u64(seed)`, so a `(seed, samples,
//! ordering)` triple gives bit-identical output on a given platform.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::completion::{pd_complete, CompletionOptions};
use crate::constants::{check_delta, ln_gamma};
use crate::graph::Graph;
use crate::symmat::SymmetricMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub log_value: f64,
    /// Delta-method standard error of `log_value`.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOptions {
    /// `ordering[i]` is the vertex placed at position `i`; natural order when `None`.
    pub ordering: Option<Vec<usize>>,
    /// Replace the scale by its PD-completion with respect to `G` first. The constant
    /// only depends on the diagonal and edge entries, so this leaves the expectation
    /// unchanged while usually shrinking the variance a great deal.
    pub complete_scale: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { ordering: None, complete_scale: true }
    }
}

struct Sampler {
    n: usize,
    free: Vec<bool>,
    /// upper Cholesky factor of the scale inverse, row-major
    t: Vec<f64>,
    chi: Vec<ChiSquared<f64>>,
    ln_prefactor: f64,
}

impl Sampler {
    fn new(g: &Graph, delta: f64, scale: &SymmetricMatrix) -> Result<Self> {
        let n = g.n();
        let inv = scale.inverse()?;
        let chol = inv.cholesky()?;
        // inv = L Lᵀ = Tᵀ T with T = Lᵀ
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                t[i * n + j] = chol.factor(j, i);
            }
        }
        let mut free = vec![false; n * n];
        let mut ln_prefactor = 0.5 * g.edge_count() as f64 * libm::log(2.0 * core::f64::consts::PI);
        let mut chi = Vec::with_capacity(n);
        for i in 0..n {
            free[i * n + i] = true;
            let later = g.neighbors(i).filter(|&j| j > i).count() as f64;
            let earlier = g.neighbors(i).filter(|&j| j < i).count() as f64;
            for j in g.neighbors(i).filter(|&j| j > i) {
                free[i * n + j] = true;
            }
            let dof = delta + later;
            ln_prefactor += (delta + later + earlier) * libm::log(t[i * n + i])
                + 0.5 * dof * core::f64::consts::LN_2
                + ln_gamma(0.5 * dof);
            chi.push(ChiSquared::new(dof).map_err(|_| Error::InvalidDelta(delta))?);
        }
        Ok(Self { n, free, t, chi, ln_prefactor })
    }

    /// `−½ Σ ψ²` over the pinned entries for one draw.
    fn log_weight<R: Rng>(&self, rng: &mut R, psi: &mut [f64], phi: &mut [f64]) -> f64 {
        let n = self.n;
        let t = &self.t;
        psi.iter_mut().for_each(|x| *x = 0.0);
        phi.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            psi[i * n + i] = libm::sqrt(self.chi[i].sample(rng));
            for j in (i + 1)..n {
                if self.free[i * n + j] {
                    psi[i * n + j] = StandardNormal.sample(rng);
                }
            }
        }
        let mut total = 0.0;
        for i in 0..n {
            phi[i * n + i] = psi[i * n + i] * t[i * n + i];
            for j in (i + 1)..n {
                if self.free[i * n + j] {
                    phi[i * n + j] = (i..=j).map(|l| psi[i * n + l] * t[l * n + j]).sum();
                } else {
                    // (Φᵀ Φ)_ij = 0
                    let s: f64 = (0..i).map(|l| phi[l * n + i] * phi[l * n + j]).sum();
                    let value = -s / phi[i * n + i];
                    phi[i * n + j] = value;
                    let partial: f64 = (i..j).map(|l| psi[i * n + l] * t[l * n + j]).sum();
                    let p = (value - partial) / t[j * n + j];
                    psi[i * n + j] = p;
                    total += p * p;
                }
            }
        }
        -0.5 * total
    }
}

/// Running `Σ exp(x − m)` and `Σ exp(2(x − m))` with a moving shift `m = max x`.
#[derive(Debug, Clone, Copy)]
struct LogMeanAccumulator {
    shift: f64,
    s1: f64,
    s2: f64,
    count: usize,
}

impl LogMeanAccumulator {
    fn new() -> Self {
        Self { shift: f64::NEG_INFINITY, s1: 0.0, s2: 0.0, count: 0 }
    }

    fn push(&mut self, x: f64) {
        if x > self.shift {
            let r = libm::exp(self.shift - x);
            self.s1 *= r;
            self.s2 *= r * r;
            self.shift = x;
        }
        let w = libm::exp(x - self.shift);
        self.s1 += w;
        self.s2 += w * w;
        self.count += 1;
    }

    /// `(ln mean, delta-method standard error of ln mean)`.
    fn finish(&self) -> (f64, f64) {
        let n = self.count as f64;
        let mean = self.s1 / n;
        let var = ((self.s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (self.shift + libm::log(mean), libm::sqrt(var / n) / mean)
    }
}

fn permuted(g: &Graph, scale: &SymmetricMatrix, order: &[usize]) -> Result<(Graph, SymmetricMatrix)> {
    let n = g.n();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || core::mem::replace(&mut seen[v], true)) {
        return Err(Error::InvalidOrdering);
    }
    Ok((g.induced(order)?, scale.principal_submatrix(order)?))
}

/// Estimate with the default options (natural order, completed scale).
pub fn mc_constant(g: &Graph, delta: f64, scale: &SymmetricMatrix, samples: usize, seed: u64) -> Result<McEstimate> {
    mc_constant_with(g, delta, scale, samples, seed, &McOptions::default())
}

pub fn mc_constant_with(
    g: &Graph,
    delta: f64,
    scale: &SymmetricMatrix,
    samples: usize,
    seed: u64,
    opts: &McOptions,
) -> Result<McEstimate> {
    check_delta(delta)?;
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least two samples"));
    }
    if scale.dim() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: scale.dim() });
    }
    if !scale.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let base = if opts.complete_scale {
        pd_complete(scale, g, CompletionOptions::default())?.completed
    } else {
        scale.clone()
    };
    let (g, base) = match &opts.ordering {
        Some(order) => permuted(g, &base, order)?,
        None => (g.clone(), base),
    };
    let sampler = Sampler::new(&g, delta, &base)?;
    let n = g.n();
    let mut psi = vec![0.0; n * n];
    let mut phi = vec![0.0; n * n];
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut acc = LogMeanAccumulator::new();
    for _ in 0..samples {
        let lw = sampler.log_weight(&mut rng, &mut psi, &mut phi);
        if !lw.is_finite() {
            return Err(Error::DegenerateSample("non-finite importance weight"));
        }
        acc.push(lw);
    }
    let (ln_mean, std_error) = acc.finish();
    if !ln_mean.is_finite() || !std_error.is_finite() {
        return Err(Error::DegenerateSample("weights underflowed"));
    }
    Ok(McEstimate { log_value: sampler.ln_prefactor + ln_mean, std_error, samples, seed })
}

/// One estimate per seed, in input order.
pub fn mc_replicates(
    g: &Graph,
    delta: f64,
    scale: &SymmetricMatrix,
    samples: usize,
    seeds: &[u64],
) -> Result<Vec<McEstimate>> {
    mc_replicates_with(g, delta, scale, samples, seeds, &McOptions::default())
}

pub fn mc_replicates_with(
    g: &Graph,
    delta: f64,
    scale: &SymmetricMatrix,
    samples: usize,
    seeds: &[u64],
    opts: &McOptions,
) -> Result<Vec<McEstimate>> {
    check_distinct(seeds)?;
    seeds.iter().map(|&seed| mc_constant_with(g, delta, scale, samples, seed, opts)).collect()
}

pub fn check_distinct(seeds: &[u64]) -> Result<()> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("replicate seeds must be distinct"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{complete_constant, cycle4_identity, path4_identity};

    fn within(est: &McEstimate, exact: f64, k: f64) -> bool {
        (est.log_value - exact).abs() <= k * est.std_error + 1e-10 * exact.abs().max(1.0)
    }

    #[test]
    fn single_vertex_is_exact() {
        let d = SymmetricMatrix::from_diagonal(&[2.0]);
        let est = mc_constant(&Graph::empty(1), 2.0, &d, 10_000, 7).unwrap();
        assert!(est.log_value.abs() < 1e-12);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn path_and_cycle_at_identity() {
        let raw = McOptions { complete_scale: false, ..Default::default() };
        let est = mc_constant_with(&Graph::path(4), 3.0, &SymmetricMatrix::identity(4), 10_000, 11, &raw).unwrap();
        assert!(within(&est, path4_identity(3.0).unwrap().log_magnitude(), 3.0));
        let est = mc_constant(&Graph::cycle(4).unwrap(), 3.0, &SymmetricMatrix::identity(4), 10_000, 12).unwrap();
        assert!(est.std_error > 0.0);
        assert!(within(&est, cycle4_identity(3.0).unwrap().log_magnitude(), 3.0), "{est:?}");
    }

    #[test]
    fn complete_graph_with_general_scale() {
        let d = SymmetricMatrix::from_row_major(3, vec![3.0, 1.0, 0.4, 1.0, 2.0, 0.3, 0.4, 0.3, 1.0]).unwrap();
        let est = mc_constant(&Graph::complete(3), 4.5, &d, 100, 1).unwrap();
        let exact = complete_constant(3, 4.5, &d).unwrap().log_magnitude();
        assert!((est.log_value - exact).abs() < 1e-10);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = Graph::cycle(4).unwrap();
        let d = SymmetricMatrix::identity(4);
        let a = mc_constant(&g, 3.0, &d, 500, 99).unwrap();
        let b = mc_constant(&g, 3.0, &d, 500, 99).unwrap();
        assert_eq!(a.log_value.to_bits(), b.log_value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_constant(&g, 3.0, &d, 500, 100).unwrap();
        assert_ne!(a.log_value, c.log_value);
    }

    #[test]
    fn replicate_order_and_seed_checks() {
        let g = Graph::cycle(4).unwrap();
        let d = SymmetricMatrix::identity(4);
        let reps = mc_replicates(&g, 3.0, &d, 200, &[5, 3, 9]).unwrap();
        assert_eq!(reps.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![5, 3, 9]);
        assert_eq!(reps[1], mc_constant(&g, 3.0, &d, 200, 3).unwrap());
        assert!(mc_replicates(&g, 3.0, &d, 200, &[1, 1]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let g = Graph::cycle(4).unwrap();
        let d = SymmetricMatrix::identity(4);
        assert!(mc_constant(&g, 3.0, &d, 1, 0).is_err());
        assert_eq!(mc_constant(&g, -1.0, &d, 10, 0), Err(Error::InvalidDelta(-1.0)));
        assert_eq!(
            mc_constant(&g, 3.0, &SymmetricMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0]), 10, 0),
            Err(Error::NotPositiveDefinite)
        );
        let opts = McOptions { ordering: Some(vec![0, 1, 1, 3]), complete_scale: true };
        assert_eq!(mc_constant_with(&g, 3.0, &d, 10, 0, &opts), Err(Error::InvalidOrdering));
    }

    #[test]
    fn accumulator_matches_direct_formula() {
        let xs = [-3.0, -0.5, -10.0, -1.25, -0.1];
        let mut acc = LogMeanAccumulator::new();
        xs.iter().for_each(|&x| acc.push(x));
        let (ln_mean, se) = acc.finish();
        let w: Vec<f64> = xs.iter().map(|x: &f64| x.exp()).collect();
        let mean = w.iter().sum::<f64>() / 5.0;
        let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((ln_mean - mean.ln()).abs() < 1e-14);
        assert!((se - (var / 5.0).sqrt() / mean).abs() < 1e-14);
    }
}
