//! PD-completion by iterative proportional scaling, and Isserlis matrices.
//!
//! The completion `D^G` of `D` agrees with `D` on the diagonal and on the edges
//! of `G`, and its inverse vanishes on the non-edges. The Isserlis matrix of `D`
//! over an index set of vertex pairs has entry
//! `d[μ][μ'] d[ν][ν'] + d[μ][ν'] d[μ'][ν]` at `((μ, ν), (μ', ν'))`.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::graph::Graph;
use crate::symmat::{ComplexSymmetricMatrix, SymmetricMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionOptions {
    /// Stop when the largest clique-marginal violation drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub completed: SymmetricMatrix,
    /// Full sweeps performed before the residual check passed.
    pub iterations: usize,
    /// Max absolute violation of the diagonal/edge constraints.
    pub residual: f64,
}

fn clique_residual(sigma: &SymmetricMatrix, d: &SymmetricMatrix, cliques: &[Vec<usize>]) -> f64 {
    let mut worst: f64 = 0.0;
    for c in cliques {
        for &i in c {
            for &j in c {
                worst = worst.max(libm::fabs(sigma.get(i, j) - d.get(i, j)));
            }
        }
    }
    worst
}

fn off_graph_max(k: &SymmetricMatrix, g: &Graph) -> f64 {
    g.non_edges().iter().fold(0.0, |m, &(u, v)| m.max(libm::fabs(k.get(u, v))))
}

/// PD-completion of `d` with respect to `g`.
///
/// Iterative proportional scaling over the maximal cliques of `g`: keep
/// `K ∈ S++(G)` and for each clique `C` set
/// `K_CC ← K_CC + (d_CC)⁻¹ − ((K⁻¹)_CC)⁻¹` until the clique marginals of `K⁻¹`
/// match `d` to within `opts.tol`.
pub fn pd_complete(d: &SymmetricMatrix, g: &Graph, opts: CompletionOptions) -> Result<CompletionResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("completion tolerance must be positive"));
    }
    let n = d.dim();
    if g.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.n() });
    }
    let d_inv = d.inverse()?;
    let cliques = g.maximal_cliques();
    let clique_inverses: Vec<SymmetricMatrix> =
        cliques.iter().map(|c| d.principal_submatrix(c)?.inverse()).collect::<Result<_>>()?;

    // Start from d⁻¹ when it already lies in S++(G), so a completed input is a fixed point.
    let scale = d_inv.diagonal().into_iter().fold(0.0f64, f64::max);
    let mut k = if off_graph_max(&d_inv, g) <= opts.tol * scale {
        let mut k = d_inv;
        for (u, v) in g.non_edges() {
            k.set(u, v, 0.0);
        }
        k
    } else {
        SymmetricMatrix::from_diagonal(&d.diagonal().iter().map(|x| 1.0 / x).collect::<Vec<_>>())
    };

    let mut sigma = k.inverse()?;
    let mut residual = clique_residual(&sigma, d, &cliques);
    let mut iterations = 0;
    while residual >= opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::CompletionNotConverged { iterations, residual });
        }
        for (c, target_inv) in cliques.iter().zip(&clique_inverses) {
            let current = sigma.principal_submatrix(c)?.inverse()?;
            let mut block = k.principal_submatrix(c)?;
            for a in 0..c.len() {
                for b in 0..=a {
                    block.set(a, b, block.get(a, b) + target_inv.get(a, b) - current.get(a, b));
                }
            }
            k.set_block(c, &block);
            sigma = k.inverse()?;
        }
        iterations += 1;
        residual = clique_residual(&sigma, d, &cliques);
    }
    Ok(CompletionResult { completed: sigma, iterations, residual })
}

/// Ordered vertex pairs indexing an Isserlis matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsserlisIndex {
    pairs: Vec<(usize, usize)>,
}

impl IsserlisIndex {
    /// Diagonal pairs in label order, then the edges of `g` lexicographically.
    pub fn for_graph(g: &Graph) -> Self {
        let mut pairs: Vec<(usize, usize)> = (0..g.n()).map(|i| (i, i)).collect();
        pairs.extend_from_slice(g.edges());
        Self { pairs }
    }

    /// All `n + n(n-1)/2` pairs, with the block for `g` first and the non-edges
    /// of `g` after it.
    pub fn full_for_graph(g: &Graph) -> Self {
        let mut idx = Self::for_graph(g);
        idx.pairs.extend(g.non_edges());
        idx
    }

    pub fn full(n: usize) -> Self {
        Self::for_graph(&Graph::complete(n))
    }

    /// Non-edge pairs of `g`, lexicographic.
    pub fn complement(g: &Graph) -> Self {
        Self { pairs: g.non_edges() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn isserlis_entries<T>(get: impl Fn(usize, usize) -> T, pairs: &[(usize, usize)]) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    let mut out = Vec::with_capacity(pairs.len() * pairs.len());
    for &(mu, nu) in pairs {
        for &(mu2, nu2) in pairs {
            out.push(get(mu, mu2) * get(nu, nu2) + get(mu, nu2) * get(mu2, nu));
        }
    }
    out
}

fn check_pairs(n: usize, idx: &IsserlisIndex) -> Result<()> {
    match idx.pairs.iter().flat_map(|&(a, b)| [a, b]).find(|&v| v >= n) {
        Some(v) => Err(Error::IndexOutOfRange { index: v, n }),
        None => Ok(()),
    }
}

/// Isserlis matrix of `d` over an arbitrary index.
pub fn isserlis_indexed(d: &SymmetricMatrix, idx: &IsserlisIndex) -> Result<SymmetricMatrix> {
    check_pairs(d.dim(), idx)?;
    SymmetricMatrix::from_row_major(idx.len(), isserlis_entries(|i, j| d.get(i, j), &idx.pairs))
}

/// `Iss_G(d)`, indexed by [`IsserlisIndex::for_graph`].
pub fn isserlis(d: &SymmetricMatrix, g: &Graph) -> Result<SymmetricMatrix> {
    if g.n() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), found: g.n() });
    }
    isserlis_indexed(d, &IsserlisIndex::for_graph(g))
}

/// Isserlis matrix over all pairs, `Iss(d)`.
pub fn isserlis_full(d: &SymmetricMatrix) -> SymmetricMatrix {
    isserlis_indexed(d, &IsserlisIndex::full(d.dim())).expect("full index is in range")
}

/// Block of `Iss(dinv)` on the non-edge pairs of `g`.
pub fn isserlis_complement_block(dinv: &SymmetricMatrix, g: &Graph) -> Result<SymmetricMatrix> {
    if g.n() != dinv.dim() {
        return Err(Error::DimensionMismatch { expected: dinv.dim(), found: g.n() });
    }
    if g.is_complete() {
        return Err(Error::CompleteGraph);
    }
    isserlis_indexed(dinv, &IsserlisIndex::complement(g))
}

/// Complex counterpart of [`isserlis_complement_block`].
pub fn isserlis_complement_block_complex(dinv: &ComplexSymmetricMatrix, g: &Graph) -> Result<ComplexSymmetricMatrix> {
    if g.n() != dinv.dim() {
        return Err(Error::DimensionMismatch { expected: dinv.dim(), found: g.n() });
    }
    if g.is_complete() {
        return Err(Error::CompleteGraph);
    }
    let idx = IsserlisIndex::complement(g);
    let entries: Vec<Complex64> = isserlis_entries(|i, j| dinv.get(i, j), &idx.pairs);
    let k = idx.len();
    let mut m = ComplexSymmetricMatrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            m.set(i, j, entries[i * k + j]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded_pd(n: usize, seed: u64) -> SymmetricMatrix {
        // xorshift entries in [-1, 1); A Aᵀ + 0.5 n I
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let a: Vec<f64> = (0..n * n).map(|_| next()).collect();
        SymmetricMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>() + if i == j { 0.5 * n as f64 } else { 0.0 }
        })
    }

    #[test]
    fn complete_graph_is_a_single_sweep() {
        let d = seeded_pd(4, 1);
        let r = pd_complete(&d, &Graph::complete(4), CompletionOptions::default()).unwrap();
        assert!(r.iterations <= 1);
        assert!(r.completed.max_abs_diff(&d) < 1e-12);
    }

    #[test]
    fn empty_graph_gives_diagonal() {
        let d = SymmetricMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let r = pd_complete(&d, &Graph::empty(2), CompletionOptions::default()).unwrap();
        assert!(r.completed.max_abs_diff(&SymmetricMatrix::from_diagonal(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn cycle_completion_invariants() {
        let g = Graph::cycle(4).unwrap();
        let d = seeded_pd(4, 42);
        let r = pd_complete(&d, &g, CompletionOptions::default()).unwrap();
        assert!(r.residual < 1e-10);
        let k = r.completed.inverse().unwrap();
        assert!(k.get(0, 2).abs() < 1e-9 && k.get(1, 3).abs() < 1e-9);
        for i in 0..4 {
            assert!((r.completed.get(i, i) - d.get(i, i)).abs() < 1e-10);
        }
        for &(u, v) in g.edges() {
            assert!((r.completed.get(u, v) - d.get(u, v)).abs() < 1e-10);
        }
        let again = pd_complete(&r.completed, &g, CompletionOptions::default()).unwrap();
        assert_eq!(again.iterations, 0);
        assert!(again.completed.max_abs_diff(&r.completed) < 1e-10);
    }

    #[test]
    fn completion_errors() {
        let bad = SymmetricMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(pd_complete(&bad, &Graph::empty(2), CompletionOptions::default()), Err(Error::NotPositiveDefinite));
        let d = seeded_pd(4, 3);
        let opts = CompletionOptions { tol: 1e-300, max_iter: 3 };
        assert!(matches!(
            pd_complete(&d, &Graph::cycle(4).unwrap(), opts),
            Err(Error::CompletionNotConverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn isserlis_of_identity() {
        let g = Graph::cycle(4).unwrap();
        let iss = isserlis(&SymmetricMatrix::identity(4), &g).unwrap();
        let mut diag = alloc::vec![2.0; 4];
        diag.extend([1.0; 4]);
        assert_eq!(iss, SymmetricMatrix::from_diagonal(&diag));
        let one = isserlis(&SymmetricMatrix::from_diagonal(&[3.0]), &Graph::empty(1)).unwrap();
        assert_eq!(one.as_slice(), &[18.0]);
    }

    #[test]
    fn complement_block_examples() {
        let g = Graph::complete(4).without_edge(1, 3).unwrap();
        let b = isserlis_complement_block(&SymmetricMatrix::identity(4), &g).unwrap();
        assert_eq!(b.as_slice(), &[1.0]);

        let (a, bb, c) = (2.0, 0.3, 5.0);
        let dinv = SymmetricMatrix::from_row_major(2, alloc::vec![a, bb, bb, c]).unwrap();
        let b = isserlis_complement_block(&dinv, &Graph::empty(2)).unwrap();
        assert_eq!(b.as_slice(), &[a * c + bb * bb]);

        assert_eq!(
            isserlis_complement_block(&SymmetricMatrix::identity(3), &Graph::complete(3)),
            Err(Error::CompleteGraph)
        );
    }

    #[test]
    fn complement_block_for_perturbed_identity() {
        // (I + iT)⁻¹ with T at (0, 2); G = C4 on 0-1-2-3, G* = G + {0,2}
        let g = Graph::cycle(4).unwrap();
        for &t in &[0.3, 1.0, 4.0] {
            let s = 1.0 / (1.0 + t * t);
            let mut dinv = ComplexSymmetricMatrix::from_real(&SymmetricMatrix::identity(4));
            dinv.set(0, 0, Complex64::new(s, 0.0));
            dinv.set(2, 2, Complex64::new(s, 0.0));
            dinv.set(0, 2, Complex64::new(0.0, -t * s));
            let gstar = g.with_edge(0, 2).unwrap();
            let block = isserlis_complement_block_complex(&dinv, &gstar).unwrap();
            // only pair (1, 3) remains and it avoids both perturbed vertices: w + x + y = 0
            let det = block.logdet();
            assert!(det.log_magnitude().abs() < 1e-14 && det.phase().abs() < 1e-14);

            // dropping the C4 edge {0,1} instead: G* = C4, G = C4 - {0,1}, perturb (0,1)
            let mut dinv = ComplexSymmetricMatrix::from_real(&SymmetricMatrix::identity(4));
            dinv.set(0, 0, Complex64::new(s, 0.0));
            dinv.set(1, 1, Complex64::new(s, 0.0));
            dinv.set(0, 1, Complex64::new(0.0, -t * s));
            let block = isserlis_complement_block_complex(&dinv, &g).unwrap();
            let cls = crate::graph::classify_pair(&g.without_edge(0, 1).unwrap(), 0, 1).unwrap();
            let expected = -((cls.w + cls.x + cls.y) as f64) * (1.0 + t * t).ln();
            let det = block.logdet();
            assert!((det.log_magnitude() - expected).abs() < 1e-12, "{} vs {}", det.log_magnitude(), expected);
            assert!(det.phase().abs() < 1e-12);
        }
    }
}
