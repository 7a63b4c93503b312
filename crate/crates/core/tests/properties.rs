//! Property suites checked against independent brute-force oracles.

use gwishart_core::completion::{
    isserlis, isserlis_complement_block, isserlis_full, pd_complete, CompletionOptions, IsserlisIndex,
};
use gwishart_core::constants::{chordal_constant, roverato_estimate, roverato_estimate_eq2};
use gwishart_core::fourier::{fourier_constant, QuadratureConfig};
use gwishart_core::graph::{classify_pair, decompose, perfect_elimination_ordering, Graph};
use gwishart_core::montecarlo::{mc_constant, mc_constant_with, McOptions};
use gwishart_core::{LogScalar, SymmetricMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p)).unwrap()
}

/// True when some vertex subset of size >= 4 induces a cycle.
fn has_long_induced_cycle(g: &Graph) -> bool {
    let n = g.n();
    for subset in 0u32..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&v| subset >> v & 1 == 1).collect();
        if vs.len() < 4 {
            continue;
        }
        let sub = g.induced(&vs).unwrap();
        if (0..sub.n()).all(|v| sub.degree(v) == 2) && connected(&sub) {
            return true;
        }
    }
    false
}

fn connected(g: &Graph) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn random_pd(rng: &mut impl Rng, n: usize) -> SymmetricMatrix {
    let a: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    SymmetricMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>() + if i == j { 0.3 } else { 0.0 }
    })
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
        }
    }
    out
}

#[test]
fn chordality_matches_induced_cycle_search_exhaustively() {
    for n in 1..=5 {
        let pairs = n * (n - 1) / 2;
        for mask in 0u32..(1 << pairs) {
            let g = graph_from_mask(n, mask);
            let peo = perfect_elimination_ordering(&g);
            assert_eq!(peo.is_some(), !has_long_induced_cycle(&g), "n={n} mask={mask:b}");
            if let Some(peo) = peo {
                let dec = gwishart_core::graph::clique_decomposition(&g, &peo).unwrap();
                assert!(dec.is_valid_for(&g), "n={n} mask={mask:b}");
            }
        }
    }
}

#[test]
fn chordality_matches_induced_cycle_search_randomly() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..400 {
        let n = 6 + trial % 2;
        let g = random_graph(&mut rng, n, 0.5);
        assert_eq!(g.is_chordal(), !has_long_induced_cycle(&g), "{g:?}");
        if g.is_chordal() {
            assert!(decompose(&g).unwrap().is_valid_for(&g));
        }
    }
}

#[test]
fn pair_classification_sums_to_n_minus_two() {
    for n in 2..=5 {
        for mask in 0u32..(1 << (n * (n - 1) / 2)) {
            let g = graph_from_mask(n, mask);
            for (u, v) in g.non_edges() {
                let c = classify_pair(&g, u, v).unwrap();
                assert_eq!(c.w + c.x + c.y + c.s, n - 2);
            }
        }
    }
}

#[test]
fn isserlis_inverse_and_determinant_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..=4 {
        let iss_id_inv = isserlis_full(&SymmetricMatrix::identity(n)).inverse().unwrap();
        for _ in 0..20 {
            let d = random_pd(&mut rng, n);
            let iss = isserlis_full(&d);
            let lhs = iss.inverse().unwrap();
            let middle = isserlis_full(&d.inverse().unwrap());
            let k = iss.dim();
            let left = matmul(iss_id_inv.as_slice(), middle.as_slice(), k);
            let rhs = matmul(&left, iss_id_inv.as_slice(), k);
            let scale = lhs.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (a, b) in lhs.as_slice().iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-8 * scale, "n={n}: {a} vs {b}");
            }
            let expected = n as f64 * 2f64.ln() + (n + 1) as f64 * d.logdet().unwrap();
            let got = iss.logdet().unwrap();
            assert!((got - expected).abs() < 1e-8 * expected.abs().max(1.0));
        }
    }
}

#[test]
fn block_determinant_identity_holds_for_all_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..60 {
        let n = 2 + trial % 4;
        let g = random_graph(&mut rng, n, 0.5);
        if g.is_complete() {
            continue;
        }
        let d = random_pd(&mut rng, n);
        let completed = pd_complete(&d, &g, CompletionOptions::default()).unwrap().completed;
        let lhs = n as f64 * 2f64.ln() + (n + 1) as f64 * completed.logdet().unwrap();
        let rhs = isserlis(&completed, &g).unwrap().logdet().unwrap()
            - isserlis_complement_block(&completed.inverse().unwrap(), &g).unwrap().logdet().unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0), "{g:?}: {lhs} vs {rhs}");
        // the full index places W first
        let full = IsserlisIndex::full_for_graph(&g);
        assert_eq!(&full.pairs()[..n + g.edge_count()], IsserlisIndex::for_graph(&g).pairs());
    }
}

#[test]
fn completion_invariants_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = CompletionOptions::default();
    for trial in 0..40 {
        let n = 2 + trial % 4;
        let g = random_graph(&mut rng, n, 0.5);
        let d = random_pd(&mut rng, n);
        let r = pd_complete(&d, &g, opts).unwrap();
        assert!(r.completed.is_positive_definite());
        let k = r.completed.inverse().unwrap();
        for (u, v) in g.non_edges() {
            assert!(k.get(u, v).abs() < 10.0 * opts.tol, "{g:?}");
        }
        for i in 0..n {
            assert!((r.completed.get(i, i) - d.get(i, i)).abs() <= opts.tol);
        }
        for &(u, v) in g.edges() {
            assert!((r.completed.get(u, v) - d.get(u, v)).abs() <= opts.tol);
        }
        let again = pd_complete(&r.completed, &g, opts).unwrap();
        assert_eq!(again.iterations, 0);
    }
}

#[test]
fn both_conjecture_forms_agree_and_are_exact_on_chordal_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c_id = LogScalar::from_ln(7.25);
    for trial in 0..50 {
        let n = 2 + trial % 4;
        let g = random_graph(&mut rng, n, 0.6);
        let d = random_pd(&mut rng, n);
        let delta = 0.5 + 6.0 * rng.random::<f64>();
        let a = roverato_estimate(&g, delta, &d, c_id).unwrap().log_magnitude();
        let b = roverato_estimate_eq2(&g, delta, &d, c_id).unwrap().log_magnitude();
        assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{g:?}: {a} vs {b}");
        if g.is_chordal() {
            let id = chordal_constant(&g, delta, &SymmetricMatrix::identity(n)).unwrap();
            let conj = roverato_estimate(&g, delta, &d, id).unwrap().log_magnitude();
            let exact = chordal_constant(&g, delta, &d).unwrap().log_magnitude();
            assert!((conj - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{g:?}");
        }
    }
}

/// Lexicographically smallest edge mask over all relabellings.
fn canonical_mask(n: usize, mask: u32) -> u32 {
    let idx = |u: usize, v: usize| {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        (0..u).map(|k| n - 1 - k).sum::<usize>() + (v - u - 1)
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u32::MAX;
    loop {
        let mut m = 0u32;
        for u in 0..n {
            for v in (u + 1)..n {
                if mask >> idx(u, v) & 1 == 1 {
                    m |= 1 << idx(perm[u], perm[v]);
                }
            }
        }
        best = best.min(m);
        // next permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return best;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

#[test]
fn fourier_matches_chordal_when_both_graphs_are_chordal() {
    let cfg = QuadratureConfig::default();
    let mut checked = 0;
    for n in 2..=5 {
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << (n * (n - 1) / 2)) {
            let canon = canonical_mask(n, mask);
            if !seen.insert(canon) {
                continue;
            }
            let g_star = graph_from_mask(n, canon);
            if !g_star.is_chordal() {
                continue;
            }
            for &(u, v) in g_star.edges() {
                let g = g_star.without_edge(u, v).unwrap();
                if !g.is_chordal() {
                    continue;
                }
                for delta in [1.0, 3.5] {
                    let id = SymmetricMatrix::identity(n);
                    let f = fourier_constant(&g_star, (u, v), delta, &id, &cfg).unwrap().log_magnitude();
                    let c = chordal_constant(&g, delta, &id).unwrap().log_magnitude();
                    assert!(
                        (f - c).abs() <= 1e-7 * c.abs().max(1.0),
                        "{g_star:?} minus ({u},{v}) at {delta}: {f} vs {c}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 50, "only {checked} cases");
}

#[test]
fn fourier_general_scale_matches_chordal() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = QuadratureConfig::default();
    let mut checked = 0;
    while checked < 15 {
        let n = 3 + checked % 3;
        let g_star = random_graph(&mut rng, n, 0.7);
        let edges: Vec<_> = g_star.edges().to_vec();
        let Some(&(u, v)) =
            edges.iter().find(|&&(u, v)| g_star.is_chordal() && g_star.without_edge(u, v).unwrap().is_chordal())
        else {
            continue;
        };
        let d = random_pd(&mut rng, n);
        let delta = 1.0 + 5.0 * rng.random::<f64>();
        let f = fourier_constant(&g_star, (u, v), delta, &d, &cfg).unwrap().log_magnitude();
        let c = chordal_constant(&g_star.without_edge(u, v).unwrap(), delta, &d).unwrap().log_magnitude();
        assert!((f - c).abs() <= 1e-7 * c.abs().max(1.0), "{f} vs {c}");
        checked += 1;
    }
}

#[test]
fn mc_error_shrinks_with_samples_and_is_order_invariant() {
    let g = Graph::cycle(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = random_pd(&mut rng, 4);
    let raw = McOptions { ordering: None, complete_scale: false };
    let small = mc_constant_with(&g, 3.0, &d, 4_000, 1, &raw).unwrap();
    let large = mc_constant_with(&g, 3.0, &d, 16_000, 2, &raw).unwrap();
    let ratio = small.std_error / large.std_error;
    assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "ratio {ratio}");

    let reordered = McOptions { ordering: Some(vec![2, 0, 3, 1]), complete_scale: false };
    let other = mc_constant_with(&g, 3.0, &d, 16_000, 3, &reordered).unwrap();
    let gap = (large.log_value - other.log_value).abs();
    assert!(gap < 3.0 * (large.std_error.powi(2) + other.std_error.powi(2)).sqrt(), "gap {gap}");

    let completed = mc_constant(&g, 3.0, &d, 16_000, 4).unwrap();
    let gap = (large.log_value - completed.log_value).abs();
    assert!(gap < 3.0 * (large.std_error.powi(2) + completed.std_error.powi(2)).sqrt(), "gap {gap}");
}

#[test]
fn mc_error_bar_matches_replicate_spread() {
    let g = Graph::cycle(4).unwrap();
    let d = SymmetricMatrix::identity(4);
    let reps: Vec<_> = (0..60).map(|s| mc_constant(&g, 2.0, &d, 500, 1000 + s).unwrap()).collect();
    let mean = reps.iter().map(|r| r.log_value).sum::<f64>() / reps.len() as f64;
    let sd = (reps.iter().map(|r| (r.log_value - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64).sqrt();
    let reported = reps.iter().map(|r| r.std_error).sum::<f64>() / reps.len() as f64;
    assert!(sd / reported > 0.5 && sd / reported < 2.0, "sd {sd} vs reported {reported}");
}
