//! Quick identity checks run by the `selfcheck` subcommand.

use std::fmt;

use gwishart_core::completion::isserlis_full;
use gwishart_core::constants::{
    approx_ratio, chordal_constant, cycle4_identity, path4_identity, roverato_estimate, roverato_estimate_eq2,
    stirling_rel_error, true_ratio_c4,
};
use gwishart_core::fourier::{fourier_constant, QuadratureConfig};
use gwishart_core::montecarlo::mc_constant;
use gwishart_core::{Graph, LogScalar, SymmetricMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check { name, passed: worst <= tol, detail: format!("worst {worst:.3e} (tol {tol:.0e})") }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn random_pd(rng: &mut impl Rng, n: usize) -> SymmetricMatrix {
    let a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymmetricMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
    })
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.random_bool(p)).collect();
    Graph::new(n, edges).expect("generated edges are in range")
}

pub fn isserlis_identities() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let iss_identity = isserlis_full(&SymmetricMatrix::identity(n));
        let k = iss_identity.dim();
        for i in 0..k {
            let want = if i < n { 2.0 } else { 1.0 };
            let off_diagonal = (0..k).filter(|&j| j != i).any(|j| iss_identity.get(i, j) != 0.0);
            if iss_identity.get(i, i) != want || off_diagonal {
                worst = f64::INFINITY;
            }
        }
        let iss_identity_inv = iss_identity.inverse()?;
        for _ in 0..10 {
            let d = random_pd(&mut rng, n);
            let iss = isserlis_full(&d);
            let expected = n as f64 * std::f64::consts::LN_2 + (n + 1) as f64 * d.logdet()?;
            worst = worst.max(rel(iss.logdet()?, expected));
            let middle = isserlis_full(&d.inverse()?);
            let lhs = iss.inverse()?;
            let scale = lhs.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for i in 0..k {
                for j in 0..k {
                    let mut rhs = 0.0;
                    for a in 0..k {
                        for b in 0..k {
                            rhs += iss_identity_inv.get(i, a) * middle.get(a, b) * iss_identity_inv.get(b, j);
                        }
                    }
                    worst = worst.max((lhs.get(i, j) - rhs).abs() / scale);
                }
            }
        }
    }
    Ok(check("isserlis identities", worst, 1e-8))
}

pub fn conjecture_forms_agree() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let n = rng.random_range(2..=5);
        let g = random_graph(&mut rng, n, 0.5);
        let delta = rng.random_range(0.5..8.0);
        let d = random_pd(&mut rng, n);
        let c = LogScalar::from_ln(rng.random_range(-5.0..5.0));
        let a = roverato_estimate(&g, delta, &d, c)?.log_magnitude();
        let b = roverato_estimate_eq2(&g, delta, &d, c)?.log_magnitude();
        worst = worst.max(rel(a, b));
    }
    Ok(check("conjecture equivalent forms", worst, 1e-8))
}

pub fn path_formula() -> Result<Check> {
    let path = Graph::path(4);
    let mut worst: f64 = 0.0;
    for d in 1..=10 {
        let delta = f64::from(d);
        let got = chordal_constant(&path, delta, &SymmetricMatrix::identity(4))?.log_magnitude();
        worst = worst.max((got - path4_identity(delta)?.log_magnitude()).abs());
    }
    Ok(check("chordal path formula", worst, 1e-10))
}

pub fn cycle_formula() -> Result<Check> {
    let kite = Graph::cycle(4)?.with_edge(0, 2)?;
    let mut worst: f64 = 0.0;
    for d in 1..=10 {
        let delta = f64::from(d);
        let got = fourier_constant(&kite, (0, 2), delta, &SymmetricMatrix::identity(4), &QuadratureConfig::default())?;
        worst = worst.max(rel(got.log_magnitude(), cycle4_identity(delta)?.log_magnitude()));
    }
    Ok(check("fourier cycle formula", worst, 1e-8))
}

pub fn counterexample() -> Result<Check> {
    let gap = (true_ratio_c4(1.0)? - approx_ratio(1.0, 0)?).abs();
    let mut all_differ = true;
    for d in 1..=10 {
        let delta = f64::from(d);
        all_differ &= true_ratio_c4(delta)? != approx_ratio(delta, 0)?;
    }
    Ok(Check {
        name: "ratio counterexample",
        passed: gap > 0.09 && all_differ,
        detail: format!("gap at 1 is {gap:.6}, approximation differs for every delta: {all_differ}"),
    })
}

pub fn stirling_asymptotic() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for delta in [50.0, 100.0, 200.0] {
        worst = worst.max((stirling_rel_error(delta)? * 2.0 * delta * delta - 1.0).abs());
    }
    Ok(check("stirling asymptotic", worst, 0.1))
}

pub fn monte_carlo_oracles() -> Result<Check> {
    let i4 = SymmetricMatrix::identity(4);
    let cases = [
        (Graph::complete(1), 2.0, SymmetricMatrix::from_diagonal(&[2.0]), 0.0),
        (Graph::path(4), 3.0, i4.clone(), path4_identity(3.0)?.log_magnitude()),
        (Graph::cycle(4)?, 3.0, i4, cycle4_identity(3.0)?.log_magnitude()),
    ];
    let mut worst: f64 = 0.0;
    for (seed, (g, delta, d, exact)) in cases.into_iter().enumerate() {
        let est = mc_constant(&g, delta, &d, 10_000, seed as u64)?;
        let z = (est.log_value - exact).abs() / (3.0 * est.std_error + 1e-10);
        worst = worst.max(z);
    }
    Ok(Check {
        name: "monte carlo oracles",
        passed: worst <= 1.0,
        detail: format!("largest |mc - exact| / (3 se) is {worst:.3}"),
    })
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![
        isserlis_identities()?,
        conjecture_forms_agree()?,
        path_formula()?,
        cycle_formula()?,
        counterexample()?,
        stirling_asymptotic()?,
        monte_carlo_oracles()?,
    ])
}
