//! Gauss–Legendre rules and a globally adaptive composite integrator for
//! complex-valued integrands.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Returns `(∫ f, ∫ |f|)` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, f: &mut F) -> Result<(Complex64, f64)>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x)?;
            sum += v * *w;
            abs += w * v.norm();
        }
        Ok((sum * half, abs * libm::fabs(half)))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    /// single-rule estimate over the whole panel
    coarse: Complex64,
    left: Complex64,
    right: Complex64,
    abs: f64,
}

impl Panel {
    /// sum of the rule over both halves
    fn fine(&self) -> Complex64 {
        self.left + self.right
    }

    fn error(&self) -> f64 {
        (self.fine() - self.coarse).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Equal-width panels each input interval starts with.
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_panels: 4096, initial_panels: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    /// Integral using the halved panels.
    pub value: Complex64,
    /// Integral using one rule per panel (half the nodes of `value`).
    pub coarse_value: Complex64,
    /// `∫ |f|`, for judging cancellation.
    pub abs_integral: f64,
    /// Sum of per-panel `|fine - coarse|`.
    pub error: f64,
    pub panels: usize,
}

impl AdaptiveResult {
    /// `|value - coarse_value| / |value|`: the change from doubling the node count.
    pub fn refinement_change(&self) -> f64 {
        (self.value - self.coarse_value).norm() / self.value.norm()
    }
}

/// Globally adaptive composite Gauss–Legendre over consecutive `breakpoints`.
///
/// Each panel is integrated with the rule on the whole panel and on both halves;
/// the panel with the largest disagreement is bisected until the summed
/// disagreement is below `rel_tol · |∫ f|`, or below the roundoff floor
/// `64 ε ∫ |f|` when the integral cancels heavily.
pub fn integrate_adaptive<F>(
    rule: &GaussLegendre,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
    mut f: F,
) -> Result<AdaptiveResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(opts.rel_tol > 0.0) || breakpoints.len() < 2 || opts.initial_panels == 0 {
        return Err(Error::InvalidParameter("adaptive quadrature needs rel_tol > 0 and an interval"));
    }
    let mut make = |a: f64, b: f64, coarse: Option<Complex64>| -> Result<Panel> {
        let m = 0.5 * (a + b);
        let coarse = match coarse {
            Some(c) => c,
            None => rule.integrate(a, b, &mut f)?.0,
        };
        let (l, la) = rule.integrate(a, m, &mut f)?;
        let (r, ra) = rule.integrate(m, b, &mut f)?;
        Ok(Panel { a, b, coarse, left: l, right: r, abs: la + ra })
    };

    let mut panels = Vec::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / opts.initial_panels as f64;
        for k in 0..opts.initial_panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == opts.initial_panels { b } else { lo + h };
            panels.push(make(lo, hi, None)?);
        }
    }

    loop {
        let value: Complex64 = panels.iter().map(Panel::fine).sum();
        let abs: f64 = panels.iter().map(|p| p.abs).sum();
        let error: f64 = panels.iter().map(Panel::error).sum();
        let target = (opts.rel_tol * value.norm()).max(64.0 * f64::EPSILON * abs);
        if error <= target {
            let coarse_value = panels.iter().map(|p| p.coarse).sum();
            return Ok(AdaptiveResult { value, coarse_value, abs_integral: abs, error, panels: panels.len() });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::QuadratureNotConverged { panels: panels.len(), rel_error: error / value.norm() });
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].error().total_cmp(&panels[j].error()))
            .expect("panels are non-empty");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        // the parent's halves are the children's coarse estimates
        panels.push(make(p.a, m, Some(p.left))?);
        panels.push(make(m, p.b, Some(p.right))?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        let weight_sum: f64 = rule.weights().iter().sum();
        assert!((weight_sum - 2.0).abs() < 1e-14);
        // ∫_0^2 x^19 = 2^20 / 20
        let (v, _) = rule.integrate(0.0, 2.0, &mut |x| Ok(Complex64::new(x.powi(19), 0.0))).unwrap();
        assert!((v.re - 2f64.powi(20) / 20.0).abs() < 1e-8);
    }

    #[test]
    fn nodes_are_symmetric_and_sorted_descending() {
        let rule = GaussLegendre::new(7);
        let n = rule.nodes();
        for i in 0..7 {
            assert!((n[i] + n[6 - i]).abs() < 1e-15);
        }
        assert!(n[3].abs() < 1e-15);
        assert!(n.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn adaptive_handles_a_peak() {
        // ∫_{-1}^{1} 1 / (1e-4 + x²) dx = 2 atan(100) / 1e-2
        let rule = GaussLegendre::new(20);
        let r = integrate_adaptive(&rule, &[-1.0, 1.0], AdaptiveOptions::default(), |x| {
            Ok(Complex64::new(1.0 / (1e-4 + x * x), 0.0))
        })
        .unwrap();
        let exact = 2.0 * 100f64.atan() / 1e-2;
        assert!((r.value.re - exact).abs() / exact < 1e-10);
        assert!(r.refinement_change() < 1e-10);
    }

    #[test]
    fn adaptive_complex_oscillation() {
        // ∫_0^π e^{i 7x} dx = (e^{i7π} - 1) / (7i) = 2i/7
        let rule = GaussLegendre::new(20);
        let r = integrate_adaptive(&rule, &[0.0, PI], AdaptiveOptions::default(), |x| {
            Ok(Complex64::new(0.0, 7.0 * x).exp())
        })
        .unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0 / 7.0)).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let rule = GaussLegendre::new(5);
        let opts = AdaptiveOptions { rel_tol: 1e-14, max_panels: 4, initial_panels: 1 };
        let r = integrate_adaptive(&rule, &[0.0, 1.0], opts, |x| Ok(Complex64::new(x.sqrt().sin() * 1e3, 0.0)));
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
