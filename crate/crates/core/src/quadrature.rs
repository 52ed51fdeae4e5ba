//! Gauss–Legendre panels, adaptive integration and extrapolation to zero.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GlRule {
    pub fn new(order: usize) -> Result<Self> {
        let n = NonZeroUsize::new(order)
            .ok_or_else(|| Error::Parameter("quadrature order must be positive".into()))?;
        let rule = GaussLegendre::new(n);
        let (nodes, weights) = rule.iter().map(|&(x, w)| (x, w)).unzip();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn panel(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        self.panel(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

/// A high-order rule paired with one of half the order; their difference is
/// the error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GlPair {
    pub high: GlRule,
    pub low: GlRule,
}

impl GlPair {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Parameter(format!("quadrature order {order} is below 2")));
        }
        Ok(Self {
            high: GlRule::new(order)?,
            low: GlRule::new(order / 2)?,
        })
    }

    /// Value from the high rule and `|high - low|`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> (Complex64, f64) {
        let hi = self.high.integrate(a, b, &mut f);
        let lo = self.low.integrate(a, b, &mut f);
        (hi, (hi - lo).norm())
    }

    /// Adaptive bisection of every panel of `edges` until each panel's
    /// estimate is below its share of `tol`.
    pub fn adaptive<F: FnMut(f64) -> Complex64>(
        &self,
        edges: &[f64],
        tol: f64,
        max_depth: usize,
        mut f: F,
    ) -> Result<(Complex64, f64)> {
        let total = edges.last().copied().unwrap_or(0.0) - edges.first().copied().unwrap_or(0.0);
        if !(total > 0.0) {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut converged = true;
        let mut stack: Vec<(f64, f64, usize)> =
            edges.windows(2).rev().map(|w| (w[0], w[1], 0)).collect();
        while let Some((a, b, depth)) = stack.pop() {
            let mut abs = 0.0;
            let v: Complex64 = self
                .high
                .panel(a, b)
                .map(|(x, w)| {
                    let fx = f(x);
                    abs += fx.norm() * w;
                    fx * w
                })
                .sum();
            let e = (v - self.low.integrate(a, b, &mut f)).norm();
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical {
                    message: format!("integrand is not finite on [{a}, {b}]"),
                    partial: value,
                    error_estimate: f64::INFINITY,
                });
            }
            let share = tol * (b - a) / total;
            // cancellation limits the attainable accuracy to roundoff in |f|
            let floor = 64.0 * f64::EPSILON * abs;
            if e <= share.max(floor) || depth >= max_depth {
                converged &= e <= share.max(floor);
                value += v;
                error += e;
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        if !converged && error > tol {
            return Err(Error::Numerical {
                message: format!("adaptive quadrature did not reach tolerance {tol:e}"),
                partial: value,
                error_estimate: error,
            });
        }
        Ok((value, error))
    }
}

/// Sorted panel edges on `[a, b]` containing every point of `points` that
/// lies inside, with geometric grading toward each of `graded` down to width
/// `min_scale`.
pub fn panel_edges(a: f64, b: f64, points: &[f64], graded: &[f64], min_scale: f64) -> Vec<f64> {
    let mut edges = vec![a, b];
    edges.extend(points.iter().copied().filter(|&p| p > a && p < b));
    let span = b - a;
    for &s in graded {
        if !(s > a - span && s < b + span) {
            continue;
        }
        if s > a && s < b {
            edges.push(s);
        }
        let mut d = min_scale;
        while d < span {
            for p in [s - d, s + d] {
                if p > a && p < b {
                    edges.push(p);
                }
            }
            d *= 2.0;
        }
    }
    edges.sort_by(f64::total_cmp);
    let tiny = 1e-14 * span.abs().max(1.0);
    edges.dedup_by(|x, y| (*x - *y).abs() <= tiny);
    // keep the exact endpoints
    if let Some(first) = edges.first_mut() {
        *first = a;
    }
    if let Some(last) = edges.last_mut() {
        *last = b;
    }
    edges
}

/// Neville extrapolants to `t = 0`: entry `i` is the value at zero of the
/// polynomial through the first `i + 1` samples.
pub fn neville_to_zero(ts: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = ts.len().min(values.len());
    let mut p: Vec<Complex64> = values[..n].to_vec();
    let mut diag = Vec::with_capacity(n);
    if n == 0 {
        return diag;
    }
    diag.push(p[0]);
    // after round m, p[i] interpolates samples i..=i+m
    for m in 1..n {
        for i in 0..n - m {
            let (ti, tj) = (ts[i], ts[i + m]);
            p[i] = (p[i + 1] * ti - p[i] * tj) / (ti - tj);
        }
        diag.push(p[0]);
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        let r = GlRule::new(16).unwrap();
        let v = r.integrate(-1.0, 2.0, |x| c(x.powi(31)));
        let exact = (2f64.powi(32) - 1.0) / 32.0;
        assert!((v.re - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn pair_error_small_for_smooth() {
        let p = GlPair::new(32).unwrap();
        let (v, e) = p.integrate(0.0, 1.0, |x| c(x.exp()));
        assert!((v.re - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(e < 1e-13);
    }

    #[test]
    fn adaptive_near_singular() {
        let p = GlPair::new(32).unwrap();
        let eps = 1e-6;
        let edges = panel_edges(-1.0, 1.0, &[], &[0.0], eps);
        let (v, _) = p
            .adaptive(&edges, 1e-12, 30, |x| Complex64::new(1.0, 0.0) / Complex64::new(x, eps))
            .unwrap();
        // integral of 1/(x + i eps) over [-1, 1]
        let exact = Complex64::new(0.0, -2.0 * (1.0 / eps).atan());
        assert!((v - exact).norm() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let ts = [0.1, 0.01, 0.001, 1e-4];
        let vals: Vec<Complex64> = ts.iter().map(|&t| c(2.0 + 3.0 * t - t * t)).collect();
        let e = neville_to_zero(&ts, &vals);
        assert!((e[2].re - 2.0).abs() < 1e-13);
        assert!((e[3].re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn edges_sorted_with_endpoints() {
        let e = panel_edges(0.0, 1.0, &[0.5, 2.0], &[0.25], 1e-3);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 1.0);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.contains(&0.5) && e.contains(&0.25));
    }
}
