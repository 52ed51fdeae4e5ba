use num_complex::Complex64;
use rayon::prelude::*;

use super::extension::AlmostAnalyticExtension;
use super::TubeFunction;
use crate::error::{Error, Result};
use crate::quadrature::{neville_to_zero, panel_edges, GlPair, GlRule};
use crate::testfun::TestFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre order per panel; half this order gives the error
    /// estimate.
    pub order: usize,
    /// Lower end of the `t` integral; `[0, t_min]` is bounded, not integrated.
    pub t_min: f64,
    /// Bound on the total error estimate.
    pub tolerance: f64,
    /// Equal subdivisions of each panel between `x` breakpoints.
    pub x_subdivisions: usize,
    /// Bisection depth limit per `t` panel.
    pub max_t_depth: usize,
    /// Times the `x` subdivisions may be doubled.
    pub max_refinements: usize,
    /// Additional per-axis `x` breakpoints, e.g. to share panels between
    /// several test functions.
    pub extra_x_breaks: Vec<Vec<f64>>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 32,
            t_min: 1e-6,
            tolerance: 1e-6,
            x_subdivisions: 4,
            max_t_depth: 12,
            max_refinements: 3,
            extra_x_breaks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingResult {
    pub value: Complex64,
    pub quadrature_error_estimate: f64,
    /// `∫_K F(x + iY) Φ(x + iY) dx`
    pub surface: Complex64,
    /// `2i Σ_j Y_j ∫_0^1 ∫_K ∂̄_jΦ(x + itY) F(x + itY) dx dt`
    pub volume: Complex64,
    /// Part of the error estimate covering `t < t_min`.
    pub remainder_bound: f64,
    pub t_panels: usize,
    pub x_nodes: usize,
    /// Accepted `t` panels in increasing `t`.
    pub t_trace: Vec<TPanel>,
}

/// One accepted panel of the volume integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TPanel {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Contribution to [`PairingResult::volume`].
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Quadrature nodes of a tensor grid over the support box.
struct XGrid {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    jets: Vec<Vec<f64>>,
}

fn axis_nodes(rule: &GlRule, edges: &[f64]) -> Vec<(f64, f64)> {
    edges.windows(2).flat_map(|w| rule.panel(w[0], w[1]).collect::<Vec<_>>()).collect()
}

fn build_grid(rule: &GlRule, axes: &[Vec<f64>], phi: &dyn TestFunction, order: usize) -> Result<XGrid> {
    let per_axis: Vec<Vec<(f64, f64)>> = axes.iter().map(|e| axis_nodes(rule, e)).collect();
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = match per_axis.len() {
        1 => per_axis[0].iter().map(|&(x, w)| (vec![x], w)).unzip(),
        _ => per_axis[0]
            .iter()
            .flat_map(|&(a, wa)| per_axis[1].iter().map(move |&(b, wb)| (vec![a, b], wa * wb)))
            .unzip(),
    };
    let jets = points
        .par_iter()
        .map(|x| phi.derivatives(x, order))
        .collect::<Result<Vec<_>>>()?;
    Ok(XGrid { points, weights, jets })
}

fn subdivide(edges: &[f64], parts: usize) -> Vec<f64> {
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        for k in 1..=parts {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / parts as f64);
        }
    }
    *out.last_mut().expect("nonempty") = *edges.last().expect("nonempty");
    out
}

fn complex_point(x: &[f64], y: &[f64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| Complex64::new(*a, *b)).collect()
}

/// `Σ_j Y_j ∫ ∂̄_jΦ(x + itY) F(x + itY) dx` and the integral of its modulus.
fn volume_integrand(
    f: &TubeFunction,
    ext: &AlmostAnalyticExtension,
    direction: &[f64],
    grid: &XGrid,
    t: f64,
) -> Result<(Complex64, f64)> {
    let y: Vec<f64> = direction.iter().map(|v| v * t).collect();
    let w = ext.weights(&y)?;
    if w.n_max.is_none() {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for ((x, wt), jet) in grid.points.iter().zip(&grid.weights).zip(&grid.jets) {
        let mut g = Complex64::new(0.0, 0.0);
        for (j, yj) in direction.iter().enumerate() {
            if *yj != 0.0 {
                g += *yj * w.dbar(jet, j);
            }
        }
        if g == Complex64::new(0.0, 0.0) {
            continue;
        }
        let v = g * f.eval(&complex_point(x, &y));
        acc += v * *wt;
        abs += v.norm() * wt;
    }
    Ok((acc, abs))
}

fn surface_integrand(f: &TubeFunction, ext: &AlmostAnalyticExtension, direction: &[f64], grid: &XGrid) -> Result<Complex64> {
    let w = ext.weights(direction)?;
    if w.n_max.is_none() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((x, wt), jet) in grid.points.iter().zip(&grid.weights).zip(&grid.jets) {
        let phi = w.value(jet);
        if phi != Complex64::new(0.0, 0.0) {
            acc += phi * f.eval(&complex_point(x, direction)) * *wt;
        }
    }
    Ok(acc)
}

fn check_support_in_domain(f: &TubeFunction, phi: &dyn TestFunction) -> Result<Vec<(f64, f64)>> {
    if f.dim() != phi.dim() {
        return Err(Error::Parameter(format!(
            "tube function is {}-dimensional, test function {}-dimensional",
            f.dim(),
            phi.dim()
        )));
    }
    let k = phi.support();
    for ((lo, hi), (ulo, uhi)) in k.iter().zip(&f.domain) {
        if lo < ulo || hi > uhi {
            return Err(Error::Domain(format!(
                "test function support [{lo}, {hi}] is not inside the domain ({ulo}, {uhi})"
            )));
        }
    }
    Ok(k)
}

fn x_breaks(f: &TubeFunction, phi: &dyn TestFunction, extra: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = phi.breakpoints();
    for (axis, b) in out.iter_mut().enumerate() {
        if let Some(e) = extra.get(axis) {
            b.extend(e);
        }
        if let Some(s) = f.singular_points.get(axis) {
            b.extend(s);
        }
    }
    out
}

/// Boundary value `⟨F(x + i0), φ⟩` by Stokes' formula
/// `∫_K F Φ(x + iY) dx + 2i Σ_j Y_j ∫_0^1 ∫_K ∂̄_jΦ(x + itY) F(x + itY) dx dt`.
pub fn stokes_pairing(
    f: &TubeFunction,
    ext: &AlmostAnalyticExtension,
    direction: &[f64],
    quad: &QuadratureSpec,
) -> Result<PairingResult> {
    f.check_direction(direction)?;
    let phi = ext.phi().as_ref();
    let support = check_support_in_domain(f, phi)?;
    if !(quad.t_min > 0.0 && quad.t_min < 1.0 && quad.tolerance > 0.0 && quad.x_subdivisions >= 1) {
        return Err(Error::Parameter("quadrature needs 0 < t_min < 1, tolerance > 0, subdivisions >= 1".into()));
    }
    let pair = GlPair::new(quad.order)?;
    let ynorm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let y_min: Vec<f64> = direction.iter().map(|v| v * quad.t_min).collect();
    let order = ext
        .weights(&y_min)?
        .dbar_order()
        .unwrap_or(0)
        .max(ext.weights(direction)?.n_max.unwrap_or(0));
    let breaks = x_breaks(f, phi, &quad.extra_x_breaks);

    let mut t_edges = vec![quad.t_min, 1.0];
    let mut p = 0.5;
    while p > quad.t_min {
        t_edges.push(p);
        p *= 0.5;
    }
    t_edges.extend(
        ext.t_breakpoints(direction, order)
            .into_iter()
            .filter(|t| *t > quad.t_min && *t < 1.0),
    );
    t_edges.sort_by(f64::total_cmp);
    t_edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    let t_total = 1.0 - quad.t_min;
    let part = quad.tolerance / 4.0;

    let mut last = None;
    for attempt in 0..=quad.max_refinements {
        let parts = quad.x_subdivisions << attempt;
        let axes: Vec<Vec<f64>> = support
            .iter()
            .enumerate()
            .map(|(axis, &(lo, hi))| {
                let base = subdivide(&panel_edges(lo, hi, &breaks[axis], &[], 1.0), parts);
                let scale = quad.t_min * ynorm;
                panel_edges(lo, hi, &base, &f.singular_points[axis], scale)
            })
            .collect();
        let high = build_grid(&pair.high, &axes, phi, order)?;
        let low = build_grid(&pair.low, &axes, phi, order)?;

        let surface = surface_integrand(f, ext, direction, &high)?;
        let surface_err = (surface - surface_integrand(f, ext, direction, &low)?).norm();

        let mut volume = Complex64::new(0.0, 0.0);
        let (mut t_err, mut x_err) = (0.0, 0.0);
        let mut t_converged = true;
        let mut trace = Vec::new();
        let mut stack: Vec<(f64, f64, usize)> = t_edges.windows(2).rev().map(|w| (w[0], w[1], 0)).collect();
        while let Some((a, b, depth)) = stack.pop() {
            let nodes_h: Vec<(f64, f64)> = pair.high.panel(a, b).collect();
            let nodes_l: Vec<(f64, f64)> = pair.low.panel(a, b).collect();
            let hh: Vec<Complex64> = nodes_h
                .par_iter()
                .map(|&(t, w)| Ok(volume_integrand(f, ext, direction, &high, t)?.0 * w))
                .collect::<Result<_>>()?;
            let v_hh: Complex64 = hh.iter().sum();
            let v_lh: Complex64 = nodes_l
                .par_iter()
                .map(|&(t, w)| Ok(volume_integrand(f, ext, direction, &high, t)?.0 * w))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .sum();
            let e_t = (v_hh - v_lh).norm();
            let share = part * (b - a) / t_total;
            if e_t <= share.max(1e-15 * v_hh.norm()) || depth >= quad.max_t_depth {
                t_converged &= e_t <= share.max(1e-15 * v_hh.norm());
                let v_hl: Complex64 = nodes_h
                    .par_iter()
                    .map(|&(t, w)| Ok(volume_integrand(f, ext, direction, &low, t)?.0 * w))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .sum();
                volume += v_hh;
                t_err += e_t;
                x_err += (v_hh - v_hl).norm();
                trace.push(TPanel {
                    t_lo: a,
                    t_hi: b,
                    value: Complex64::new(0.0, 2.0) * v_hh,
                    error_estimate: 2.0 * (e_t + (v_hh - v_hl).norm()),
                });
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        let (_, abs_at_min) = volume_integrand(f, ext, direction, &high, quad.t_min)?;
        let two = Complex64::new(0.0, 2.0);
        let remainder_bound = 2.0 * 2.0 * quad.t_min * abs_at_min;
        let volume = two * volume;
        let error = 2.0 * (t_err + x_err) + surface_err + remainder_bound;
        let result = PairingResult {
            value: surface + volume,
            quadrature_error_estimate: error,
            surface,
            volume,
            remainder_bound,
            t_panels: trace.len(),
            x_nodes: high.points.len(),
            t_trace: trace,
        };
        if error <= quad.tolerance && t_converged {
            return Ok(result);
        }
        last = Some(result);
    }
    let r = last.expect("at least one attempt");
    Err(Error::Numerical {
        message: "Stokes pairing quadrature did not reach its tolerance".into(),
        partial: r.value,
        error_estimate: r.quadrature_error_estimate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectPairingSpec {
    /// Decreasing heights `t`.
    pub t_sequence: Vec<f64>,
    /// Agreement required between the last two extrapolants.
    pub tolerance: f64,
    /// Absolute tolerance of each `x` integral.
    pub quad_tolerance: f64,
    pub order: usize,
    pub max_depth: usize,
}

impl Default for DirectPairingSpec {
    fn default() -> Self {
        Self {
            t_sequence: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            tolerance: 1e-6,
            quad_tolerance: 1e-12,
            order: 32,
            max_depth: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectPairing {
    /// The last extrapolant, when the extrapolation converged.
    pub value: Option<Complex64>,
    pub converged: bool,
    pub t_sequence: Vec<f64>,
    /// `∫ F(x + itY) φ(x) dx` per height.
    pub per_t: Vec<Complex64>,
    pub per_t_error: Vec<f64>,
    pub extrapolants: Vec<Complex64>,
    pub last_difference: f64,
}

fn integrate_x(
    pair: &GlPair,
    edges: &[Vec<f64>],
    tol: f64,
    depth: usize,
    g: &(dyn Fn(&[f64]) -> Complex64 + Sync),
) -> Result<(Complex64, f64)> {
    match edges.len() {
        1 => pair.adaptive(&edges[0], tol, depth, |x| g(&[x])),
        _ => {
            let mut inner_err = 0.0;
            let mut failure = None;
            let (v, e) = pair.adaptive(&edges[0], tol, depth, |a| {
                match pair.adaptive(&edges[1], tol, depth, |b| g(&[a, b])) {
                    Ok((v, e)) => {
                        inner_err = f64::max(inner_err, e);
                        v
                    }
                    Err(err) => {
                        failure.get_or_insert(err);
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                }
            })?;
            if let Some(err) = failure {
                return Err(err);
            }
            Ok((v, e + inner_err))
        }
    }
}

/// `lim_{t→0} ∫ F(x + itY) φ(x) dx` by extrapolation over `t_sequence`.
pub fn direct_pairing(
    f: &TubeFunction,
    phi: &dyn TestFunction,
    direction: &[f64],
    spec: &DirectPairingSpec,
) -> Result<DirectPairing> {
    f.check_direction(direction)?;
    let support = check_support_in_domain(f, phi)?;
    let ynorm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ts = &spec.t_sequence;
    if ts.is_empty() || ts.windows(2).any(|w| !(w[1] < w[0])) || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Parameter("t_sequence must be positive and strictly decreasing".into()));
    }
    if ts[0] * ynorm >= f.height {
        return Err(Error::Domain(format!(
            "t = {} leaves the tube of height {}",
            ts[0], f.height
        )));
    }
    let pair = GlPair::new(spec.order)?;
    let breaks = x_breaks(f, phi, &[]);
    let mut per_t = Vec::with_capacity(ts.len());
    let mut per_t_error = Vec::with_capacity(ts.len());
    for &t in ts {
        let y: Vec<f64> = direction.iter().map(|v| v * t).collect();
        let edges: Vec<Vec<f64>> = support
            .iter()
            .enumerate()
            .map(|(axis, &(lo, hi))| panel_edges(lo, hi, &breaks[axis], &f.singular_points[axis], t * ynorm))
            .collect();
        let g = |x: &[f64]| -> Complex64 {
            let p = phi.value(x).unwrap_or(f64::NAN);
            if p == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            f.eval(&complex_point(x, &y)) * p
        };
        match integrate_x(&pair, &edges, spec.quad_tolerance, spec.max_depth, &g) {
            Ok((v, e)) if v.re.is_finite() && v.im.is_finite() => {
                per_t.push(v);
                per_t_error.push(e);
            }
            // the integrand blew up: report the trace so far as non-convergent
            _ => break,
        }
    }
    let extrapolants = neville_to_zero(&ts[..per_t.len()], &per_t);
    let n = extrapolants.len();
    let last_difference = if n >= 2 {
        (extrapolants[n - 1] - extrapolants[n - 2]).norm()
    } else {
        f64::INFINITY
    };
    let converged = per_t.len() == ts.len() && n >= 2 && last_difference <= spec.tolerance;
    Ok(DirectPairing {
        value: if converged { extrapolants.last().copied() } else { None },
        converged,
        t_sequence: ts.clone(),
        per_t,
        per_t_error,
        extrapolants,
        last_difference,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::boundary::Fixture;
    use crate::cone::ConeSpec;
    use crate::sequences::GevreyParams;
    use crate::testfun::{BumpFunction, LinearCombination};

    fn params() -> GevreyParams {
        GevreyParams::new(1.0, 2.0, 1.0).unwrap()
    }

    fn inv_z() -> TubeFunction {
        Fixture::InvZ.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap()
    }

    fn bump(c: f64) -> Arc<dyn TestFunction> {
        Arc::new(BumpFunction::standard(vec![c]).unwrap())
    }

    #[test]
    fn constant_gives_integral() {
        let f = Fixture::Const(1.0).tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap();
        let phi = bump(0.0);
        let ext = AlmostAnalyticExtension::with_standard_cutoff(phi.clone(), params()).unwrap();
        let r = stokes_pairing(&f, &ext, &[0.5], &QuadratureSpec::default()).unwrap();
        let pair = GlPair::new(32).unwrap();
        let edges = [-2.0, -1.0, 1.0, 2.0];
        let (integral, _) = pair
            .adaptive(&edges, 1e-14, 30, |x| Complex64::new(phi.value(&[x]).unwrap(), 0.0))
            .unwrap();
        assert!((r.value - integral).norm() < 1e-6, "{} vs {integral}", r.value);
        let d = direct_pairing(&f, phi.as_ref(), &[0.5], &DirectPairingSpec::default()).unwrap();
        assert!(d.converged);
        assert!(d.per_t.iter().all(|v| (v - integral).norm() < 1e-10));
    }

    #[test]
    fn inverse_z_is_minus_i_pi() {
        let f = inv_z();
        let phi = bump(0.0);
        let ext = AlmostAnalyticExtension::with_standard_cutoff(phi.clone(), params()).unwrap();
        let expected = Complex64::new(0.0, -PI);
        let r = stokes_pairing(&f, &ext, &[0.5], &QuadratureSpec::default()).unwrap();
        assert!((r.value - expected).norm() < 1e-6, "{r:?}");
        assert_eq!(r.value, r.surface + r.volume);
        let d = direct_pairing(&f, phi.as_ref(), &[0.5], &DirectPairingSpec::default()).unwrap();
        assert!(d.converged, "{d:?}");
        assert!((d.value.unwrap() - expected).norm() < 1e-6);
        assert!((d.value.unwrap() - r.value).norm() < 1e-6);
        let r9 = stokes_pairing(&f, &ext, &[0.9], &QuadratureSpec::default()).unwrap();
        assert!((r9.value - r.value).norm() < 1e-6);
    }

    #[test]
    fn off_center_bump_matches_direct() {
        // the singularity now sits on the ramp of φ
        let f = inv_z();
        let phi = bump(0.6);
        let ext = AlmostAnalyticExtension::with_standard_cutoff(phi.clone(), params()).unwrap();
        let r = stokes_pairing(&f, &ext, &[0.5], &QuadratureSpec::default()).unwrap();
        let d = direct_pairing(&f, phi.as_ref(), &[0.5], &DirectPairingSpec::default()).unwrap();
        assert!(d.converged, "{d:?}");
        assert!((d.value.unwrap() - r.value).norm() < 1e-6, "{} vs {:?}", r.value, d.value);
    }

    #[test]
    fn linear_in_phi_and_f() {
        let (a, b) = (0.7, -1.3);
        let p1 = bump(0.0);
        let p2 = bump(0.4);
        let combo: Arc<dyn TestFunction> =
            Arc::new(LinearCombination::new(vec![(a, p1.clone()), (b, p2.clone())]).unwrap());
        let breaks = vec![[p1.breakpoints()[0].clone(), p2.breakpoints()[0].clone()].concat()];
        let quad = QuadratureSpec {
            extra_x_breaks: breaks,
            ..QuadratureSpec::default()
        };
        let f = inv_z();
        let run = |phi: Arc<dyn TestFunction>, f: &TubeFunction| {
            let ext = AlmostAnalyticExtension::with_standard_cutoff(phi, params()).unwrap();
            stokes_pairing(f, &ext, &[0.5], &quad).unwrap().value
        };
        let lhs = run(combo, &f);
        let rhs = a * run(p1.clone(), &f) + b * run(p2, &f);
        assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm(), "{lhs} vs {rhs}");

        let g = Fixture::InvZ2.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap();
        let fg = TubeFunction::new(
            "combo",
            |z| 2.0 * z[0].inv() - 0.5 * (z[0] * z[0]).inv(),
            vec![(-3.0, 3.0)],
            ConeSpec::positive(),
            1.0,
        )
        .unwrap()
        .with_singular_points(vec![vec![0.0]]);
        let lhs = run(p1.clone(), &fg);
        let rhs = 2.0 * run(p1.clone(), &f) - 0.5 * run(p1, &g);
        assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn support_outside_domain_rejected() {
        let f = Fixture::InvZ.tube(vec![(-1.0, 1.0)], ConeSpec::positive(), 1.0).unwrap();
        let ext = AlmostAnalyticExtension::with_standard_cutoff(bump(0.0), params()).unwrap();
        assert!(matches!(
            stokes_pairing(&f, &ext, &[0.5], &QuadratureSpec::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exp_inv_z_direct_does_not_converge() {
        let f = Fixture::ExpInvZ.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap();
        let d = direct_pairing(&f, bump(0.0).as_ref(), &[0.5], &DirectPairingSpec::default()).unwrap();
        assert!(!d.converged);
        assert!(d.value.is_none());
    }
}
