use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::associated::t_eval;
use crate::error::{Error, Result};
use crate::grid::{linspace, log_grid};
use crate::multiindex::{self, multi_indices};
use crate::sequences::{log_m_small, GevreyParams};
use crate::testfun::{BumpFunction, TestFunction};

/// `Φ(x + iy) = Σ_α ∂^α φ(x) |α|^{-τ|α|} (iy)^α κ(4h m_{|α|} y)`.
///
/// The cutoff `κ` must be centered at the origin. For `y ≠ 0` only the
/// orders with `4h m_{|α|} |y| <= r_support` contribute.
#[derive(Clone)]
pub struct AlmostAnalyticExtension {
    phi: Arc<dyn TestFunction>,
    params: GevreyParams,
    kappa: BumpFunction,
    /// `ln(4h m_n)`
    ln_scale: Vec<f64>,
    /// `n^{-τ n}`
    coeff: Vec<f64>,
}

impl std::fmt::Debug for AlmostAnalyticExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlmostAnalyticExtension")
            .field("params", &self.params)
            .field("kappa", &self.kappa)
            .finish()
    }
}

/// Coefficients of `Φ` and `∂̄Φ` at one imaginary part `y`, shared by every
/// real part `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionWeights {
    pub y: Vec<f64>,
    /// Largest contributing total order; `None` when every term vanishes.
    pub n_max: Option<usize>,
    value: Vec<Complex64>,
    /// Per coordinate `j`, the coefficient of `∂^α φ` in `2 ∂̄_j Φ` coming
    /// from differentiating `y^α κ_α(y)`.
    shift: Vec<Vec<Complex64>>,
}

impl ExtensionWeights {
    /// Highest derivative order of `φ` needed for `∂̄Φ`.
    pub fn dbar_order(&self) -> Option<usize> {
        self.n_max.map(|n| n + 1)
    }

    /// `Φ` given the derivatives of `φ` at `x` (enumeration order, at least
    /// up to `n_max`).
    pub fn value(&self, ders: &[f64]) -> Complex64 {
        self.value.iter().zip(ders).map(|(w, d)| w * d).sum()
    }

    /// `∂̄_j Φ` given the derivatives of `φ` up to `n_max + 1`.
    pub fn dbar(&self, ders: &[f64], j: usize) -> Complex64 {
        let Some(n) = self.n_max else {
            return Complex64::new(0.0, 0.0);
        };
        let d = self.y.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, alpha) in multi_indices(d, n).iter().enumerate() {
            let mut up = alpha.clone();
            up[j] += 1;
            acc += self.value[i] * ders[multiindex::index(&up)] + self.shift[j][i] * ders[i];
        }
        0.5 * acc
    }
}

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn monomial(y: &[f64], alpha: &[usize]) -> f64 {
    y.iter().zip(alpha).map(|(v, &a)| v.powi(a as i32)).product()
}

impl AlmostAnalyticExtension {
    pub fn new(phi: Arc<dyn TestFunction>, params: GevreyParams, kappa: BumpFunction) -> Result<Self> {
        if kappa.dim() != phi.dim() {
            return Err(Error::Parameter(format!(
                "cutoff dimension {} differs from test function dimension {}",
                kappa.dim(),
                phi.dim()
            )));
        }
        if kappa.center().iter().any(|c| *c != 0.0) {
            return Err(Error::Parameter("the cutoff must be centered at the origin".into()));
        }
        let top = phi.max_order() + 1;
        let ln4h = (4.0 * params.h()).ln();
        let ln_scale = (0..=top as u64)
            .map(|n| ln4h + if n == 0 { 0.0 } else { log_m_small(n, &params) })
            .collect();
        let coeff = (0..=top)
            .map(|n| {
                if n == 0 {
                    1.0
                } else {
                    let nf = n as f64;
                    (-params.tau() * nf * nf.ln()).exp()
                }
            })
            .collect();
        Ok(Self {
            phi,
            params,
            kappa,
            ln_scale,
            coeff,
        })
    }

    /// Extension with the standard cutoff (plateau 1, support 2).
    pub fn with_standard_cutoff(phi: Arc<dyn TestFunction>, params: GevreyParams) -> Result<Self> {
        let d = phi.dim();
        Self::new(phi, params, BumpFunction::standard(vec![0.0; d])?)
    }

    pub fn phi(&self) -> &Arc<dyn TestFunction> {
        &self.phi
    }

    pub fn params(&self) -> &GevreyParams {
        &self.params
    }

    pub fn kappa(&self) -> &BumpFunction {
        &self.kappa
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// Largest order `n` with `4h m_n |y| <= r_support`. At `y = 0` this is
    /// 1, the last order whose `y`-derivative survives there.
    pub fn order_bound(&self, y: &[f64]) -> Result<Option<usize>> {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(Some(1));
        }
        let limit = self.kappa.r_support().ln() - norm.ln();
        let mut n_max = None;
        for (n, &ls) in self.ln_scale.iter().enumerate() {
            if ls <= limit {
                n_max = Some(n);
            } else {
                return Ok(n_max);
            }
        }
        Err(Error::Capability {
            requested: self.ln_scale.len(),
            max: self.phi.max_order(),
        })
    }

    /// Heights `t` at which some cutoff `κ(4h m_n t Y)` with `n <= n_max`
    /// crosses a kink of `κ`.
    pub fn t_breakpoints(&self, direction: &[f64], n_max: usize) -> Vec<f64> {
        let radii = self.kappa.breakpoints();
        let mut out = Vec::new();
        for ls in self.ln_scale.iter().take(n_max + 1) {
            let s = ls.exp();
            for (j, yj) in direction.iter().enumerate() {
                if *yj == 0.0 {
                    continue;
                }
                out.extend(radii[j].iter().filter(|r| **r > 0.0).map(|r| r / (s * yj.abs())));
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn weights(&self, y: &[f64]) -> Result<ExtensionWeights> {
        let d = self.dim();
        if y.len() != d {
            return Err(Error::Parameter(format!("imaginary part has {} components, expected {d}", y.len())));
        }
        let n_max = self.order_bound(y)?;
        if let Some(n) = n_max {
            if n + 1 > self.phi.max_order() {
                return Err(Error::Capability {
                    requested: n + 1,
                    max: self.phi.max_order(),
                });
            }
        }
        let alphas = n_max.map(|n| multi_indices(d, n)).unwrap_or_default();
        let mut value = Vec::with_capacity(alphas.len());
        let mut shift = vec![Vec::with_capacity(alphas.len()); d];
        let mut cache: Option<(usize, f64, Vec<f64>, f64)> = None;
        for alpha in &alphas {
            let n = multiindex::total(alpha);
            if cache.as_ref().map(|c| c.0) != Some(n) {
                let s = self.ln_scale[n].exp();
                let arg: Vec<f64> = y.iter().map(|v| s * v).collect();
                cache = Some((n, self.kappa.eval(&arg), self.kappa.gradient(&arg), s));
            }
            let (_, kv, grad, s) = cache.as_ref().expect("cached above");
            let cn = self.coeff[n];
            let ym = monomial(y, alpha);
            value.push(i_pow(n) * (cn * ym * kv));
            let ip1 = i_pow(n + 1);
            for j in 0..d {
                let mono_der = if alpha[j] == 0 {
                    0.0
                } else {
                    let mut lower = alpha.clone();
                    lower[j] -= 1;
                    alpha[j] as f64 * monomial(y, &lower)
                };
                shift[j].push(ip1 * (cn * (mono_der * kv + ym * s * grad[j])));
            }
        }
        Ok(ExtensionWeights {
            y: y.to_vec(),
            n_max,
            value,
            shift,
        })
    }

    fn split(&self, z: &[Complex64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if z.len() != self.dim() {
            return Err(Error::Parameter(format!("point has {} components, expected {}", z.len(), self.dim())));
        }
        Ok((z.iter().map(|v| v.re).collect(), z.iter().map(|v| v.im).collect()))
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        let (x, y) = self.split(z)?;
        if y.iter().all(|v| *v == 0.0) {
            return Ok(Complex64::new(self.phi.value(&x)?, 0.0));
        }
        let w = self.weights(&y)?;
        let Some(n) = w.n_max else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let ders = self.phi.derivatives(&x, n)?;
        Ok(w.value(&ders))
    }

    /// Wirtinger derivative `∂Φ/∂z̄_j = (∂_{x_j} + i ∂_{y_j}) Φ / 2`.
    pub fn dbar(&self, z: &[Complex64], j: usize) -> Result<Complex64> {
        let (x, y) = self.split(z)?;
        if j >= x.len() {
            return Err(Error::Parameter(format!("coordinate index {j} out of range")));
        }
        let w = self.weights(&y)?;
        let Some(n) = w.dbar_order() else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let ders = self.phi.derivatives(&x, n)?;
        Ok(w.dbar(&ders, j))
    }
}

/// Sampling of `Z_Y = {x + i t Y : x ∈ K, t ∈ [t_min, t_max]}` for envelope
/// fits.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpec {
    pub direction: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Points per axis over the support box of `φ`.
    pub x_points: usize,
}

impl EnvelopeSpec {
    pub fn new(direction: Vec<f64>) -> Self {
        Self {
            direction,
            t_min: 1e-3,
            t_max: 1.0,
            t_points: 61,
            x_points: 201,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.direction.len() != d {
            return Err(Error::Parameter("direction dimension mismatch".into()));
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_points >= 2 && self.x_points >= 2) {
            return Err(Error::Parameter("envelope grid needs 0 < t_min < t_max and at least 2 points".into()));
        }
        Ok(())
    }

    fn refined(&self) -> Self {
        Self {
            t_points: 2 * self.t_points - 1,
            x_points: 2 * self.x_points - 1,
            ..self.clone()
        }
    }

    fn samples(&self, support: &[(f64, f64)]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let ts = log_grid(self.t_min, self.t_max, self.t_points);
        let axes: Vec<Vec<f64>> = support.iter().map(|&(a, b)| linspace(a, b, self.x_points)).collect();
        let xs = match axes.len() {
            1 => axes[0].iter().map(|&x| vec![x]).collect(),
            _ => axes[0]
                .iter()
                .flat_map(|&a| axes[1].iter().map(move |&b| vec![a, b]))
                .collect(),
        };
        (ts, xs)
    }
}

/// Fitted `B_h` in `|∂̄Φ(x + itY)| <= B_h exp(-T_{(2^σ-1)τ,σ,h}(1/|tY|))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DbarDecayFit {
    pub ln_b: f64,
    /// Fit on the grid refined twice in `t` and in `x`.
    pub ln_b_refined: f64,
    /// `B_refined / B` (or its inverse, whichever is larger).
    pub change_factor: f64,
    /// Refined samples above the coarse fit.
    pub coarse_exceedances: usize,
    pub worst_x: Vec<f64>,
    pub worst_t: f64,
    pub samples: usize,
    pub pass: bool,
}

fn dbar_envelope(ext: &AlmostAnalyticExtension, spec: &EnvelopeSpec) -> Result<(f64, Vec<f64>, f64, Vec<f64>)> {
    let params = ext.params();
    let target = params.with_tau((2f64.powf(params.sigma()) - 1.0) * params.tau())?;
    let (ts, xs) = spec.samples(&ext.phi().support());
    let ynorm = spec.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d = ext.dim();
    // per t: log ratios at every x, in x order
    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| {
            let y: Vec<f64> = spec.direction.iter().map(|v| v * t).collect();
            let w = ext.weights(&y)?;
            let thr = t_eval(&target, 1.0 / (t * ynorm))?.value;
            let Some(n) = w.dbar_order() else {
                return Ok(vec![f64::NEG_INFINITY; xs.len()]);
            };
            xs.iter()
                .map(|x| {
                    let ders = ext.phi().derivatives(x, n)?;
                    let m = (0..d).map(|j| w.dbar(&ders, j).norm()).fold(0.0, f64::max);
                    Ok(if m > 0.0 { m.ln() + thr } else { f64::NEG_INFINITY })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, vec![0.0; d], 0.0);
    for (row, &t) in rows.iter().zip(&ts) {
        for (v, x) in row.iter().zip(&xs) {
            if *v > best.0 {
                best = (*v, x.clone(), t);
            }
        }
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok((best.0, best.1, best.2, flat))
}

pub fn dbar_decay_fit(ext: &AlmostAnalyticExtension, spec: &EnvelopeSpec) -> Result<DbarDecayFit> {
    spec.validate(ext.dim())?;
    let (ln_b, _, _, _) = dbar_envelope(ext, spec)?;
    let fine = spec.refined();
    let (ln_b_refined, worst_x, worst_t, values) = dbar_envelope(ext, &fine)?;
    let coarse_exceedances = values.iter().filter(|v| **v > ln_b).count();
    let change_factor = (ln_b_refined - ln_b).abs().exp();
    let finite = ln_b.is_finite() && ln_b_refined.is_finite();
    Ok(DbarDecayFit {
        ln_b,
        ln_b_refined,
        change_factor,
        coarse_exceedances,
        worst_x,
        worst_t,
        samples: values.len(),
        pass: finite && change_factor < 2.0,
    })
}

/// Fitted `A_h` in `|Φ(z)| <= A_h ‖φ‖` on `Z_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionBoundFit {
    pub ln_a: f64,
    pub ln_a_refined: f64,
    pub change_factor: f64,
    pub stable: bool,
}

fn max_ln_abs(ext: &AlmostAnalyticExtension, spec: &EnvelopeSpec) -> Result<f64> {
    let (ts, xs) = spec.samples(&ext.phi().support());
    let per_t: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let y: Vec<f64> = spec.direction.iter().map(|v| v * t).collect();
            let w = ext.weights(&y)?;
            let Some(n) = w.n_max else {
                return Ok(f64::NEG_INFINITY);
            };
            let mut m = f64::NEG_INFINITY;
            for x in &xs {
                let v = w.value(&ext.phi().derivatives(x, n)?).norm();
                if v > 0.0 {
                    m = m.max(v.ln());
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    Ok(per_t.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `norm` is the extended Gevrey norm of `φ` the bound is measured against.
pub fn extension_bound_fit(ext: &AlmostAnalyticExtension, spec: &EnvelopeSpec, norm: f64) -> Result<ExtensionBoundFit> {
    spec.validate(ext.dim())?;
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Parameter(format!("norm must be positive and finite, got {norm}")));
    }
    let ln_a = max_ln_abs(ext, spec)? - norm.ln();
    let ln_a_refined = max_ln_abs(ext, &spec.refined())? - norm.ln();
    let change_factor = (ln_a_refined - ln_a).abs().exp();
    Ok(ExtensionBoundFit {
        ln_a,
        ln_a_refined,
        change_factor,
        stable: ln_a.is_finite() && change_factor < 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::testfun::LinearCombination;

    fn params() -> GevreyParams {
        GevreyParams::new(1.0, 2.0, 1.0).unwrap()
    }

    fn bump_phi() -> Arc<dyn TestFunction> {
        Arc::new(BumpFunction::standard(vec![0.0]).unwrap())
    }

    // Logs every requested derivative order.
    struct Recording {
        inner: BumpFunction,
        log: Mutex<Vec<usize>>,
    }

    impl TestFunction for Recording {
        fn dim(&self) -> usize {
            self.inner.dim()
        }
        fn max_order(&self) -> usize {
            self.inner.max_order()
        }
        fn support(&self) -> Vec<(f64, f64)> {
            self.inner.support()
        }
        fn breakpoints(&self) -> Vec<Vec<f64>> {
            self.inner.breakpoints()
        }
        fn derivative(&self, order: &[usize], x: &[f64]) -> Result<f64> {
            self.log.lock().unwrap().push(multiindex::total(order));
            self.inner.derivative(order, x)
        }
        fn derivatives(&self, x: &[f64], n: usize) -> Result<Vec<f64>> {
            self.log.lock().unwrap().push(n);
            self.inner.derivatives(x, n)
        }
    }

    fn z(x: f64, y: f64) -> Vec<Complex64> {
        vec![Complex64::new(x, y)]
    }

    #[test]
    fn restriction_to_real_axis() {
        let ext = AlmostAnalyticExtension::with_standard_cutoff(bump_phi(), params()).unwrap();
        let b = BumpFunction::standard(vec![0.0]).unwrap();
        for x in linspace(-2.5, 2.5, 101) {
            assert_eq!(ext.evaluate(&z(x, 0.0)).unwrap(), Complex64::new(b.eval(&[x]), 0.0));
        }
    }

    #[test]
    fn order_bounds_follow_support_rule() {
        let ext = AlmostAnalyticExtension::with_standard_cutoff(bump_phi(), params()).unwrap();
        // m_2 = 8: second order terms vanish beyond |y| = 1/16
        assert_eq!(ext.order_bound(&[0.07]).unwrap(), Some(1));
        assert_eq!(ext.order_bound(&[0.06]).unwrap(), Some(2));
        // m_3 = 243 <= 500 < m_4 = 16384
        assert_eq!(ext.order_bound(&[1e-3]).unwrap(), Some(3));
        // beyond 1/(2h) even the zeroth term is cut off
        assert_eq!(ext.order_bound(&[0.6]).unwrap(), None);
        assert_eq!(ext.evaluate(&z(0.0, 0.6)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn support_rule_instrumented() {
        let rec = Arc::new(Recording {
            inner: BumpFunction::standard(vec![0.0]).unwrap(),
            log: Mutex::new(Vec::new()),
        });
        let ext = AlmostAnalyticExtension::with_standard_cutoff(rec.clone(), params()).unwrap();
        let ms = |n: u64| if n == 0 { 1.0 } else { log_m_small(n, &params()).exp() };
        for &y in &[0.3, 0.1, 0.05, 1e-2, 1e-3, 1e-4, 1e-6] {
            rec.log.lock().unwrap().clear();
            ext.evaluate(&z(1.3, y)).unwrap();
            let touched = rec.log.lock().unwrap().clone();
            for &n in &touched {
                assert!(ms(n as u64) <= 1.0 / (2.0 * y), "order {n} touched at y = {y}");
            }
            rec.log.lock().unwrap().clear();
            ext.dbar(&z(1.3, y), 0).unwrap();
            let touched = rec.log.lock().unwrap().clone();
            for &n in &touched {
                // one extra x-derivative for the shifted sum
                assert!(ms(n as u64 - 1) <= 1.0 / (2.0 * y), "order {n} touched at y = {y}");
            }
        }
    }

    #[test]
    fn zero_function_has_zero_dbar() {
        let b: Arc<dyn TestFunction> = bump_phi();
        let zero = Arc::new(LinearCombination::new(vec![(0.0, b)]).unwrap());
        let ext = AlmostAnalyticExtension::with_standard_cutoff(zero, params()).unwrap();
        for &(x, y) in &[(0.0, 0.1), (1.4, 0.01), (-1.7, 0.3)] {
            assert_eq!(ext.dbar(&z(x, y), 0).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    // Central differences of the extension evaluator.
    fn stencil(ext: &AlmostAnalyticExtension, zc: &[Complex64], j: usize, h: f64) -> Complex64 {
        let shift = |dx: f64, dy: f64| -> Complex64 {
            let mut p = zc.to_vec();
            p[j] += Complex64::new(dx, dy);
            ext.evaluate(&p).unwrap()
        };
        // five-point central stencil
        let dx = (8.0 * (shift(h, 0.0) - shift(-h, 0.0)) - (shift(2.0 * h, 0.0) - shift(-2.0 * h, 0.0))) / (12.0 * h);
        let dy = (8.0 * (shift(0.0, h) - shift(0.0, -h)) - (shift(0.0, 2.0 * h) - shift(0.0, -2.0 * h))) / (12.0 * h);
        0.5 * (dx + Complex64::new(0.0, 1.0) * dy)
    }

    // The cutoffs of the top orders vary on the scale 1/(4h m_n), so one
    // Richardson step on top of the five-point stencil.
    fn fd_wirtinger(ext: &AlmostAnalyticExtension, zc: &[Complex64], j: usize, h: f64) -> Complex64 {
        (16.0 * stencil(ext, zc, j, 0.5 * h) - stencil(ext, zc, j, h)) / 15.0
    }

    #[test]
    fn wirtinger_matches_finite_differences() {
        let ext = AlmostAnalyticExtension::with_standard_cutoff(bump_phi(), params()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let y: f64 = 10f64.powf(rng.gen_range(-3.0..-0.35));
            let p = z(x, y);
            let a = ext.dbar(&p, 0).unwrap();
            let b = fd_wirtinger(&ext, &p, 0, 1e-4);
            // skip points within one step of a cutoff kink in y or a ramp edge in x
            let near_kink = (0..=4u64).any(|n| {
                let s = 4.0 * if n == 0 { 1.0 } else { log_m_small(n, &params()).exp() };
                [1.0, 2.0].iter().any(|r| (s * y - r).abs() < 4e-4 * s)
            }) || [1.0, 2.0].iter().any(|r| (x.abs() - r).abs() < 4e-4);
            if near_kink {
                continue;
            }
            checked += 1;
            assert!(
                (a - b).norm() <= 1e-6 * a.norm().max(b.norm()) || (a - b).norm() <= 1e-9,
                "x={x} y={y}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn dbar_envelope_is_finite_and_stable() {
        let ext = AlmostAnalyticExtension::with_standard_cutoff(bump_phi(), params()).unwrap();
        let fit = dbar_decay_fit(&ext, &EnvelopeSpec::new(vec![1.0])).unwrap();
        assert!(fit.pass, "{fit:?}");
        assert_eq!(fit.coarse_exceedances, 0, "{fit:?}");
    }

    #[test]
    fn extension_bound_is_stable() {
        let phi = bump_phi();
        let norm = crate::testfun::gevrey_norm(phi.as_ref(), &[(-2.0, 2.0)], &params(), 40, 201).unwrap().value;
        let ext = AlmostAnalyticExtension::with_standard_cutoff(phi, params()).unwrap();
        let fit = extension_bound_fit(&ext, &EnvelopeSpec::new(vec![1.0]), norm).unwrap();
        assert!(fit.stable, "{fit:?}");
    }
}
