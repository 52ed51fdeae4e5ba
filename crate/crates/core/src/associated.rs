//! Associated functions of the sequence `p^{τ p^σ}`.
//!
//! `T_{τ,σ,h}(k) = sup_p (p^σ ln h + p ln k − τ p^σ ln p)` and the classical
//! variant `T*_{τ,σ,h}(k) = sup_p (p^σ ln h + p ln k − p(τ p^{σ−1} − 1) ln p)`,
//! both with the `p = 0` term equal to 0. Values are natural logarithms.
//!
//! Both suprema are found by a forward scan over integer `p`. Each term is a
//! concave function of real `p` beyond an explicit threshold, so once the
//! sequence of terms turns down inside that region it keeps decreasing.

use crate::error::{Error, Result};
use crate::sequences::GevreyParams;

mod appendix;

pub use appendix::{
    sandwich_fit, verify_appendix, AppendixReport, AppendixSpec, PartA, PartB, PartC, SandwichFit,
};

/// Hard cap on the number of scanned terms.
pub const SCAN_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocEvaluation {
    pub value: f64,
    pub argmax_p: u64,
    pub scanned_up_to: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    T,
    TStar,
}

fn term(variant: Variant, p: u64, tau: f64, sigma: f64, ln_h: f64, ln_k: f64) -> f64 {
    if p == 0 {
        return 0.0;
    }
    let pf = p as f64;
    let ps = pf.powf(sigma);
    let lp = pf.ln();
    match variant {
        Variant::T => ps * ln_h + pf * ln_k - tau * ps * lp,
        Variant::TStar => ps * ln_h + pf * ln_k - pf * (tau * pf.powf(sigma - 1.0) - 1.0) * lp,
    }
}

/// Smallest real `p >= 1` from which the term is concave in `p`.
fn concavity_start(variant: Variant, tau: f64, sigma: f64, ln_h: f64) -> f64 {
    let s = sigma * (sigma - 1.0);
    let extra = match variant {
        Variant::T => 0.0,
        // the extra `p ln p` has second derivative 1/p <= 1
        Variant::TStar => 1.0,
    };
    let ln_p = (s * ln_h - tau * (2.0 * sigma - 1.0) + extra) / (s * tau);
    ln_p.exp().max(1.0)
}

fn scan(variant: Variant, tau: f64, sigma: f64, ln_h: f64, ln_k: f64) -> Result<AssocEvaluation> {
    let p_concave = concavity_start(variant, tau, sigma, ln_h);
    let coarse_stop = (ln_h.max(0.0) + ln_k.max(0.0) + 1.0) / tau;
    let mut best = 0.0;
    let mut argmax = 0;
    let mut prev = 0.0;
    let mut p = 1u64;
    loop {
        if p > SCAN_CAP {
            return Err(Error::ScanCap { cap: SCAN_CAP });
        }
        let f = term(variant, p, tau, sigma, ln_h, ln_k);
        if f > best {
            best = f;
            argmax = p;
        }
        if p >= 2 {
            let turned_down = f < prev && (p - 1) as f64 >= p_concave;
            let dominated = (p as f64).ln() > coarse_stop && f < best - 1.0;
            if turned_down || dominated {
                return Ok(AssocEvaluation {
                    value: best,
                    argmax_p: argmax,
                    scanned_up_to: p,
                });
            }
        }
        prev = f;
        p += 1;
    }
}

fn check_k(k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("k must be positive and finite, got {k}")));
    }
    Ok(k.ln())
}

/// `T_{τ,σ,h}(k)`.
pub fn t_eval(params: &GevreyParams, k: f64) -> Result<AssocEvaluation> {
    let ln_k = check_k(k)?;
    scan(Variant::T, params.tau(), params.sigma(), params.h().ln(), ln_k)
}

/// `T_{τ,σ,h}` evaluated directly at `ln k`, for arguments whose `k` would overflow.
pub fn t_eval_ln(params: &GevreyParams, ln_k: f64) -> Result<AssocEvaluation> {
    if !ln_k.is_finite() {
        return Err(Error::Domain(format!("ln k must be finite, got {ln_k}")));
    }
    scan(Variant::T, params.tau(), params.sigma(), params.h().ln(), ln_k)
}

/// `T*_{τ,σ,h}(k)`.
pub fn t_star_eval(params: &GevreyParams, k: f64) -> Result<AssocEvaluation> {
    let ln_k = check_k(k)?;
    scan(Variant::TStar, params.tau(), params.sigma(), params.h().ln(), ln_k)
}

/// Exponent constants of the two-sided asymptotic bound on `exp T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    /// Smallest admissible `k`; keeps `ln(c2 ln k) >= 1`.
    pub k_min: f64,
}

impl BoundConstants {
    pub fn new(params: &GevreyParams) -> Self {
        let (tau, sigma, h) = (params.tau(), params.sigma(), params.h());
        let ratio = (sigma - 1.0) / (tau * sigma);
        let c1 = ratio.powf(1.0 / (sigma - 1.0));
        let c2 = h.powf(-(sigma - 1.0) / tau) * ((sigma - 1.0) / sigma).exp() * ratio;
        let k_min = std::f64::consts::E.powi(2).max((std::f64::consts::E / c2).exp());
        Self { c1, c2, k_min }
    }
}

/// Lower and upper exponents (natural-log units) of the asymptotic bound,
/// without the multiplicative constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBounds {
    pub log_lower: f64,
    pub log_upper: f64,
    pub constants: BoundConstants,
}

pub fn bounds(params: &GevreyParams, k: f64) -> Result<LogBounds> {
    let constants = BoundConstants::new(params);
    if !(k.is_finite() && k >= constants.k_min) {
        return Err(Error::Domain(format!(
            "k = {k} is below the bound guard k_min = {}",
            constants.k_min
        )));
    }
    let sigma = params.sigma();
    let ln_k = k.ln();
    let core = ln_k * (ln_k / (constants.c2 * ln_k).ln()).powf(1.0 / (sigma - 1.0));
    let log_upper = constants.c1 * core;
    let log_lower = 0.5 * ((sigma - 1.0) / sigma) * log_upper;
    Ok(LogBounds {
        log_lower,
        log_upper,
        constants,
    })
}

/// Discrete shape of `k ↦ T(k)` on a grid: slopes in `ln k` must be
/// nonnegative and nondecreasing, and so must `argmax_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub points: usize,
    /// Smallest first difference of `T`.
    pub min_first_difference: f64,
    /// Smallest increase between consecutive slopes in `ln k`.
    pub min_second_difference: f64,
    pub argmax_monotone: bool,
    pub pass: bool,
}

/// Shape check with slack `tol` on the second differences.
pub fn shape_check(params: &GevreyParams, k_grid: &[f64], tol: f64) -> Result<ShapeReport> {
    if k_grid.len() < 3 || k_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter("shape check needs at least 3 increasing grid points".into()));
    }
    let evals: Vec<AssocEvaluation> = k_grid.iter().map(|&k| t_eval(params, k)).collect::<Result<_>>()?;
    let ln_k: Vec<f64> = k_grid.iter().map(|k| k.ln()).collect();
    let first: Vec<f64> = evals.windows(2).map(|w| w[1].value - w[0].value).collect();
    let slopes: Vec<f64> = first.iter().zip(ln_k.windows(2)).map(|(d, w)| d / (w[1] - w[0])).collect();
    let min_first_difference = first.iter().copied().fold(f64::INFINITY, f64::min);
    let min_second_difference = slopes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let argmax_monotone = evals.windows(2).all(|w| w[0].argmax_p <= w[1].argmax_p);
    Ok(ShapeReport {
        points: k_grid.len(),
        min_first_difference,
        min_second_difference,
        argmax_monotone,
        pass: min_first_difference >= 0.0 && min_second_difference >= -tol && argmax_monotone,
    })
}
