//! The weight sequences `M_p = p^{τ p^σ}` and `m_p = p^{τ((2p)^{σ-1} - 1)}`,
//! evaluated in the natural-log domain, and numerical checks of the
//! conditions they are expected to satisfy.
//!
//! `M_p` overflows an `f64` already around `p = 5` for moderate `τ`, so every
//! quantity here is a logarithm. Both sequences use the conventions
//! `0^0 := 1` and `m_0 := 1`, so `ln M_0 = ln m_0 = 0`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// The triple `(τ, σ, h)` that parameterizes sequences, associated
/// functions, norms and decay thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    tau: f64,
    sigma: f64,
    h: f64,
}

impl GevreyParams {
    pub fn new(tau: f64, sigma: f64, h: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Parameter(format!("tau must be > 0, got {tau}")));
        }
        if !(sigma.is_finite() && sigma > 1.0) {
            return Err(Error::Parameter(format!("sigma must be > 1, got {sigma}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Parameter(format!("h must be > 0, got {h}")));
        }
        Ok(Self { tau, sigma, h })
    }

    /// Parameters where only `(τ, σ)` matter; `h` is set to 1.
    pub fn without_h(tau: f64, sigma: f64) -> Result<Self> {
        Self::new(tau, sigma, 1.0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.tau, self.sigma, h)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(tau, self.sigma, self.h)
    }

    /// `2^{σ-1}`, the index inflation factor of the modified stability condition.
    pub fn doubling_factor(&self) -> f64 {
        2f64.powf(self.sigma - 1.0)
    }
}

/// Which of the two sequences a [`LogWeightSequence`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// `M_p = p^{τ p^σ}`
    M,
    /// `m_p = p^{τ((2p)^{σ-1} - 1)}`
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeightSequence {
    pub params: GevreyParams,
    pub kind: SequenceKind,
}

impl LogWeightSequence {
    pub fn new(params: GevreyParams, kind: SequenceKind) -> Self {
        Self { params, kind }
    }

    pub fn ln_at(&self, p: u64) -> f64 {
        match self.kind {
            SequenceKind::M => log_m_big(p, &self.params),
            SequenceKind::Small => log_m_small(p, &self.params),
        }
    }
}

/// `ln M_p = τ p^σ ln p`, with `ln M_0 = ln M_1 = 0`.
pub fn log_m_big(p: u64, params: &GevreyParams) -> f64 {
    log_m_big_raw(p, params.tau, params.sigma)
}

pub(crate) fn log_m_big_raw(p: u64, tau: f64, sigma: f64) -> f64 {
    if p <= 1 {
        return 0.0;
    }
    let pf = p as f64;
    tau * pf.powf(sigma) * pf.ln()
}

/// `ln m_p = τ((2p)^{σ-1} - 1) ln p`, with `ln m_0 = ln m_1 = 0`.
pub fn log_m_small(p: u64, params: &GevreyParams) -> f64 {
    if p <= 1 {
        return 0.0;
    }
    let pf = p as f64;
    params.tau * ((2.0 * pf).powf(params.sigma - 1.0) - 1.0) * pf.ln()
}

/// Outcome of the log-convexity check `M_p^2 <= M_{p-1} M_{p+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConvexity {
    pub holds: bool,
    /// `min_p (ln M_{p-1} + ln M_{p+1} - 2 ln M_p)` over the scanned range.
    pub min_slack: f64,
    pub first_violation: Option<u64>,
}

/// Minimal constant for `M_{p+1} <= C^{p^σ+1} M_p`, `p <= p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftConstant {
    /// `ln C` required by each `p = 0..=p_max`.
    pub required_ln_c: Vec<f64>,
    /// `max_p required_ln_c[p]`.
    pub ln_c: f64,
    pub binding_p: u64,
}

/// Minimal constant for `M_{p+q} <= C^{p^σ+q^σ+1} M'_p M'_q` with `M'`
/// the sequence at `2^{σ-1} τ`, `p, q <= p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitConstant {
    pub ln_c: f64,
    pub binding: (u64, u64),
    pub finite: bool,
}

/// Partial sums of `Σ M_{p-1}/M_p` with a geometric tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityDiagnostic {
    /// Partial sums `S_P = Σ_{p=1}^{P} M_{p-1}/M_p` for `P = 1..=p_max`.
    pub partial_sums: Vec<f64>,
    /// `max_{p>=2} M_{p-1}/M_p`.
    pub max_ratio_from_2: f64,
    /// Whether the ratio of successive terms is nonincreasing over the range.
    pub ratios_monotone: bool,
    /// `ln` of the geometric bound on `Σ_{p>p_max}`; `-inf` when the terms underflow.
    pub ln_tail_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub params: GevreyParams,
    pub p_max: u64,
    pub log_convexity: LogConvexity,
    pub shift: ShiftConstant,
    pub split: SplitConstant,
    pub summability: SummabilityDiagnostic,
}

pub fn check_conditions(params: &GevreyParams, p_max: u64) -> Result<ConditionReport> {
    if p_max < 3 {
        return Err(Error::Parameter(format!("p_max must be >= 3, got {p_max}")));
    }
    let (tau, sigma) = (params.tau, params.sigma);
    let ln_m: Vec<f64> = (0..=2 * p_max + 1).map(|p| log_m_big_raw(p, tau, sigma)).collect();

    let mut min_slack = f64::INFINITY;
    let mut first_violation = None;
    for p in 1..p_max {
        let i = p as usize;
        let slack = ln_m[i - 1] + ln_m[i + 1] - 2.0 * ln_m[i];
        min_slack = min_slack.min(slack);
        if slack < 0.0 && first_violation.is_none() {
            first_violation = Some(p);
        }
    }
    let log_convexity = LogConvexity {
        holds: first_violation.is_none(),
        min_slack,
        first_violation,
    };

    let required_ln_c: Vec<f64> = (0..=p_max)
        .map(|p| {
            let i = p as usize;
            (ln_m[i + 1] - ln_m[i]) / ((p as f64).powf(sigma) + 1.0)
        })
        .collect();
    let (binding_p, ln_c) = required_ln_c
        .iter()
        .copied()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |best, (p, v)| if v > best.1 { (p, v) } else { best });
    let shift = ShiftConstant {
        required_ln_c,
        ln_c,
        binding_p: binding_p as u64,
    };

    let inflated = tau * params.doubling_factor();
    let ln_m_inflated: Vec<f64> = (0..=p_max).map(|p| log_m_big_raw(p, inflated, sigma)).collect();
    let mut split_ln_c = f64::NEG_INFINITY;
    let mut split_binding = (0, 0);
    for p in 0..=p_max {
        for q in 0..=p_max {
            let lhs = ln_m[(p + q) as usize] - ln_m_inflated[p as usize] - ln_m_inflated[q as usize];
            let req = lhs / ((p as f64).powf(sigma) + (q as f64).powf(sigma) + 1.0);
            if req > split_ln_c {
                split_ln_c = req;
                split_binding = (p, q);
            }
        }
    }
    // The condition asks for some C > 1.
    let split_ln_c = split_ln_c.max(0.0);
    let split = SplitConstant {
        ln_c: split_ln_c,
        binding: split_binding,
        finite: split_ln_c.is_finite(),
    };

    let summability = summability(&ln_m[..=p_max as usize]);

    Ok(ConditionReport {
        params: *params,
        p_max,
        log_convexity,
        shift,
        split,
        summability,
    })
}

fn summability(ln_m: &[f64]) -> SummabilityDiagnostic {
    let p_max = ln_m.len() - 1;
    // ln of the p-th term M_{p-1}/M_p, p = 1..=p_max
    let ln_terms: Vec<f64> = (1..=p_max).map(|p| ln_m[p - 1] - ln_m[p]).collect();
    let mut partial_sums = Vec::with_capacity(p_max);
    let mut s = 0.0;
    for lt in &ln_terms {
        s += lt.exp();
        partial_sums.push(s);
    }
    let max_ratio_from_2 = ln_terms.iter().skip(1).fold(f64::NEG_INFINITY, |a, &b| a.max(b)).exp();

    // ln of successive-term ratios t_{p+1}/t_p
    let ln_ratios: Vec<f64> = ln_terms.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios_monotone = ln_ratios.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-12);
    let ln_rho = *ln_ratios.last().unwrap_or(&f64::NEG_INFINITY);
    let ln_last = *ln_terms.last().unwrap_or(&f64::NEG_INFINITY);
    let ln_tail_bound = if ln_rho < 0.0 {
        ln_last + ln_rho - (-ln_rho.exp()).ln_1p()
    } else {
        f64::INFINITY
    };
    SummabilityDiagnostic {
        partial_sums,
        max_ratio_from_2,
        ratios_monotone,
        ln_tail_bound,
        converged: ln_tail_bound == f64::NEG_INFINITY
            || (ratios_monotone && ln_rho < 0.0 && ln_tail_bound.is_finite()),
    }
}

impl ConditionReport {
    /// Key/value summary followed by a per-p table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# sequence condition report");
        let _ = writeln!(out, "tau = {}", self.params.tau);
        let _ = writeln!(out, "sigma = {}", self.params.sigma);
        let _ = writeln!(out, "p_max = {}", self.p_max);
        let _ = writeln!(out, "log_convexity.holds = {}", self.log_convexity.holds);
        let _ = writeln!(out, "log_convexity.min_slack = {:.12e}", self.log_convexity.min_slack);
        let _ = writeln!(
            out,
            "log_convexity.first_violation = {}",
            self.log_convexity.first_violation.map_or("none".to_string(), |p| p.to_string())
        );
        let _ = writeln!(out, "shift.ln_c = {:.12e}", self.shift.ln_c);
        let _ = writeln!(out, "shift.c = {:.12e}", self.shift.ln_c.exp());
        let _ = writeln!(out, "shift.binding_p = {}", self.shift.binding_p);
        let _ = writeln!(out, "split.ln_c = {:.12e}", self.split.ln_c);
        let _ = writeln!(out, "split.binding = {} {}", self.split.binding.0, self.split.binding.1);
        let _ = writeln!(out, "split.finite = {}", self.split.finite);
        let s = &self.summability;
        let _ = writeln!(out, "summability.partial_sum = {:.12e}", s.partial_sums.last().copied().unwrap_or(0.0));
        let _ = writeln!(out, "summability.max_ratio_from_2 = {:.12e}", s.max_ratio_from_2);
        let _ = writeln!(out, "summability.ratios_monotone = {}", s.ratios_monotone);
        let _ = writeln!(out, "summability.ln_tail_bound = {:.6e}", s.ln_tail_bound);
        let _ = writeln!(out, "summability.converged = {}", s.converged);
        let _ = writeln!(out);
        let _ = writeln!(out, "# p ln_M shift_required_ln_c partial_sum");
        for p in 0..=self.p_max {
            let i = p as usize;
            let partial = if i == 0 { 0.0 } else { s.partial_sums[i - 1] };
            let _ = writeln!(
                out,
                "{} {:.12e} {:.12e} {:.12e}",
                p,
                log_m_big(p, &self.params),
                self.shift.required_ln_c[i],
                partial
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(tau: f64, sigma: f64) -> GevreyParams {
        GevreyParams::without_h(tau, sigma).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(matches!(GevreyParams::new(0.0, 2.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(GevreyParams::new(1.0, 1.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(GevreyParams::new(1.0, 2.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(GevreyParams::new(f64::NAN, 2.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn big_m_values() {
        assert_eq!(log_m_big(1, &p(2.0, 2.0)), 0.0);
        assert_eq!(log_m_big(0, &p(3.0, 1.5)), 0.0);
        assert!((log_m_big(2, &p(1.0, 2.0)) - 4.0 * 2f64.ln()).abs() < 1e-15);
        assert!((log_m_big(2, &p(1.0, 2.0)) - 2.772589).abs() < 1e-6);
    }

    #[test]
    fn small_m_values() {
        let q = p(1.0, 2.0);
        assert_eq!(log_m_small(1, &q), 0.0);
        assert_eq!(log_m_small(0, &q), 0.0);
        assert!((log_m_small(2, &q) - 8f64.ln()).abs() < 1e-14);
        assert!((log_m_small(3, &q) - 243f64.ln()).abs() < 1e-13);
        assert!((log_m_small(3, &q) - 5.493061).abs() < 1e-6);
    }

    #[test]
    fn small_m_identity() {
        for &(tau, sigma) in &[(1.0, 2.0), (0.3, 1.5), (2.5, 3.2)] {
            let q = p(tau, sigma);
            for n in 1..200u64 {
                let lhs = log_m_small(n, &q) + tau * (n as f64).ln();
                let rhs = tau * (2.0 * n as f64).powf(sigma - 1.0) * (n as f64).ln();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "n={n}");
            }
        }
    }

    #[test]
    fn sequence_wrapper_dispatches() {
        let q = p(1.0, 2.0);
        assert_eq!(LogWeightSequence::new(q, SequenceKind::M).ln_at(3), log_m_big(3, &q));
        assert_eq!(LogWeightSequence::new(q, SequenceKind::Small).ln_at(3), log_m_small(3, &q));
    }

    #[test]
    fn conditions_reference_case() {
        let r = check_conditions(&p(1.0, 2.0), 100).unwrap();
        assert!(r.log_convexity.holds);
        // p = 1: M_2 = 16 <= C^2 M_1 forces C >= 4.
        assert!((r.shift.required_ln_c[1] - 4f64.ln()).abs() < 1e-12);
        assert!(r.shift.ln_c >= 4f64.ln());
        assert!(r.split.finite);
        assert!(r.summability.converged);
        assert!(r.summability.max_ratio_from_2 < 0.5);
    }

    #[test]
    fn conditions_reject_small_p_max() {
        assert!(matches!(check_conditions(&p(1.0, 2.0), 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn split_constant_monotone_in_p_max() {
        let q = p(1.0, 2.0);
        let mut prev = f64::INFINITY;
        for p_max in (3..40).rev() {
            let c = check_conditions(&q, p_max).unwrap().split.ln_c;
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn report_text_has_table() {
        let r = check_conditions(&p(1.0, 2.0), 5).unwrap();
        let text = r.to_text();
        assert!(text.contains("log_convexity.holds = true"));
        assert_eq!(text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count(), 6);
    }
}
