//! Browser bindings for a few gevrey-core computations. Each export returns
//! flat numeric arrays or report text for the page in `www/`.

use std::sync::Arc;

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use gevrey_core::associated::{bounds, t_eval_ln, BoundConstants};
use gevrey_core::boundary::{stokes_pairing, AlmostAnalyticExtension, Fixture, QuadratureSpec};
use gevrey_core::cone::ConeSpec;
use gevrey_core::grid::linspace;
use gevrey_core::testfun::{BumpFunction, TestFunction};
use gevrey_core::wavefront::{decay_curve, wf_analyze, SampledDistribution, ThresholdVariant, WfSearch};
use gevrey_core::{GevreyParams, Result};

fn js(e: gevrey_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows of `[ln k, T(k), log_lower, log_upper]` for `ln k` in `[1, ln_k_max]`;
/// the bounds are NaN below their guard.
pub fn associated_rows(tau: f64, sigma: f64, h: f64, ln_k_max: f64, points: usize) -> Result<Vec<f64>> {
    let p = GevreyParams::new(tau, sigma, h)?;
    let k_min = BoundConstants::new(&p).k_min;
    let mut out = Vec::with_capacity(4 * points);
    for ln_k in linspace(1.0, ln_k_max.max(1.5), points.max(2)) {
        let t = t_eval_ln(&p, ln_k)?.value;
        let (lo, hi) = if ln_k >= k_min.ln() {
            let b = bounds(&p, ln_k.exp())?;
            (b.log_lower, b.log_upper)
        } else {
            (f64::NAN, f64::NAN)
        };
        out.extend([ln_k, t, lo, hi]);
    }
    Ok(out)
}

fn step(jump: f64, samples: usize) -> Result<SampledDistribution> {
    SampledDistribution::from_fn_1d(-4.0, 4.0, samples, |x| {
        let v = if x > jump {
            1.0
        } else if x == jump {
            0.5
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })
}

/// Wave front report of a unit step at `jump` probed at `point`, with the
/// decay curves of both half-lines as `[ξ, ln|û|]` pairs after the text.
pub fn step_analysis(tau: f64, sigma: f64, jump: f64, point: f64, samples: usize) -> Result<(String, Vec<f64>, Vec<f64>)> {
    let p = GevreyParams::without_h(tau, sigma)?;
    let u = step(jump, samples)?;
    let search = WfSearch::default();
    let cones = [ConeSpec::positive(), ConeSpec::negative()];
    let report = wf_analyze(&u, &[vec![point]], &cones, &p, &search, ThresholdVariant::T)?;
    let curve = |c: &ConeSpec| -> Result<Vec<f64>> {
        Ok(decay_curve(&u, &[point], c, &search, report.band, 48)?
            .into_iter()
            .flat_map(|(x, y)| [x, y])
            .collect())
    };
    Ok((report.to_text(), curve(&cones[0])?, curve(&cones[1])?))
}

/// `[re, im, error estimate]` of the pairing of `1/(x + i0)` with the
/// standard bump at `center`, from the tube direction `y`.
pub fn inverse_z_pairing(center: f64, y: f64) -> Result<Vec<f64>> {
    let p = GevreyParams::new(1.0, 2.0, 1.0)?;
    let f = Fixture::InvZ.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0)?;
    let phi: Arc<dyn TestFunction> = Arc::new(BumpFunction::standard(vec![center])?);
    let ext = AlmostAnalyticExtension::with_standard_cutoff(phi, p)?;
    let r = stokes_pairing(&f, &ext, &[y], &QuadratureSpec::default())?;
    Ok(vec![r.value.re, r.value.im, r.quadrature_error_estimate])
}

#[wasm_bindgen]
pub fn associated(tau: f64, sigma: f64, h: f64, ln_k_max: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    associated_rows(tau, sigma, h, ln_k_max, points).map_err(js)
}

#[wasm_bindgen]
pub struct StepResult {
    report: String,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

#[wasm_bindgen]
impl StepResult {
    #[wasm_bindgen(getter)]
    pub fn report(&self) -> String {
        self.report.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn plus(&self) -> Vec<f64> {
        self.plus.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn minus(&self) -> Vec<f64> {
        self.minus.clone()
    }
}

#[wasm_bindgen]
pub fn step_wavefront(tau: f64, sigma: f64, jump: f64, point: f64, samples: usize) -> std::result::Result<StepResult, JsError> {
    let (report, plus, minus) = step_analysis(tau, sigma, jump, point, samples).map_err(js)?;
    Ok(StepResult { report, plus, minus })
}

#[wasm_bindgen]
pub fn pairing(center: f64, y: f64) -> std::result::Result<Vec<f64>, JsError> {
    inverse_z_pairing(center, y).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn associated_rows_layout() {
        let r = associated_rows(1.0, 2.0, 1.0, 18.0, 50).unwrap();
        assert_eq!(r.len(), 200);
        let last = &r[196..];
        assert!(last[2] <= last[3]);
        assert!(r[2].is_nan());
    }

    #[test]
    fn step_flags_only_the_jump() {
        let (text, plus, _) = step_analysis(1.0, 2.0, 0.0, 0.0, 2048).unwrap();
        assert!(text.contains("SINGULAR"), "{text}");
        assert!(plus.len() > 10);
        let (text, _, _) = step_analysis(1.0, 2.0, 0.0, 0.5, 2048).unwrap();
        assert!(!text.contains("SINGULAR"), "{text}");
    }

    #[test]
    fn pairing_is_minus_i_pi() {
        let v = inverse_z_pairing(0.0, 0.5).unwrap();
        assert!(v[0].abs() < 1e-6 && (v[1] + std::f64::consts::PI).abs() < 1e-6);
    }
}
