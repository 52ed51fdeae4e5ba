use num_complex::Complex64;
use rayon::prelude::*;

use super::TubeFunction;
use crate::associated::t_eval_ln;
use crate::error::{Error, Result};
use crate::grid::{linspace, log_grid};
use crate::sequences::GevreyParams;

/// Sample grid for [`growth_check`]: `x` on a box inside `U`, `y = tY` with
/// `t` on log grids from each level's lower end up to `t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSpec {
    pub direction: Vec<f64>,
    pub x_box: Vec<(f64, f64)>,
    /// Points per axis; odd so that symmetric boxes sample the center.
    pub x_points: usize,
    pub t_max: f64,
    /// Lower ends of the successive `t` grids, decreasing.
    pub levels: Vec<f64>,
    pub points_per_decade: usize,
}

impl GrowthSpec {
    pub fn new(direction: Vec<f64>, x_box: Vec<(f64, f64)>) -> Self {
        Self {
            direction,
            x_box,
            x_points: 101,
            t_max: 1.0,
            levels: vec![1e-1, 1e-2, 1e-3],
            points_per_decade: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthLevel {
    pub t_min: f64,
    /// Minimal `ln A` with `ln|F| <= ln A + T_{(2^σ-1)τ,σ,H}(1/|y|)` on the grid.
    pub ln_a: f64,
    pub worst_x: Vec<f64>,
    pub worst_t: f64,
    /// Minimal `ln A` for the log-power bound, over samples with `|y| < 1/e`;
    /// `None` if the level has no such sample.
    pub ln_a_log_form: Option<f64>,
}

/// The sample that forced the largest `A` on the finest level.
#[derive(Debug, Clone, PartialEq)]
pub struct Violator {
    pub x: Vec<f64>,
    pub t: f64,
    pub ln_abs_f: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub h: f64,
    pub levels: Vec<GrowthLevel>,
    /// `ln A` of the finest level.
    pub ln_a: f64,
    pub pass: bool,
    pub violator: Option<Violator>,
    pub log_form_pass: bool,
}

impl GrowthReport {
    pub fn a(&self) -> f64 {
        self.ln_a.exp()
    }
}

/// `H L (L / ln L)^{1/(σ-1)}` with `L = ln(1/|y|)`, the log of the log-power
/// growth allowance; `None` unless `L > 1`.
fn log_form_threshold(sigma: f64, h: f64, y_norm: f64) -> Option<f64> {
    let l = -y_norm.ln();
    if l <= 1.0 {
        return None;
    }
    Some(h * l * (l / l.ln()).powf(1.0 / (sigma - 1.0)))
}

struct Sample {
    excess: f64,
    log_excess: Option<f64>,
    x: Vec<f64>,
    t: f64,
    ln_abs_f: f64,
    threshold: f64,
}

/// Fits `A` in `|F(z)| <= A exp(T_{(2^σ-1)τ,σ,H}(1/|y|))` on successively
/// finer grids toward `y = 0`. Fails when the fitted `A` doubles at each of
/// the last two refinements.
pub fn growth_check(f: &TubeFunction, params: &GevreyParams, h: f64, spec: &GrowthSpec) -> Result<GrowthReport> {
    f.check_direction(&spec.direction)?;
    let target = params
        .with_h(h)?
        .with_tau((2f64.powf(params.sigma()) - 1.0) * params.tau())?;
    if spec.x_box.len() != f.dim() {
        return Err(Error::Parameter("x_box dimension mismatch".into()));
    }
    for ((a, b), (ua, ub)) in spec.x_box.iter().zip(&f.domain) {
        if !(a <= b && a > ua && b < ub) {
            return Err(Error::Domain(format!("sample box [{a}, {b}] is not inside ({ua}, {ub})")));
        }
    }
    if spec.levels.len() < 3 || spec.levels.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter("growth check needs at least three decreasing levels".into()));
    }
    if !(spec.levels[0] < spec.t_max && spec.levels.last().is_some_and(|t| *t > 0.0)) {
        return Err(Error::Parameter("levels must lie in (0, t_max)".into()));
    }
    if spec.x_points < 1 || spec.points_per_decade < 1 {
        return Err(Error::Parameter("growth grid needs at least one point".into()));
    }
    let ynorm = spec.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if spec.t_max * ynorm >= f.height {
        return Err(Error::Domain(format!(
            "t_max |Y| = {} reaches the tube height {}",
            spec.t_max * ynorm,
            f.height
        )));
    }
    let axes: Vec<Vec<f64>> = spec
        .x_box
        .iter()
        .map(|&(a, b)| if spec.x_points == 1 { vec![0.5 * (a + b)] } else { linspace(a, b, spec.x_points) })
        .collect();
    let xs: Vec<Vec<f64>> = match axes.len() {
        1 => axes[0].iter().map(|&x| vec![x]).collect(),
        _ => axes[0].iter().flat_map(|&a| axes[1].iter().map(move |&b| vec![a, b])).collect(),
    };

    let worst_at = |t: f64| -> Result<Sample> {
        let y: Vec<f64> = spec.direction.iter().map(|v| v * t).collect();
        let y_norm = t * ynorm;
        let threshold = t_eval_ln(&target, -y_norm.ln())?.value;
        let log_thr = log_form_threshold(params.sigma(), h, y_norm);
        let mut best: Option<Sample> = None;
        // in one dimension also sample at distances comparable to |y| from
        // each singular point, where the modulus peaks
        let mut near = Vec::new();
        if f.dim() == 1 {
            let (a, b) = spec.x_box[0];
            for s in &f.singular_points[0] {
                for c in [-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0] {
                    let x = s + c * y_norm;
                    if x >= a && x <= b {
                        near.push(vec![x]);
                    }
                }
            }
        }
        for x in xs.iter().chain(&near) {
            let z: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| Complex64::new(*a, *b)).collect();
            let ln_abs_f = f.ln_abs(&z);
            let excess = ln_abs_f - threshold;
            if best.as_ref().is_none_or(|b| excess > b.excess) {
                best = Some(Sample {
                    excess,
                    log_excess: log_thr.map(|l| ln_abs_f - l),
                    x: x.clone(),
                    t,
                    ln_abs_f,
                    threshold,
                });
            }
        }
        Ok(best.expect("grid is nonempty"))
    };

    let mut levels = Vec::with_capacity(spec.levels.len());
    let mut finest = None;
    for &t_min in &spec.levels {
        let decades = (spec.t_max / t_min).log10();
        let n = ((decades * spec.points_per_decade as f64).round() as usize).max(1) + 1;
        let ts = log_grid(t_min, spec.t_max, n);
        let samples: Vec<Sample> = ts.par_iter().map(|&t| worst_at(t)).collect::<Result<_>>()?;
        // the log-form threshold depends on t only, so row maxima suffice
        let ln_a_log_form = samples
            .iter()
            .filter_map(|s| s.log_excess)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        let worst = samples
            .into_iter()
            .max_by(|a, b| a.excess.total_cmp(&b.excess))
            .expect("nonempty t grid");
        levels.push(GrowthLevel {
            t_min,
            ln_a: worst.excess,
            worst_x: worst.x.clone(),
            worst_t: worst.t,
            ln_a_log_form,
        });
        finest = Some(worst);
    }
    let doubled = |a: f64, b: f64| b - a >= std::f64::consts::LN_2;
    let k = levels.len();
    let fails = doubled(levels[k - 3].ln_a, levels[k - 2].ln_a) && doubled(levels[k - 2].ln_a, levels[k - 1].ln_a);
    let log_fails = match (
        levels[k - 3].ln_a_log_form,
        levels[k - 2].ln_a_log_form,
        levels[k - 1].ln_a_log_form,
    ) {
        (Some(a), Some(b), Some(c)) => doubled(a, b) && doubled(b, c),
        _ => false,
    };
    let finest = finest.expect("at least three levels");
    Ok(GrowthReport {
        h,
        ln_a: levels[k - 1].ln_a,
        levels,
        pass: !fails,
        violator: fails.then_some(Violator {
            x: finest.x,
            t: finest.t,
            ln_abs_f: finest.ln_abs_f,
            threshold: finest.threshold,
        }),
        log_form_pass: !log_fails,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Fixture;
    use crate::cone::ConeSpec;

    fn params() -> GevreyParams {
        GevreyParams::new(1.0, 2.0, 1.0).unwrap()
    }

    fn spec() -> GrowthSpec {
        GrowthSpec::new(vec![0.5], vec![(-0.9, 0.9)])
    }

    fn tube(fx: Fixture) -> TubeFunction {
        fx.tube(vec![(-1.0, 1.0)], ConeSpec::positive(), 1.0).unwrap()
    }

    #[test]
    fn constant_needs_at_most_one() {
        let r = growth_check(&tube(Fixture::Const(1.0)), &params(), 1.0, &spec()).unwrap();
        assert!(r.pass);
        assert!(r.ln_a <= 0.0);
        // the largest |y| has the smallest threshold
        let target = params().with_tau(3.0).unwrap();
        let t_top = t_eval_ln(&target, -(0.5f64).ln()).unwrap().value;
        assert!((r.ln_a + t_top).abs() < 1e-12);
    }

    #[test]
    fn inverse_z_passes_with_one_over_h() {
        for h in [0.5, 1.0, 3.0] {
            let r = growth_check(&tube(Fixture::InvZ), &params(), h, &spec()).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.a() <= 1.0 / h + 1e-9, "A = {} at H = {h}", r.a());
            assert!(r.violator.is_none());
            assert!(r.log_form_pass);
        }
    }

    #[test]
    fn exp_inverse_z_fails() {
        let r = growth_check(&tube(Fixture::ExpInvZ), &params(), 1.0, &spec()).unwrap();
        assert!(!r.pass);
        let v = r.violator.unwrap();
        assert!(v.t <= 1e-2, "{v:?}");
        assert!(!r.log_form_pass);
    }

    #[test]
    fn log_form_threshold_values() {
        assert!(log_form_threshold(2.0, 1.0, 0.5).is_none());
        let l = 10.0f64;
        let v = log_form_threshold(2.0, 1.0, (-l).exp()).unwrap();
        assert!((v - l * l / l.ln()).abs() < 1e-9);
    }
}
