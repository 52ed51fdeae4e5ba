pub mod assoc;
pub mod bump;
pub mod bv;
pub mod seqcheck;
pub mod wf;

use gevrey_core::boundary::{GrowthSpec, TubeFunction};

use crate::config::{GrowthConfig, TubeConfig};
use crate::error::CliError;

pub(crate) fn tube(t: &TubeConfig, field: &str) -> Result<TubeFunction, CliError> {
    let cone = t.cone.cone(&format!("{field}.cone"))?;
    t.fixture
        .fixture()
        .tube(t.domain.clone(), cone, t.height)
        .map_err(|e| CliError::field(field, e))
}

pub(crate) fn growth_spec(g: &GrowthConfig, direction: &[f64], domain: &[(f64, f64)]) -> GrowthSpec {
    let x_box = g.x_box.clone().unwrap_or_else(|| {
        domain
            .iter()
            .map(|&(a, b)| {
                let (m, r) = (0.5 * (a + b), (b - a) / 3.0);
                (m - r, m + r)
            })
            .collect()
    });
    GrowthSpec {
        direction: direction.to_vec(),
        x_box,
        x_points: g.x_points,
        t_max: g.t_max,
        levels: g.levels.clone(),
        points_per_decade: g.points_per_decade,
    }
}

pub(crate) fn growth_text(r: &gevrey_core::boundary::GrowthReport) -> String {
    use crate::output::num;
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "growth.H = {}", r.h);
    let _ = writeln!(s, "growth.ln_a = {}", num(r.ln_a));
    let _ = writeln!(s, "growth.pass = {}", r.pass);
    let _ = writeln!(s, "growth.log_form_pass = {}", r.log_form_pass);
    for l in &r.levels {
        let _ = writeln!(
            s,
            "growth.level t_min = {} ln_a = {} worst_x = {:?} worst_t = {} ln_a_log_form = {}",
            num(l.t_min),
            num(l.ln_a),
            l.worst_x,
            num(l.worst_t),
            l.ln_a_log_form.map_or("none".into(), num)
        );
    }
    if let Some(v) = &r.violator {
        let _ = writeln!(
            s,
            "growth.violator x = {:?} t = {} ln|F| = {} threshold = {}",
            v.x,
            num(v.t),
            num(v.ln_abs_f),
            num(v.threshold)
        );
    }
    s
}
