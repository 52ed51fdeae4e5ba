use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use gevrey_core::boundary::{
    direct_pairing, growth_check, stokes_pairing, AlmostAnalyticExtension, DirectPairingSpec, QuadratureSpec,
};
use gevrey_core::testfun::{BumpFunction, TestFunction};

use super::{growth_spec, growth_text, tube};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_atomic, Columns};
use crate::Outcome;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let params = cfg.gevrey_params()?;
    let c = &cfg.bv;
    let f = tube(&c.tube, "bv.tube")?;
    let phi: Arc<dyn TestFunction> = Arc::new(
        BumpFunction::new(c.bump.center.clone(), c.bump.r_plateau, c.bump.r_support)
            .map_err(|e| CliError::field("bv.bump", e))?,
    );
    let ext = AlmostAnalyticExtension::with_standard_cutoff(phi.clone(), params)
        .map_err(|e| CliError::field("bv.bump", e))?;
    let quad = QuadratureSpec {
        order: c.quadrature.order,
        t_min: c.quadrature.t_min,
        tolerance: c.quadrature.tolerance.unwrap_or(cfg.tolerances.pairing),
        x_subdivisions: c.quadrature.x_subdivisions,
        max_t_depth: c.quadrature.max_t_depth,
        max_refinements: c.quadrature.max_refinements,
        extra_x_breaks: Vec::new(),
    };
    let dspec = DirectPairingSpec {
        t_sequence: c.direct.t_sequence.clone(),
        tolerance: c.direct.tolerance.unwrap_or(cfg.tolerances.pairing),
        quad_tolerance: c.direct.quad_tolerance,
        order: c.direct.order,
        max_depth: c.direct.max_depth,
    };
    let stokes = stokes_pairing(&f, &ext, &c.direction, &quad).map_err(|e| CliError::core("Stokes pairing", e))?;
    let direct = direct_pairing(&f, phi.as_ref(), &c.direction, &dspec).map_err(|e| CliError::core("direct pairing", e))?;
    let growth = if c.growth.enabled {
        let spec = growth_spec(&c.growth, &c.direction, &f.domain);
        Some(growth_check(&f, &params, c.growth.h, &spec).map_err(|e| CliError::core("growth check", e))?)
    } else {
        None
    };

    let mut s = String::new();
    let _ = writeln!(s, "# boundary value report");
    let _ = writeln!(s, "fixture = {}", f.name());
    let _ = writeln!(s, "direction = {:?}", c.direction);
    let _ = writeln!(s, "tau = {} sigma = {} h = {}", params.tau(), params.sigma(), params.h());
    let _ = writeln!(s, "stokes.value = {} {}", num(stokes.value.re), num(stokes.value.im));
    let _ = writeln!(s, "stokes.error_estimate = {}", num(stokes.quadrature_error_estimate));
    let _ = writeln!(s, "stokes.surface = {} {}", num(stokes.surface.re), num(stokes.surface.im));
    let _ = writeln!(s, "stokes.volume = {} {}", num(stokes.volume.re), num(stokes.volume.im));
    let _ = writeln!(s, "stokes.remainder_bound = {}", num(stokes.remainder_bound));
    let _ = writeln!(s, "stokes.t_panels = {}", stokes.t_panels);
    let _ = writeln!(s, "stokes.x_nodes = {}", stokes.x_nodes);
    let _ = writeln!(s, "direct.converged = {}", direct.converged);
    match direct.value {
        Some(v) => {
            let _ = writeln!(s, "direct.value = {} {}", num(v.re), num(v.im));
        }
        None => {
            let _ = writeln!(s, "direct.value = none");
        }
    }
    let _ = writeln!(s, "direct.last_difference = {}", num(direct.last_difference));
    let mut pass = true;
    if let (true, Some(v)) = (direct.converged, direct.value) {
        let diff = (v - stokes.value).norm();
        let _ = writeln!(s, "methods.difference = {}", num(diff));
        pass &= diff <= cfg.tolerances.pairing;
    }
    if let Some(g) = &growth {
        s.push_str(&growth_text(g));
        pass &= g.pass;
    }
    let _ = writeln!(s, "pass = {pass}");

    let mut st = Columns::new(
        "Stokes volume integral per t panel",
        &["t_lo", "t_hi", "re", "im", "error_estimate"],
    );
    for p in &stokes.t_trace {
        st.row(&[num(p.t_lo), num(p.t_hi), num(p.value.re), num(p.value.im), num(p.error_estimate)]);
    }
    let mut dt = Columns::new(
        "direct pairing per height t and extrapolants to t = 0",
        &["t", "re", "im", "quad_error", "extrap_re", "extrap_im"],
    );
    for (i, t) in direct.t_sequence.iter().enumerate().take(direct.per_t.len()) {
        let v = direct.per_t[i];
        let x = direct.extrapolants.get(i).copied();
        dt.row(&[
            num(*t),
            num(v.re),
            num(v.im),
            num(direct.per_t_error[i]),
            num(x.map_or(f64::NAN, |x| x.re)),
            num(x.map_or(f64::NAN, |x| x.im)),
        ]);
    }
    let artifacts = vec![
        write_atomic(out, "bv_summary.txt", &s)?,
        write_atomic(out, "bv_stokes_trace.dat", &st.finish())?,
        write_atomic(out, "bv_direct_trace.dat", &dt.finish())?,
    ];
    Ok(Outcome {
        pass,
        summary: s,
        artifacts,
    })
}
