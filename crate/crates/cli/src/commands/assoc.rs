use std::fmt::Write as _;
use std::path::Path;

use gevrey_core::associated::{
    bounds, shape_check, t_eval, t_star_eval, verify_appendix, AppendixSpec, BoundConstants,
};
use gevrey_core::grid::log_grid;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_atomic, Columns};
use crate::Outcome;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let params = cfg.gevrey_params()?;
    let a = &cfg.assoc;
    if !(a.k_min > 0.0 && a.k_max > a.k_min && a.k_max.is_finite()) {
        return Err(CliError::Config {
            field: "assoc.k_max".into(),
            message: format!("need 0 < k_min < k_max < inf, got [{}, {}]", a.k_min, a.k_max),
        });
    }
    if a.points < 3 {
        return Err(CliError::Config {
            field: "assoc.points".into(),
            message: "at least 3 points".into(),
        });
    }
    let constants = BoundConstants::new(&params);
    let grid = log_grid(a.k_min, a.k_max, a.points);
    let mut cols = Columns::new(
        &format!(
            "associated functions, tau = {} sigma = {} h = {}\nlog bounds are nan below k_min = {}",
            params.tau(),
            params.sigma(),
            params.h(),
            num(constants.k_min)
        ),
        &["k", "T", "T_star", "log_lower", "log_upper", "argmax_p"],
    );
    for &k in &grid {
        let t = t_eval(&params, k).map_err(|e| CliError::core(format!("T at k = {k}"), e))?;
        let ts = t_star_eval(&params, k).map_err(|e| CliError::core(format!("T* at k = {k}"), e))?;
        let (lo, up) = if k >= constants.k_min {
            let b = bounds(&params, k).map_err(|e| CliError::core("bounds", e))?;
            (b.log_lower, b.log_upper)
        } else {
            (f64::NAN, f64::NAN)
        };
        cols.row(&[num(k), num(t.value), num(ts.value), num(lo), num(up), t.argmax_p.to_string()]);
    }

    let shape = shape_check(&params, &grid, cfg.tolerances.identity).map_err(|e| CliError::core("shape check", e))?;
    let mut s = String::new();
    let _ = writeln!(s, "# associated function summary");
    let _ = writeln!(s, "tau = {}", params.tau());
    let _ = writeln!(s, "sigma = {}", params.sigma());
    let _ = writeln!(s, "h = {}", params.h());
    let _ = writeln!(s, "c1 = {}", num(constants.c1));
    let _ = writeln!(s, "c2 = {}", num(constants.c2));
    let _ = writeln!(s, "k_min = {}", num(constants.k_min));
    let _ = writeln!(s, "grid = [{}, {}] x {}", num(a.k_min), num(a.k_max), a.points);
    let _ = writeln!(s, "shape.min_first_difference = {}", num(shape.min_first_difference));
    let _ = writeln!(s, "shape.min_second_difference = {}", num(shape.min_second_difference));
    let _ = writeln!(s, "shape.argmax_monotone = {}", shape.argmax_monotone);
    let _ = writeln!(s, "shape.pass = {}", shape.pass);
    let mut pass = shape.pass;
    if a.appendix {
        let report = verify_appendix(&[params], &AppendixSpec::default()).map_err(|e| CliError::core("appendix", e))?;
        pass &= report.pass();
        s.push('\n');
        s.push_str(&report.to_text());
    }
    let artifacts = vec![
        write_atomic(out, "assoc.dat", &cols.finish())?,
        write_atomic(out, "assoc_summary.txt", &s)?,
    ];
    Ok(Outcome {
        pass,
        summary: s,
        artifacts,
    })
}
