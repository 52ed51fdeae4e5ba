use std::fmt::Write as _;
use std::path::Path;

use gevrey_core::sequences::{check_conditions, log_m_big, log_m_small};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_atomic, Columns};
use crate::Outcome;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let params = cfg.gevrey_params()?;
    let c = &cfg.seqcheck;
    let report = check_conditions(&params, c.p_max).map_err(|e| CliError::field("seqcheck.p_max", e))?;
    let split = check_conditions(&params, c.split_p_max)
        .map_err(|e| CliError::field("seqcheck.split_p_max", e))?
        .split;
    let mut s = report.to_text();
    let _ = writeln!(s, "split_range.p_max = {}", c.split_p_max);
    let _ = writeln!(s, "split_range.ln_c = {}", num(split.ln_c));
    let _ = writeln!(s, "split_range.binding = {} {}", split.binding.0, split.binding.1);
    let _ = writeln!(s, "split_range.finite = {}", split.finite);
    let pass = report.log_convexity.holds && split.finite && report.summability.converged;
    let _ = writeln!(s, "pass = {pass}");

    let mut cols = Columns::new(
        "weight sequences and per-p requirements",
        &["p", "ln_M", "ln_m", "required_ln_c", "partial_sum"],
    );
    for p in 0..=c.p_max {
        let i = p as usize;
        let partial = if p == 0 { 0.0 } else { report.summability.partial_sums[i - 1] };
        cols.row(&[
            p.to_string(),
            num(log_m_big(p, &params)),
            num(log_m_small(p, &params)),
            num(report.shift.required_ln_c[i]),
            num(partial),
        ]);
    }
    let artifacts = vec![
        write_atomic(out, "seqcheck.txt", &s)?,
        write_atomic(out, "seqcheck.dat", &cols.finish())?,
    ];
    Ok(Outcome {
        pass,
        summary: s,
        artifacts,
    })
}
