use std::fmt::Write as _;
use std::path::Path;

use gevrey_core::grid::linspace;
use gevrey_core::testfun::{gevrey_norm, BumpFunction, TestFunction};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_atomic, Columns};
use crate::Outcome;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let params = cfg.gevrey_params()?;
    let b = &cfg.bump;
    let phi = BumpFunction::new(b.shape.center.clone(), b.shape.r_plateau, b.shape.r_support)
        .map_err(|e| CliError::field("bump.shape", e))?;
    if b.points < 2 {
        return Err(CliError::Config {
            field: "bump.points".into(),
            message: "at least 2 points".into(),
        });
    }
    let support = phi.support();
    let data = if phi.dim() == 1 {
        let names: Vec<String> = std::iter::once("x".to_string())
            .chain((0..=b.orders).map(|n| format!("d{n}")))
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut cols = Columns::new("bump function and derivatives", &refs);
        for x in linspace(support[0].0, support[0].1, b.points) {
            let ders = phi
                .derivatives(&[x], b.orders)
                .map_err(|e| CliError::field("bump.orders", e))?;
            let mut row = vec![num(x)];
            row.extend(ders.iter().map(|v| num(*v)));
            cols.row(&row);
        }
        cols.finish()
    } else {
        let mut cols = Columns::new("bump function and gradient", &["x", "y", "phi", "d_x", "d_y"]);
        for x in linspace(support[0].0, support[0].1, b.points) {
            for y in linspace(support[1].0, support[1].1, b.points) {
                let g = phi.gradient(&[x, y]);
                cols.row(&[num(x), num(y), num(phi.eval(&[x, y])), num(g[0]), num(g[1])]);
            }
        }
        cols.finish()
    };
    let norm = gevrey_norm(&phi, &support, &params, b.norm_alpha_max, b.norm_density)
        .map_err(|e| CliError::core("norm", e))?;
    let mut s = String::new();
    let _ = writeln!(s, "# bump norm report");
    let _ = writeln!(s, "center = {:?}", phi.center());
    let _ = writeln!(s, "r_plateau = {}", phi.r_plateau());
    let _ = writeln!(s, "r_support = {}", phi.r_support());
    let _ = writeln!(s, "tau = {} sigma = {} h = {}", params.tau(), params.sigma(), params.h());
    let _ = writeln!(s, "norm = {}", num(norm.value));
    let _ = writeln!(s, "alpha_max_used = {}", norm.alpha_max_used);
    let _ = writeln!(s, "stabilized = {}", norm.stabilized);
    let _ = writeln!(s, "argmax_order = {}", norm.argmax_order);
    let _ = writeln!(s, "grid_density = {}", norm.grid_density);
    let _ = writeln!(s, "# order ratio");
    for (n, r) in norm.per_order_ratios.iter().enumerate() {
        let _ = writeln!(s, "{n} {}", num(*r));
    }
    let artifacts = vec![
        write_atomic(out, "bump.dat", &data)?,
        write_atomic(out, "bump_norm.txt", &s)?,
    ];
    Ok(Outcome {
        pass: true,
        summary: s,
        artifacts,
    })
}
