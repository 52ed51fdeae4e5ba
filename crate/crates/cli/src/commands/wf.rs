use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use gevrey_core::wavefront::{
    boundary_wf_pipeline, decay_curve, decay_threshold, wf_analyze, ConeSpec, ProxySampling, SampledDistribution,
    ThresholdVariant, WfReport, WfSearch,
};
use gevrey_core::GevreyParams;

use super::{growth_spec, growth_text, tube};
use crate::config::{RunConfig, SignalConfig, VariantConfig, WfConfig};
use crate::error::CliError;
use crate::output::{num, write_atomic, Columns};
use crate::{samples, Outcome};

pub fn search(c: &WfConfig) -> WfSearch {
    WfSearch {
        h_grid: c.h_grid.clone(),
        a_cap_factor: c.a_cap_factor,
        window_plateau: c.window_plateau,
        window_support: c.window_support,
        pad_factor: c.pad_factor,
        band: c.band,
        noise_floor: c.noise_floor,
        angular_bins: c.angular_bins,
        min_cone_bins: c.min_cone_bins,
    }
}

pub fn variant(v: VariantConfig) -> ThresholdVariant {
    match v {
        VariantConfig::T => ThresholdVariant::T,
        VariantConfig::LogPower => ThresholdVariant::LogPower,
    }
}

pub fn heaviside(jump: f64, sample_box: (f64, f64), n: usize) -> Result<SampledDistribution, gevrey_core::Error> {
    SampledDistribution::from_fn_1d(sample_box.0, sample_box.1, n, |x| {
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

pub fn gaussian(center: f64, s: f64, sample_box: (f64, f64), n: usize) -> Result<SampledDistribution, gevrey_core::Error> {
    SampledDistribution::from_fn_1d(sample_box.0, sample_box.1, n, |x| {
        Complex64::new((-(x - center).powi(2) / (2.0 * s * s)).exp(), 0.0)
    })
}

fn decay_curves(
    u: &SampledDistribution,
    report: &WfReport,
    search: &WfSearch,
    params: &GevreyParams,
    buckets: usize,
) -> Result<String, CliError> {
    let mut names = vec!["point".to_string(), "cone".to_string(), "xi".to_string(), "ln_abs_u".to_string()];
    names.extend(search.h_grid.iter().map(|h| format!("bound_h{h}")));
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut cols = Columns::new(
        "largest ln|(phi u)^| per log-spaced |xi| bucket, and the admissible bound ln cap(h) - T_h(|xi|)",
        &refs,
    );
    let mut points: Vec<&Vec<f64>> = Vec::new();
    let mut cones: Vec<ConeSpec> = Vec::new();
    for v in &report.verdicts {
        let pi = match points.iter().position(|p| **p == v.point) {
            Some(i) => i,
            None => {
                points.push(&v.point);
                points.len() - 1
            }
        };
        let ci = match cones.iter().position(|c| *c == v.cone) {
            Some(i) => i,
            None => {
                cones.push(v.cone);
                cones.len() - 1
            }
        };
        let curve = decay_curve(u, &v.point, &v.cone, search, report.band, buckets)
            .map_err(|e| CliError::core("decay curve", e))?;
        for (xi, lm) in curve {
            let mut row = vec![pi.to_string(), ci.to_string(), num(xi), num(lm)];
            for e in &v.profile {
                let p = params.with_h(e.h).map_err(|e| CliError::field("wf.h_grid", e))?;
                let b = decay_threshold(&p, e.ln_a_cap, xi, report.variant).map_err(|e| CliError::core("threshold", e))?;
                row.push(num(b));
            }
            cols.row(&row);
        }
    }
    Ok(cols.finish())
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let params = cfg.gevrey_params()?;
    let c = &cfg.wf;
    let search = search(c);
    let variant = variant(c.variant);
    let cones: Vec<ConeSpec> = c
        .cones
        .iter()
        .enumerate()
        .map(|(i, k)| k.cone(&format!("wf.cones[{i}]")))
        .collect::<Result<_, _>>()?;
    let mut s = String::new();
    let mut pass = true;
    let (u, report) = match &c.signal {
        SignalConfig::Heaviside { jump, sample_box, samples } => {
            let u = heaviside(*jump, *sample_box, *samples).map_err(|e| CliError::field("wf.signal", e))?;
            let r = wf_analyze(&u, &c.points, &cones, &params, &search, variant).map_err(|e| CliError::core("wf", e))?;
            let _ = writeln!(s, "signal = heaviside at {jump}");
            (u, r)
        }
        SignalConfig::Gaussian {
            center,
            s: width,
            sample_box,
            samples,
        } => {
            let u = gaussian(*center, *width, *sample_box, *samples).map_err(|e| CliError::field("wf.signal", e))?;
            let r = wf_analyze(&u, &c.points, &cones, &params, &search, variant).map_err(|e| CliError::core("wf", e))?;
            let _ = writeln!(s, "signal = gaussian center {center} s {width}");
            (u, r)
        }
        SignalConfig::File { path } => {
            let u = samples::read(Path::new(path))?;
            let r = wf_analyze(&u, &c.points, &cones, &params, &search, variant).map_err(|e| CliError::core("wf", e))?;
            let _ = writeln!(s, "signal = file {path}");
            (u, r)
        }
        SignalConfig::Boundary {
            tube: tc,
            t,
            direction,
            sample_box,
            samples,
            growth,
        } => {
            let f = tube(tc, "wf.signal.tube")?;
            let gspec = growth_spec(growth, direction, &f.domain);
            let sampling = ProxySampling {
                t: *t,
                direction: direction.clone(),
                sample_box: sample_box.clone(),
                samples: samples.clone(),
            };
            let p = boundary_wf_pipeline(&f, &params, (growth.h, &gspec), &sampling, &c.points, &cones, &search, variant)
                .map_err(|e| CliError::core("boundary pipeline", e))?;
            let _ = writeln!(s, "signal = boundary proxy of {} at t = {t}, Y = {direction:?}", f.name());
            s.push_str(&growth_text(&p.growth));
            let _ = writeln!(s, "dual_cone = {}", p.dual);
            let _ = writeln!(s, "contained = {}", p.contained);
            pass = p.contained;
            // resample for the decay curves
            let y: Vec<f64> = direction.iter().map(|v| v * t).collect();
            let u = if f.dim() == 1 {
                SampledDistribution::from_fn_1d(sample_box[0].0, sample_box[0].1, samples[0], |x| {
                    f.eval(&[Complex64::new(x, y[0])])
                })
            } else {
                SampledDistribution::from_fn_2d([sample_box[0], sample_box[1]], [samples[0], samples[1]], |a, b| {
                    f.eval(&[Complex64::new(a, y[0]), Complex64::new(b, y[1])])
                })
            }
            .map_err(|e| CliError::field("wf.signal", e))?;
            (u, p.report)
        }
    };
    s.push_str(&report.to_text());
    let _ = writeln!(s, "pass = {pass}");
    let curves = decay_curves(&u, &report, &search, &params, c.curve_buckets.max(1))?;
    let artifacts = vec![
        write_atomic(out, "wf_report.txt", &s)?,
        write_atomic(out, "wf_curves.dat", &curves)?,
    ];
    Ok(Outcome {
        pass,
        summary: s,
        artifacts,
    })
}
