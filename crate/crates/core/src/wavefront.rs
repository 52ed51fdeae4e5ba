//! Wave front detection from sampled data: localized spectra compared with
//! the decay thresholds `exp(-T_{τ,σ,h}(|ξ|))` in cones of directions.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::associated::t_eval;
use crate::boundary::{growth_check, GrowthReport, GrowthSpec, TubeFunction};
pub use crate::cone::{dual_cone, ClosedCone, ConeSpec};
use crate::error::{Error, Result};
use crate::sequences::GevreyParams;
use crate::testfun::{BumpFunction, TestFunction};

/// `|ξ|` must exceed `e (1 + LOG_POWER_MARGIN)` for the log-power threshold.
pub const LOG_POWER_MARGIN: f64 = 0.01;

/// Samples on a uniform grid over a box, zero-padded to a power of two per
/// axis. Values are stored row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDistribution {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    /// Sample counts before padding.
    extent: Vec<usize>,
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl SampledDistribution {
    /// `values` in row-major order over `extent`; sample `j` sits at
    /// `origin + j * spacing`.
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, extent: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        let d = origin.len();
        if !(d == 1 || d == 2) || spacing.len() != d || extent.len() != d {
            return Err(Error::Parameter("sampled data must be one- or two-dimensional".into()));
        }
        if spacing.iter().any(|s| !(*s > 0.0 && s.is_finite())) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Parameter("grid spacing must be positive and finite".into()));
        }
        if extent.iter().any(|&n| n < 2) {
            return Err(Error::Parameter("each axis needs at least two samples".into()));
        }
        let count: usize = extent.iter().product();
        if values.len() != count {
            return Err(Error::Data {
                order: extent.clone(),
                x: origin.clone(),
                message: format!("expected {count} samples, got {}", values.len()),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Data {
                order: extent.clone(),
                x: origin.clone(),
                message: "samples must be finite".into(),
            });
        }
        let shape: Vec<usize> = extent.iter().map(|n| n.next_power_of_two()).collect();
        let mut padded = vec![Complex64::new(0.0, 0.0); shape.iter().product()];
        if d == 1 {
            padded[..count].copy_from_slice(&values);
        } else {
            for i in 0..extent[0] {
                padded[i * shape[1]..i * shape[1] + extent[1]]
                    .copy_from_slice(&values[i * extent[1]..(i + 1) * extent[1]]);
            }
        }
        Ok(Self {
            origin,
            spacing,
            extent,
            shape,
            values: padded,
        })
    }

    /// `n` samples of `f` at `a + j (b - a)/n`, `j < n`.
    pub fn from_fn_1d(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let dx = (b - a) / n as f64;
        let values = (0..n).map(|j| f(a + j as f64 * dx)).collect();
        Self::new(vec![a], vec![dx], vec![n], values)
    }

    /// Tensor grid version of [`Self::from_fn_1d`].
    pub fn from_fn_2d(bx: [(f64, f64); 2], n: [usize; 2], f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let dx = [(bx[0].1 - bx[0].0) / n[0] as f64, (bx[1].1 - bx[1].0) / n[1] as f64];
        let mut values = Vec::with_capacity(n[0] * n[1]);
        for i in 0..n[0] {
            for j in 0..n[1] {
                values.push(f(bx[0].0 + i as f64 * dx[0], bx[1].0 + j as f64 * dx[1]));
            }
        }
        Self::new(vec![bx[0].0, bx[1].0], dx.to_vec(), n.to_vec(), values)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    /// Padded sample counts.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The sampled box `[origin, origin + extent * spacing]` per axis.
    pub fn sampled_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim())
            .map(|a| (self.origin[a], self.origin[a] + self.extent[a] as f64 * self.spacing[a]))
            .collect()
    }

    pub fn nyquist(&self) -> f64 {
        self.spacing.iter().map(|s| PI / s).fold(f64::INFINITY, f64::min)
    }

    /// Default band `[16 * 2π / L, 0.8 * Nyquist]` with `L` the shortest box
    /// side.
    pub fn default_band(&self) -> (f64, f64) {
        let l = self.sampled_box().iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        (16.0 * 2.0 * PI / l, 0.8 * self.nyquist())
    }
}

/// Magnitudes of the windowed transform `|Σ φ(x_j) u(x_j) e^{-i x_j·ξ} Δx|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpectrum {
    pub shape: Vec<usize>,
    /// Frequency step per axis, `2π / (M Δx)`.
    pub dxi: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// `Σ |φ u| Δx`
    pub l1_norm: f64,
    /// `Σ |φ u|² Δx`
    pub l2_norm_sq: f64,
}

fn signed_index(k: usize, m: usize) -> f64 {
    if k < m / 2 {
        k as f64
    } else {
        k as f64 - m as f64
    }
}

impl LocalSpectrum {
    pub fn frequency(&self, index: usize) -> Vec<f64> {
        match self.shape.len() {
            1 => vec![signed_index(index, self.shape[0]) * self.dxi[0]],
            _ => {
                let (i, j) = (index / self.shape[1], index % self.shape[1]);
                vec![
                    signed_index(i, self.shape[0]) * self.dxi[0],
                    signed_index(j, self.shape[1]) * self.dxi[1],
                ]
            }
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ |û|² Δξ / (2π)^d`, equal to [`Self::l2_norm_sq`] by Parseval.
    pub fn parseval_sum(&self) -> f64 {
        let cell: f64 = self.dxi.iter().map(|d| d / (2.0 * PI)).product();
        self.magnitudes.iter().map(|m| m * m).sum::<f64>() * cell
    }
}

fn fft_in_place(planner: &mut FftPlanner<f64>, data: &mut [Complex64], len: usize) {
    let fft = planner.plan_fft_forward(len);
    fft.process(data);
}

/// Windowed transform of `u` with `bump` (any center), zero-padded by
/// `pad_factor`.
pub fn spectrum_localized(u: &SampledDistribution, bump: &BumpFunction, pad_factor: usize) -> Result<LocalSpectrum> {
    let d = u.dim();
    if bump.dim() != d {
        return Err(Error::Parameter(format!(
            "window is {}-dimensional, samples are {d}-dimensional",
            bump.dim()
        )));
    }
    if pad_factor < 1 {
        return Err(Error::Parameter("pad_factor must be at least 1".into()));
    }
    let bx = u.sampled_box();
    let r = bump.axis_support();
    for (axis, (c, (a, b))) in bump.center().iter().zip(&bx).enumerate() {
        if c - r < *a || c + r > *b {
            return Err(Error::Domain(format!(
                "window support [{}, {}] on axis {axis} exceeds the sampled box [{a}, {b}]",
                c - r,
                c + r
            )));
        }
    }
    let m: Vec<usize> = u.shape.iter().map(|n| n * pad_factor).collect();
    let cell: f64 = u.spacing.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); m.iter().product()];
    let (mut l1, mut l2) = (0.0, 0.0);
    // window index range per axis
    let ranges: Vec<(usize, usize)> = (0..d)
        .map(|a| {
            let lo = ((bump.center()[a] - r - u.origin[a]) / u.spacing[a]).floor().max(0.0) as usize;
            let hi = (((bump.center()[a] + r - u.origin[a]) / u.spacing[a]).ceil() as usize + 1).min(u.extent[a]);
            (lo, hi)
        })
        .collect();
    let mut planner = FftPlanner::new();
    if d == 1 {
        for j in ranges[0].0..ranges[0].1 {
            let x = u.origin[0] + j as f64 * u.spacing[0];
            let v = u.values[j] * (bump.eval(&[x]) * cell);
            l1 += v.norm();
            l2 += v.norm_sqr() / cell;
            data[j] = v;
        }
        fft_in_place(&mut planner, &mut data, m[0]);
    } else {
        let w1: Vec<f64> = (0..u.extent[1])
            .map(|j| u.origin[1] + j as f64 * u.spacing[1])
            .collect();
        for i in ranges[0].0..ranges[0].1 {
            let x0 = u.origin[0] + i as f64 * u.spacing[0];
            for j in ranges[1].0..ranges[1].1 {
                let v = u.values[i * u.shape[1] + j] * (bump.eval(&[x0, w1[j]]) * cell);
                l1 += v.norm();
                l2 += v.norm_sqr() / cell;
                data[i * m[1] + j] = v;
            }
        }
        let fft1 = planner.plan_fft_forward(m[1]);
        data.par_chunks_mut(m[1]).for_each(|row| fft1.process(row));
        let fft0 = planner.plan_fft_forward(m[0]);
        let mut cols = vec![Complex64::new(0.0, 0.0); data.len()];
        for i in 0..m[0] {
            for j in 0..m[1] {
                cols[j * m[0] + i] = data[i * m[1] + j];
            }
        }
        cols.par_chunks_mut(m[0]).for_each(|col| fft0.process(col));
        for j in 0..m[1] {
            for i in 0..m[0] {
                data[i * m[1] + j] = cols[j * m[0] + i];
            }
        }
    }
    Ok(LocalSpectrum {
        dxi: (0..d).map(|a| 2.0 * PI / (m[a] as f64 * u.spacing[a])).collect(),
        shape: m,
        magnitudes: data.iter().map(|v| v.norm()).collect(),
        l1_norm: l1,
        l2_norm_sq: l2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdVariant {
    /// `ln A − T_{τ,σ,h}(|ξ|)`
    T,
    /// `ln A − H (ln|ξ| / ln ln|ξ|)^{1/(σ−1)} ln|ξ|` with `H` taken from
    /// the `h` slot.
    LogPower,
}

impl ThresholdVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::T => "T_threshold",
            Self::LogPower => "logpower_threshold",
        }
    }
}

/// Exponent `E(|ξ|)` of the threshold `exp(-E(|ξ|))`.
fn decay_exponent(params: &GevreyParams, xi_abs: f64, variant: ThresholdVariant) -> Result<f64> {
    match variant {
        ThresholdVariant::T => Ok(t_eval(params, xi_abs)?.value),
        ThresholdVariant::LogPower => {
            if !(xi_abs > E * (1.0 + LOG_POWER_MARGIN)) {
                return Err(Error::Domain(format!(
                    "log-power threshold needs |ξ| > e(1 + {LOG_POWER_MARGIN}), got {xi_abs}"
                )));
            }
            let l = xi_abs.ln();
            Ok(params.h() * (l / l.ln()).powf(1.0 / (params.sigma() - 1.0)) * l)
        }
    }
}

/// Log-magnitude threshold at `|ξ|` for the bound `A exp(-E(|ξ|))`.
pub fn decay_threshold(params: &GevreyParams, ln_a: f64, xi_abs: f64, variant: ThresholdVariant) -> Result<f64> {
    Ok(ln_a - decay_exponent(params, xi_abs, variant)?)
}

/// Search configuration of [`wf_analyze`].
#[derive(Debug, Clone, PartialEq)]
pub struct WfSearch {
    /// `h` values (the `H` values for the log-power variant), increasing.
    pub h_grid: Vec<f64>,
    /// Largest admissible `A`, as a multiple of the window's own fitted
    /// constant scaled by `‖φu‖₁ / ‖φ‖₁`.
    pub a_cap_factor: f64,
    pub window_plateau: f64,
    pub window_support: f64,
    pub pad_factor: usize,
    /// Overrides the default band.
    pub band: Option<(f64, f64)>,
    /// Bins below this fraction of the largest magnitude carry no
    /// information and are skipped.
    pub noise_floor: f64,
    pub angular_bins: usize,
    pub min_cone_bins: usize,
}

impl Default for WfSearch {
    fn default() -> Self {
        Self {
            h_grid: vec![1.0, 2.0, 4.0],
            a_cap_factor: 4.0,
            window_plateau: 0.2,
            window_support: 0.45,
            pad_factor: 2,
            band: None,
            noise_floor: 1e-12,
            angular_bins: 64,
            min_cone_bins: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HProfileEntry {
    pub h: f64,
    /// Minimal `ln A` making the bound hold on every retained bin.
    pub ln_a: f64,
    pub ln_a_cap: f64,
    /// `ln_a_cap - ln_a`; negative means the bound fails.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WfVerdict {
    pub point: Vec<f64>,
    pub cone: ConeSpec,
    pub singular: bool,
    /// Largest passing `h`.
    pub fitted_h: Option<f64>,
    /// `ln A` at `fitted_h`, or at the smallest `h` when singular.
    pub fitted_ln_a: f64,
    pub band: (f64, f64),
    pub variant: ThresholdVariant,
    pub profile: Vec<HProfileEntry>,
    /// Bins in band and cone, and those above the noise floor.
    pub bins_in_cone: usize,
    pub bins_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WfReport {
    pub band: (f64, f64),
    pub variant: ThresholdVariant,
    pub params: GevreyParams,
    pub search: WfSearch,
    pub verdicts: Vec<WfVerdict>,
}

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

impl WfReport {
    pub fn singular(&self) -> impl Iterator<Item = &WfVerdict> {
        self.verdicts.iter().filter(|v| v.singular)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "variant: {}", self.variant.name());
        let _ = writeln!(
            s,
            "params: tau = {}, sigma = {}",
            self.params.tau(),
            self.params.sigma()
        );
        let _ = writeln!(s, "band: [{}, {}]", fmt_f(self.band.0), fmt_f(self.band.1));
        let _ = writeln!(
            s,
            "window: plateau {}, support {}, pad {}",
            self.search.window_plateau, self.search.window_support, self.search.pad_factor
        );
        let _ = writeln!(s, "a_cap_factor: {}", self.search.a_cap_factor);
        for v in &self.verdicts {
            let pt: Vec<String> = v.point.iter().map(|x| fmt_f(*x)).collect();
            let _ = writeln!(
                s,
                "point [{}] cone {}: {} (fitted_h {}, ln A {}, bins {}/{})",
                pt.join(", "),
                v.cone,
                if v.singular { "SINGULAR" } else { "regular" },
                v.fitted_h.map_or("none".into(), fmt_f),
                fmt_f(v.fitted_ln_a),
                v.bins_used,
                v.bins_in_cone
            );
            for e in &v.profile {
                let _ = writeln!(
                    s,
                    "  h {}: ln A {} cap {} margin {} {}",
                    fmt_f(e.h),
                    fmt_f(e.ln_a),
                    fmt_f(e.ln_a_cap),
                    fmt_f(e.margin),
                    if e.pass { "pass" } else { "FAIL" }
                );
            }
        }
        s
    }
}

/// Indices of the spectrum bins with `|ξ|` in the band and direction in the
/// cone.
fn cone_bins(spec: &LocalSpectrum, cone: &ConeSpec, band: (f64, f64), search: &WfSearch) -> Result<Vec<usize>> {
    let d = spec.shape.len();
    if cone.dim() != d {
        return Err(Error::Configuration(format!("cone {cone} does not match dimension {d}")));
    }
    let allowed: Option<Vec<bool>> = if d == 2 {
        let nb = search.angular_bins;
        let width = 2.0 * PI / nb as f64;
        let mask: Vec<bool> = (0..nb)
            .map(|b| {
                let th = -PI + (b as f64 + 0.5) * width;
                cone.contains(&[th.cos(), th.sin()])
            })
            .collect();
        let count = mask.iter().filter(|m| **m).count();
        if count < search.min_cone_bins {
            return Err(Error::Configuration(format!(
                "cone {cone} covers {count} of {nb} direction bins, at least {} needed",
                search.min_cone_bins
            )));
        }
        Some(mask)
    } else {
        None
    };
    let bins: Vec<usize> = (0..spec.magnitudes.len())
        .filter(|&i| {
            let xi = spec.frequency(i);
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r < band.0 || r > band.1 {
                return false;
            }
            match &allowed {
                None => cone.contains(&xi),
                Some(mask) => {
                    let nb = mask.len();
                    let th = xi[1].atan2(xi[0]);
                    let b = (((th + PI) / (2.0 * PI) * nb as f64).floor() as usize).min(nb - 1);
                    mask[b]
                }
            }
        })
        .collect();
    if bins.is_empty() {
        return Err(Error::Configuration(format!("no frequency bins in cone {cone} within the band")));
    }
    Ok(bins)
}

/// Minimal `ln A` per `h` over the retained bins, `-inf` if none.
fn fit_ln_a(
    spec: &LocalSpectrum,
    bins: &[usize],
    floor: f64,
    params: &[GevreyParams],
    variant: ThresholdVariant,
) -> Result<(Vec<f64>, usize)> {
    let kept: Vec<(f64, f64)> = bins
        .iter()
        .filter(|&&i| spec.magnitudes[i] > floor)
        .map(|&i| {
            let xi = spec.frequency(i);
            (xi.iter().map(|v| v * v).sum::<f64>().sqrt(), spec.magnitudes[i].ln())
        })
        .collect();
    let fits = params
        .iter()
        .map(|p| {
            let per_bin: Vec<f64> = kept
                .par_iter()
                .map(|&(r, lm)| Ok(lm + decay_exponent(p, r, variant)?))
                .collect::<Result<_>>()?;
            Ok(per_bin.into_iter().fold(f64::NEG_INFINITY, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok((fits, kept.len()))
}

fn resolve_band(u: &SampledDistribution, search: &WfSearch, variant: ThresholdVariant) -> Result<(f64, f64)> {
    let band = search.band.unwrap_or_else(|| u.default_band());
    if !(band.0 > 0.0 && band.0 < band.1 && band.1 <= u.nyquist()) {
        return Err(Error::Configuration(format!(
            "band [{}, {}] must satisfy 0 < min < max <= Nyquist = {}",
            band.0,
            band.1,
            u.nyquist()
        )));
    }
    if variant == ThresholdVariant::LogPower && band.0 <= E * (1.0 + LOG_POWER_MARGIN) {
        return Err(Error::Configuration(format!(
            "log-power threshold needs a band above e(1 + {LOG_POWER_MARGIN}), got {}",
            band.0
        )));
    }
    Ok(band)
}

fn validate_search(search: &WfSearch) -> Result<()> {
    if search.h_grid.is_empty() || search.h_grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::Configuration("h_grid must be nonempty and positive".into()));
    }
    if search.h_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Configuration("h_grid must be strictly increasing".into()));
    }
    if !(search.a_cap_factor > 0.0 && search.noise_floor >= 0.0 && search.noise_floor < 1.0) {
        return Err(Error::Configuration("a_cap_factor must be positive and noise_floor in [0, 1)".into()));
    }
    if search.angular_bins < 4 {
        return Err(Error::Configuration("at least 4 angular bins are needed".into()));
    }
    Ok(())
}

/// Decides for every `(point, cone)` whether the localized spectrum meets
/// `|(φu)^(ξ)| <= A exp(-T_h(|ξ|))` on the band for some `h` of the grid.
///
/// The admissible `A` is capped by the window itself: `φ` is smooth, so its
/// fitted constant `A_φ(h)` (scaled by `‖φu‖₁ / ‖φ‖₁` and `a_cap_factor`)
/// sets what a regular direction may need.
pub fn wf_analyze(
    u: &SampledDistribution,
    points: &[Vec<f64>],
    cones: &[ConeSpec],
    params: &GevreyParams,
    search: &WfSearch,
    variant: ThresholdVariant,
) -> Result<WfReport> {
    validate_search(search)?;
    let band = resolve_band(u, search, variant)?;
    let d = u.dim();
    let per_h: Vec<GevreyParams> = search
        .h_grid
        .iter()
        .map(|&h| params.with_h(h))
        .collect::<Result<_>>()?;
    let window = BumpFunction::new(vec![0.0; d], search.window_plateau, search.window_support)?;
    let ones = SampledDistribution {
        values: vec![Complex64::new(1.0, 0.0); u.values.len()],
        ..u.clone()
    };
    let mut verdicts = Vec::with_capacity(points.len() * cones.len());
    for point in points {
        if point.len() != d {
            return Err(Error::Parameter(format!("point {point:?} is not {d}-dimensional")));
        }
        let phi = window.translated(point.clone())?;
        let su = spectrum_localized(u, &phi, search.pad_factor)?;
        let sw = spectrum_localized(&ones, &phi, search.pad_factor)?;
        let floor_u = search.noise_floor * su.max_magnitude();
        let floor_w = search.noise_floor * sw.max_magnitude();
        for cone in cones {
            let bins = cone_bins(&su, cone, band, search)?;
            let (fit_u, used) = if su.l1_norm > 0.0 {
                fit_ln_a(&su, &bins, floor_u, &per_h, variant)?
            } else {
                (vec![f64::NEG_INFINITY; per_h.len()], 0)
            };
            let (fit_w, _) = fit_ln_a(&sw, &bins, floor_w, &per_h, variant)?;
            let scale = search.a_cap_factor.ln() + su.l1_norm.ln() - sw.l1_norm.ln();
            let profile: Vec<HProfileEntry> = search
                .h_grid
                .iter()
                .zip(fit_u.iter().zip(&fit_w))
                .map(|(&h, (&lu, &lw))| {
                    let pass = lu == f64::NEG_INFINITY || lu <= lw + scale;
                    let cap = lw + scale;
                    HProfileEntry {
                        h,
                        ln_a: lu,
                        ln_a_cap: cap,
                        margin: if lu == f64::NEG_INFINITY { f64::INFINITY } else { cap - lu },
                        pass,
                    }
                })
                .collect();
            let best = profile.iter().rev().find(|e| e.pass);
            verdicts.push(WfVerdict {
                point: point.clone(),
                cone: *cone,
                singular: best.is_none(),
                fitted_h: best.map(|e| e.h),
                fitted_ln_a: best.unwrap_or(&profile[0]).ln_a,
                band,
                variant,
                profile,
                bins_in_cone: bins.len(),
                bins_used: used,
            });
        }
    }
    Ok(WfReport {
        band,
        variant,
        params: *params,
        search: search.clone(),
        verdicts,
    })
}

/// Largest `ln|(φu)^(ξ)|` in each of `buckets` log-spaced `|ξ|` intervals of
/// the band, restricted to the cone; empty intervals are skipped.
pub fn decay_curve(
    u: &SampledDistribution,
    point: &[f64],
    cone: &ConeSpec,
    search: &WfSearch,
    band: (f64, f64),
    buckets: usize,
) -> Result<Vec<(f64, f64)>> {
    let phi = BumpFunction::new(point.to_vec(), search.window_plateau, search.window_support)?;
    let s = spectrum_localized(u, &phi, search.pad_factor)?;
    let bins = cone_bins(&s, cone, band, search)?;
    let (l0, l1) = (band.0.ln(), band.1.ln());
    let mut best = vec![(f64::NAN, f64::NEG_INFINITY); buckets];
    for i in bins {
        let xi = s.frequency(i);
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let b = (((r.ln() - l0) / (l1 - l0) * buckets as f64) as usize).min(buckets - 1);
        let lm = s.magnitudes[i].ln();
        if lm > best[b].1 {
            best[b] = (r, lm);
        }
    }
    Ok(best.into_iter().filter(|(r, _)| r.is_finite()).collect())
}

/// Sampling of the boundary-value proxy `u(x) = F(x + i t Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxySampling {
    pub t: f64,
    pub direction: Vec<f64>,
    pub sample_box: Vec<(f64, f64)>,
    pub samples: Vec<usize>,
}

impl ProxySampling {
    /// One-dimensional default: `[-1, 1]` with 32768 samples, fine enough to
    /// resolve `1/(x + i t Y)` at `t = 10⁻³`.
    pub fn new_1d(t: f64, direction: f64) -> Self {
        Self {
            t,
            direction: vec![direction],
            sample_box: vec![(-1.0, 1.0)],
            samples: vec![32768],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub growth: GrowthReport,
    pub t: f64,
    pub dual: ClosedCone,
    pub report: WfReport,
    /// Every singular direction lies in the dual cone.
    pub contained: bool,
}

/// Samples `F(x + i t Y)`, analyzes it, and checks that every singular
/// direction lies in the dual of the tube's cone.
#[allow(clippy::too_many_arguments)]
pub fn boundary_wf_pipeline(
    f: &TubeFunction,
    params: &GevreyParams,
    growth: (f64, &GrowthSpec),
    sampling: &ProxySampling,
    points: &[Vec<f64>],
    cones: &[ConeSpec],
    search: &WfSearch,
    variant: ThresholdVariant,
) -> Result<PipelineReport> {
    let g = growth_check(f, params, growth.0, growth.1)?;
    if !g.pass {
        let v = g.violator.as_ref().expect("failing check has a violator");
        return Err(Error::Domain(format!(
            "growth check failed: ln|F| = {} exceeds the allowance {} at x = {:?}, t = {}",
            v.ln_abs_f, v.threshold, v.x, v.t
        )));
    }
    let d = f.dim();
    if sampling.direction.len() != d || sampling.sample_box.len() != d || sampling.samples.len() != d {
        return Err(Error::Parameter("sampling dimension mismatch".into()));
    }
    if !(sampling.t > 0.0) {
        return Err(Error::Parameter("proxy height t must be positive".into()));
    }
    let y: Vec<f64> = sampling.direction.iter().map(|v| v * sampling.t).collect();
    f.check_direction(&y)?;
    for ((a, b), (ua, ub)) in sampling.sample_box.iter().zip(&f.domain) {
        if !(a >= ua && b <= ub) {
            return Err(Error::Domain(format!("sample box [{a}, {b}] leaves the domain ({ua}, {ub})")));
        }
    }
    let u = if d == 1 {
        let (a, b) = sampling.sample_box[0];
        SampledDistribution::from_fn_1d(a, b, sampling.samples[0], |x| {
            f.eval(&[Complex64::new(x, y[0])])
        })?
    } else {
        let bx = [sampling.sample_box[0], sampling.sample_box[1]];
        SampledDistribution::from_fn_2d(bx, [sampling.samples[0], sampling.samples[1]], |a, b| {
            f.eval(&[Complex64::new(a, y[0]), Complex64::new(b, y[1])])
        })?
    };
    let report = wf_analyze(&u, points, cones, params, search, variant)?;
    let dual = dual_cone(&f.cone);
    let contained = report.singular().all(|v| dual.contains_cone(&v.cone));
    Ok(PipelineReport {
        growth: g,
        t: sampling.t,
        dual,
        report,
        contained,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::boundary::Fixture;
    use crate::quadrature::{panel_edges, GlPair};

    fn params() -> GevreyParams {
        GevreyParams::new(1.0, 2.0, 1.0).unwrap()
    }

    fn heaviside(n: usize) -> SampledDistribution {
        SampledDistribution::from_fn_1d(-4.0, 4.0, n, |x| {
            Complex64::new(
                if x > 0.0 {
                    1.0
                } else if x == 0.0 {
                    0.5
                } else {
                    0.0
                },
                0.0,
            )
        })
        .unwrap()
    }

    fn gaussian(n: usize) -> SampledDistribution {
        SampledDistribution::from_fn_1d(-4.0, 4.0, n, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap()
    }

    fn both() -> Vec<ConeSpec> {
        vec![ConeSpec::positive(), ConeSpec::negative()]
    }

    #[test]
    fn threshold_examples() {
        let t = decay_threshold(&params(), 0.0, 4f64.exp(), ThresholdVariant::T).unwrap();
        assert!((t + (8.0 - 4.0 * 2f64.ln())).abs() < 1e-12);
        let l = decay_threshold(&params(), 0.0, 10f64.exp(), ThresholdVariant::LogPower).unwrap();
        assert!((l + 100.0 / 10f64.ln()).abs() < 1e-9);
        assert!((l + 43.4294).abs() < 1e-4);
        assert!(matches!(
            decay_threshold(&params(), 0.0, E, ThresholdVariant::LogPower),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn padding_to_power_of_two() {
        let u = SampledDistribution::from_fn_1d(0.0, 1.0, 100, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(u.shape(), &[128]);
        assert_eq!(u.values()[99], Complex64::new(1.0, 0.0));
        assert_eq!(u.values()[100], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn parseval_for_constant() {
        let u = SampledDistribution::from_fn_1d(-4.0, 4.0, 4096, |_| Complex64::new(1.0, 0.0)).unwrap();
        let phi = BumpFunction::standard(vec![0.0]).unwrap();
        for pad in [1, 2, 3] {
            let s = spectrum_localized(&u, &phi, pad).unwrap();
            assert!((s.parseval_sum() - s.l2_norm_sq).abs() <= 1e-9 * s.l2_norm_sq);
        }
        let wide = BumpFunction::new(vec![3.0], 1.0, 2.0).unwrap();
        assert!(matches!(spectrum_localized(&u, &wide, 1), Err(Error::Domain(_))));
    }

    // Transform of the windowed step plus the aliases of the sampled sum:
    // Σ_m G(ξ + 2πm/Δx) with G(η) = φ(0)/(iη) + R(η). The 1/(iη) part sums
    // to (Δx/2i) cot(ξΔx/2); R is computed by quadrature for |m| <= 2.
    fn step_oracle(phi: &BumpFunction, dx: f64, xi: f64) -> f64 {
        let pair = GlPair::new(32).unwrap();
        let b = phi.axis_support();
        let edges = panel_edges(0.0, b, &[phi.r_plateau()], &[], 1.0);
        let g = |eta: f64| -> Complex64 {
            let edges: Vec<f64> = edges
                .windows(2)
                .flat_map(|w| {
                    let n = ((w[1] - w[0]) * eta.abs() / 4.0).ceil().max(1.0) as usize;
                    (0..n).map(move |k| w[0] + (w[1] - w[0]) * k as f64 / n as f64)
                })
                .chain([b])
                .collect();
            pair.adaptive(&edges, 1e-12, 30, |x| {
                Complex64::new(phi.eval(&[x]), 0.0) * Complex64::new(0.0, -x * eta).exp()
            })
            .unwrap()
            .0
        };
        let i = Complex64::new(0.0, 1.0);
        let mut total = Complex64::new(0.0, 0.0);
        for m in -2..=2 {
            let eta = xi + 2.0 * PI * m as f64 / dx;
            total += g(eta) - 1.0 / (i * eta);
        }
        total += dx / (2.0 * i) / (xi * dx / 2.0).tan();
        total.norm()
    }

    #[test]
    fn windowed_step_matches_oracle() {
        let u = heaviside(4096);
        let search = WfSearch::default();
        let phi = BumpFunction::new(vec![0.0], search.window_plateau, search.window_support).unwrap();
        let s = spectrum_localized(&u, &phi, 1).unwrap();
        let (lo, hi) = u.default_band();
        let dx = u.spacing()[0];
        let mut checked = 0;
        for i in (0..s.magnitudes.len()).step_by(7) {
            let xi = s.frequency(i)[0];
            if xi.abs() < lo || xi.abs() > hi {
                continue;
            }
            let o = step_oracle(&phi, dx, xi);
            assert!((s.magnitudes[i] - o).abs() <= 1e-6 * o, "xi = {xi}: {} vs {o}", s.magnitudes[i]);
            checked += 1;
        }
        assert!(checked > 200);
    }

    #[test]
    fn gaussian_spectrum_matches_closed_form() {
        let sd = 0.3;
        let u = SampledDistribution::from_fn_1d(-4.0, 4.0, 4096, |x| {
            Complex64::new((-x * x / (2.0 * sd * sd)).exp(), 0.0)
        })
        .unwrap();
        // the window is 1 wherever the Gaussian exceeds e^{-50}
        let phi = BumpFunction::new(vec![0.0], 3.0, 3.9).unwrap();
        let s = spectrum_localized(&u, &phi, 2).unwrap();
        let floor = 1e-12 * s.max_magnitude();
        let edge = (2.0 * 1e12f64.ln()).sqrt() / sd;
        for (i, m) in s.magnitudes.iter().enumerate() {
            let xi = s.frequency(i)[0];
            let exact = sd * (2.0 * PI).sqrt() * (-0.5 * sd * sd * xi * xi).exp();
            if exact > floor {
                assert!((m - exact).abs() <= 1e-9 * exact + 1e-15, "xi = {xi}: {m} vs {exact}");
            }
            if xi.abs() > edge * 1.01 {
                assert!(*m < floor, "xi = {xi}: {m}");
            }
        }
    }

    #[test]
    fn heaviside_flags_only_the_jump() {
        let u = heaviside(4096);
        let pts = vec![vec![0.0], vec![0.5], vec![-0.5]];
        let r = wf_analyze(&u, &pts, &both(), &params(), &WfSearch::default(), ThresholdVariant::T).unwrap();
        for v in &r.verdicts {
            assert_eq!(v.singular, v.point[0] == 0.0, "{}", r.to_text());
        }
    }

    #[test]
    fn gaussian_is_regular_everywhere() {
        let u = gaussian(4096);
        let pts: Vec<Vec<f64>> = [-3.0, -1.3, 0.0, 0.7, 2.0, 3.5].iter().map(|x| vec![*x]).collect();
        let r = wf_analyze(&u, &pts, &both(), &params(), &WfSearch::default(), ThresholdVariant::T).unwrap();
        for v in &r.verdicts {
            assert!(!v.singular, "{}", r.to_text());
            assert!(v.profile.iter().all(|e| e.pass));
        }
    }

    #[test]
    fn verdicts_monotone_in_h() {
        let search = WfSearch {
            h_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            ..WfSearch::default()
        };
        for u in [heaviside(4096), gaussian(4096)] {
            let pts = vec![vec![0.0], vec![0.5], vec![1.5]];
            let r = wf_analyze(&u, &pts, &both(), &params(), &search, ThresholdVariant::T).unwrap();
            for v in &r.verdicts {
                for w in v.profile.windows(2) {
                    assert!(!w[1].pass || w[0].pass, "{}", r.to_text());
                }
            }
        }
    }

    #[test]
    fn log_power_variant_runs() {
        let u = heaviside(4096);
        let search = WfSearch {
            h_grid: vec![0.5, 1.0],
            ..WfSearch::default()
        };
        let r = wf_analyze(&u, &[vec![0.0], vec![0.5]], &both(), &params(), &search, ThresholdVariant::LogPower).unwrap();
        assert!(r.verdicts[0].singular && r.verdicts[1].singular);
        assert!(!r.verdicts[2].singular && !r.verdicts[3].singular);
        let low = WfSearch {
            band: Some((2.0, 100.0)),
            ..search
        };
        assert!(matches!(
            wf_analyze(&u, &[vec![0.0]], &both(), &params(), &low, ThresholdVariant::LogPower),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn two_dimensional_step_direction() {
        let u = SampledDistribution::from_fn_2d([(-1.5, 1.5), (-1.5, 1.5)], [768, 768], |x, _| {
            Complex64::new(
                if x > 0.0 {
                    1.0
                } else if x == 0.0 {
                    0.5
                } else {
                    0.0
                },
                0.0,
            )
        })
        .unwrap();
        let q = PI / 8.0;
        let cones = vec![
            ConeSpec::sector(0.0, q).unwrap(),
            ConeSpec::sector(PI, q).unwrap(),
            ConeSpec::sector(FRAC_PI_2, q).unwrap(),
            ConeSpec::sector(-FRAC_PI_2, q).unwrap(),
        ];
        // per-axis support 0.45 as in one dimension
        let search = WfSearch {
            window_support: 0.64,
            ..WfSearch::default()
        };
        let r = wf_analyze(&u, &[vec![0.0, 0.0], vec![0.6, 0.0]], &cones, &params(), &search, ThresholdVariant::T).unwrap();
        let flags: Vec<bool> = r.verdicts.iter().map(|v| v.singular).collect();
        assert_eq!(flags, [true, true, false, false, false, false, false, false], "{}", r.to_text());
        let narrow = vec![ConeSpec::sector(0.0, 0.05).unwrap()];
        assert!(matches!(
            wf_analyze(&u, &[vec![0.0, 0.0]], &narrow, &params(), &WfSearch::default(), ThresholdVariant::T),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn pipeline_inverse_z_contained() {
        let f = Fixture::InvZ.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap();
        let gs = GrowthSpec::new(vec![0.5], vec![(-2.0, 2.0)]);
        let mut flags = Vec::new();
        for t in [1e-2, 1e-3] {
            let r = boundary_wf_pipeline(
                &f,
                &params(),
                (1.0, &gs),
                &ProxySampling::new_1d(t, 0.5),
                &[vec![0.0], vec![0.5]],
                &both(),
                &WfSearch::default(),
                ThresholdVariant::T,
            )
            .unwrap();
            assert!(r.contained, "{}", r.report.to_text());
            flags.push(r.report.verdicts.iter().map(|v| v.singular).collect::<Vec<_>>());
        }
        assert_eq!(flags[0], [true, false, false, false]);
        assert_eq!(flags[0], flags[1]);
    }

    #[test]
    fn pipeline_entire_function_is_regular() {
        let f = TubeFunction::new("gauss", |z| (-z[0] * z[0]).exp(), vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0)
            .unwrap();
        let gs = GrowthSpec::new(vec![0.5], vec![(-2.0, 2.0)]);
        let r = boundary_wf_pipeline(
            &f,
            &params(),
            (1.0, &gs),
            &ProxySampling::new_1d(1e-2, 0.5),
            &[vec![0.0], vec![0.5]],
            &both(),
            &WfSearch::default(),
            ThresholdVariant::T,
        )
        .unwrap();
        assert_eq!(r.report.singular().count(), 0, "{}", r.report.to_text());
        assert!(r.contained);
    }

    #[test]
    fn pipeline_refuses_growth_violation() {
        let f = Fixture::ExpInvZ.tube(vec![(-3.0, 3.0)], ConeSpec::positive(), 1.0).unwrap();
        let gs = GrowthSpec::new(vec![0.5], vec![(-2.0, 2.0)]);
        let r = boundary_wf_pipeline(
            &f,
            &params(),
            (1.0, &gs),
            &ProxySampling::new_1d(1e-2, 0.5),
            &[vec![0.0]],
            &both(),
            &WfSearch::default(),
            ThresholdVariant::T,
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
