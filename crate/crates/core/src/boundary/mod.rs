//! Analytic functions on tubes, the almost analytic extension of a test
//! function, and boundary-value pairings.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::cone::ConeSpec;
use crate::error::{Error, Result};

mod extension;
mod growth;
mod pairing;

pub use extension::{
    dbar_decay_fit, extension_bound_fit, AlmostAnalyticExtension, DbarDecayFit, EnvelopeSpec,
    ExtensionBoundFit, ExtensionWeights,
};
pub use growth::{growth_check, GrowthLevel, GrowthReport, GrowthSpec, Violator};
pub use pairing::{
    direct_pairing, stokes_pairing, DirectPairing, DirectPairingSpec, PairingResult, QuadratureSpec, TPanel,
};

type Evaluator = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// An analytic function on `{Re z ∈ U, Im z ∈ Γ, |Im z| < γ}`.
#[derive(Clone)]
pub struct TubeFunction {
    name: String,
    eval: Evaluator,
    log_eval: Option<Evaluator>,
    /// Open box `U`, one interval per axis.
    pub domain: Vec<(f64, f64)>,
    pub cone: ConeSpec,
    /// Height bound `γ`.
    pub height: f64,
    /// Per-axis real coordinates near which `F(x + i0)` is singular.
    pub singular_points: Vec<Vec<f64>>,
}

impl fmt::Debug for TubeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TubeFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("cone", &self.cone)
            .field("height", &self.height)
            .field("singular_points", &self.singular_points)
            .finish()
    }
}

impl TubeFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
        domain: Vec<(f64, f64)>,
        cone: ConeSpec,
        height: f64,
    ) -> Result<Self> {
        if domain.len() != cone.dim() {
            return Err(Error::Parameter(format!(
                "domain has {} axes but the cone lives in dimension {}",
                domain.len(),
                cone.dim()
            )));
        }
        if domain.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Parameter("domain intervals must be finite and nonempty".into()));
        }
        if !(height > 0.0) {
            return Err(Error::Parameter(format!("tube height must be positive, got {height}")));
        }
        let d = domain.len();
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            log_eval: None,
            domain,
            cone,
            height,
            singular_points: vec![Vec::new(); d],
        })
    }

    /// Supply `ln F` directly, for functions whose modulus overflows.
    pub fn with_log(mut self, log_eval: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static) -> Self {
        self.log_eval = Some(Arc::new(log_eval));
        self
    }

    pub fn with_singular_points(mut self, points: Vec<Vec<f64>>) -> Self {
        self.singular_points = points;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        (self.eval)(z)
    }

    pub fn ln_abs(&self, z: &[Complex64]) -> f64 {
        match &self.log_eval {
            Some(l) => l(z).re,
            None => self.eval(z).norm().ln(),
        }
    }

    /// Checks that `y` is an admissible imaginary part.
    pub fn check_direction(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::Parameter(format!(
                "direction has {} components, tube dimension is {}",
                y.len(),
                self.dim()
            )));
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !self.cone.contains(y) {
            return Err(Error::Domain(format!("direction {y:?} is not in the cone {}", self.cone)));
        }
        if !(norm > 0.0 && norm < self.height) {
            return Err(Error::Domain(format!(
                "direction length {norm} must lie in (0, {})",
                self.height
            )));
        }
        Ok(())
    }
}

/// Named analytic functions used as boundary-value fixtures.
#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Const(f64),
    /// `1/z`
    InvZ,
    /// `1/z²`
    InvZ2,
    /// `exp(1/z)`
    ExpInvZ,
    /// `N(z)/D(z)` with real coefficients in ascending powers.
    Rational { numerator: Vec<f64>, denominator: Vec<f64> },
    /// `1/(z₁ + z₂)` on a two-dimensional tube.
    InvSum,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0), |acc, &a| acc * z + a)
}

fn trim(coeffs: &[f64]) -> Vec<f64> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && v.last() == Some(&0.0) {
        v.pop();
    }
    v
}

/// Roots of a real polynomial given in ascending powers (Durand–Kerner).
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let p = trim(coeffs);
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p[n];
    let monic: Vec<f64> = p.iter().map(|a| a / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..1000 {
        let mut change = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let denom: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| zi - roots[j])
                .product();
            let delta = horner(&monic, zi) / denom;
            roots[i] = zi - delta;
            change = change.max(delta.norm() / zi.norm().max(1.0));
        }
        if change < 1e-15 {
            return Ok(roots);
        }
    }
    let residual = roots
        .iter()
        .map(|r| horner(&monic, *r).norm())
        .fold(0.0, f64::max);
    if residual < 1e-10 {
        Ok(roots)
    } else {
        Err(Error::Numerical {
            message: "polynomial root iteration did not converge".into(),
            partial: c(0.0),
            error_estimate: residual,
        })
    }
}

impl Fixture {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Const(_) => "const",
            Self::InvZ => "inv_z",
            Self::InvZ2 => "inv_z2",
            Self::ExpInvZ => "exp_inv_z",
            Self::Rational { .. } => "rational",
            Self::InvSum => "inv_sum",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::InvSum => 2,
            _ => 1,
        }
    }

    /// The fixture on the tube over `domain` with cone `cone` and height
    /// `height`.
    pub fn tube(&self, domain: Vec<(f64, f64)>, cone: ConeSpec, height: f64) -> Result<TubeFunction> {
        let name = self.name();
        let origin = vec![vec![0.0]];
        let f = match self {
            Self::Const(v) => {
                let v = *v;
                let d = domain.len();
                TubeFunction::new(name, move |_| c(v), domain, cone, height)?
                    .with_singular_points(vec![Vec::new(); d])
            }
            Self::InvZ => TubeFunction::new(name, |z| z[0].inv(), domain, cone, height)?
                .with_log(|z| -z[0].ln())
                .with_singular_points(origin),
            Self::InvZ2 => TubeFunction::new(name, |z| (z[0] * z[0]).inv(), domain, cone, height)?
                .with_log(|z| -2.0 * z[0].ln())
                .with_singular_points(origin),
            Self::ExpInvZ => TubeFunction::new(name, |z| z[0].inv().exp(), domain, cone, height)?
                .with_log(|z| z[0].inv())
                .with_singular_points(origin),
            Self::Rational { numerator, denominator } => {
                let num = trim(numerator);
                let den = trim(denominator);
                if den.iter().all(|v| *v == 0.0) {
                    return Err(Error::Parameter("denominator is identically zero".into()));
                }
                let poles = polynomial_roots(&den)?;
                let (lo, hi) = domain[0];
                let sign = match cone {
                    ConeSpec::HalfLine { positive } => {
                        if positive {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    ConeSpec::Sector { .. } => {
                        return Err(Error::Parameter("rational fixtures are one-dimensional".into()))
                    }
                };
                if let Some(p) = poles
                    .iter()
                    .find(|p| p.im * sign > 0.0 && p.im.abs() < height && p.re > lo && p.re < hi)
                {
                    return Err(Error::Domain(format!("pole {p} lies inside the tube")));
                }
                let singular: Vec<f64> = poles
                    .iter()
                    .filter(|p| p.im.abs() < height && p.re > lo && p.re < hi)
                    .map(|p| p.re)
                    .collect();
                TubeFunction::new(
                    name,
                    move |z| horner(&num, z[0]) / horner(&den, z[0]),
                    domain,
                    cone,
                    height,
                )?
                .with_singular_points(vec![singular])
            }
            Self::InvSum => TubeFunction::new(name, |z| (z[0] + z[1]).inv(), domain, cone, height)?
                .with_log(|z| -(z[0] + z[1]).ln())
                .with_singular_points(vec![Vec::new(), Vec::new()]),
        };
        if f.dim() != self.dim() {
            return Err(Error::Parameter(format!(
                "fixture {name} is {}-dimensional, tube is {}-dimensional",
                self.dim(),
                f.dim()
            )));
        }
        Ok(f)
    }
}
