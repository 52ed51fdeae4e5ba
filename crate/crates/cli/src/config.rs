//! Run configuration. Every field has a default, so `{}` is a valid config;
//! the resolved config is echoed to `manifest.json` and can be fed back.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gevrey_core::boundary::Fixture;
use gevrey_core::cone::ConeSpec;
use gevrey_core::GevreyParams;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Assoc,
    Seqcheck,
    Bump,
    Bv,
    Wf,
    Verify,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Assoc => "assoc",
            Self::Seqcheck => "seqcheck",
            Self::Bump => "bump",
            Self::Bv => "bv",
            Self::Wf => "wf",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<Subcommand>,
    pub params: ParamsConfig,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub assoc: AssocConfig,
    pub seqcheck: SeqcheckConfig,
    pub bump: BumpConfig,
    pub bv: BvConfig,
    pub wf: WfConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            params: ParamsConfig::default(),
            seed: 11,
            tolerances: Tolerances::default(),
            assoc: AssocConfig::default(),
            seqcheck: SeqcheckConfig::default(),
            bump: BumpConfig::default(),
            bv: BvConfig::default(),
            wf: WfConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config {
                field: if path == "." { "<root>".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn gevrey_params(&self) -> Result<GevreyParams, CliError> {
        GevreyParams::new(self.params.tau, self.params.sigma, self.params.h).map_err(|e| CliError::field("params", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub tau: f64,
    pub sigma: f64,
    pub h: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            sigma: 2.0,
            h: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Boundary-value pairings, absolute.
    pub pairing: f64,
    /// Agreement with independent oracles, relative.
    pub oracle: f64,
    /// Exact identities and discrete shape checks.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pairing: 1e-6,
            oracle: 1e-6,
            identity: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssocConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    /// Also run the comparison inequalities and the sandwich fit.
    pub appendix: bool,
}

impl Default for AssocConfig {
    fn default() -> Self {
        Self {
            k_min: 2f64.exp(),
            k_max: 20f64.exp(),
            points: 200,
            appendix: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeqcheckConfig {
    pub p_max: u64,
    /// Range of the two-index condition.
    pub split_p_max: u64,
}

impl Default for SeqcheckConfig {
    fn default() -> Self {
        Self {
            p_max: 100,
            split_p_max: 150,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BumpShape {
    pub center: Vec<f64>,
    pub r_plateau: f64,
    pub r_support: f64,
}

impl Default for BumpShape {
    fn default() -> Self {
        Self {
            center: vec![0.0],
            r_plateau: 1.0,
            r_support: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BumpConfig {
    pub shape: BumpShape,
    /// Samples per axis over the support box.
    pub points: usize,
    /// Highest derivative order written (d = 1).
    pub orders: usize,
    pub norm_alpha_max: usize,
    pub norm_density: usize,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self {
            shape: BumpShape::default(),
            points: 401,
            orders: 3,
            norm_alpha_max: 40,
            norm_density: 201,
        }
    }
}

/// Analytic function on a tube, by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FixtureConfig {
    Const { value: f64 },
    InvZ,
    InvZ2,
    ExpInvZ,
    Rational { numerator: Vec<f64>, denominator: Vec<f64> },
    InvSum,
}

impl FixtureConfig {
    pub fn fixture(&self) -> Fixture {
        match self {
            Self::Const { value } => Fixture::Const(*value),
            Self::InvZ => Fixture::InvZ,
            Self::InvZ2 => Fixture::InvZ2,
            Self::ExpInvZ => Fixture::ExpInvZ,
            Self::Rational { numerator, denominator } => Fixture::Rational {
                numerator: numerator.clone(),
                denominator: denominator.clone(),
            },
            Self::InvSum => Fixture::InvSum,
        }
    }
}

/// `"+"`/`"-"` in one dimension, a sector in two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeConfig {
    Sign(String),
    Sector { center: f64, half_angle: f64 },
}

impl ConeConfig {
    pub fn cone(&self, field: &str) -> Result<ConeSpec, CliError> {
        match self {
            Self::Sign(s) => match s.as_str() {
                "+" => Ok(ConeSpec::positive()),
                "-" => Ok(ConeSpec::negative()),
                other => Err(CliError::Config {
                    field: field.into(),
                    message: format!("cone sign must be \"+\" or \"-\", got {other:?}"),
                }),
            },
            Self::Sector { center, half_angle } => {
                ConeSpec::sector(*center, *half_angle).map_err(|e| CliError::field(field, e))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeConfig {
    pub fixture: FixtureConfig,
    pub domain: Vec<(f64, f64)>,
    pub cone: ConeConfig,
    pub height: f64,
}

impl Default for TubeConfig {
    fn default() -> Self {
        Self {
            fixture: FixtureConfig::InvZ,
            domain: vec![(-3.0, 3.0)],
            cone: ConeConfig::Sign("+".into()),
            height: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub order: usize,
    pub t_min: f64,
    /// Defaults to `tolerances.pairing`.
    pub tolerance: Option<f64>,
    pub x_subdivisions: usize,
    pub max_t_depth: usize,
    pub max_refinements: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            order: 32,
            t_min: 1e-6,
            tolerance: None,
            x_subdivisions: 4,
            max_t_depth: 12,
            max_refinements: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectConfig {
    pub t_sequence: Vec<f64>,
    /// Defaults to `tolerances.pairing`.
    pub tolerance: Option<f64>,
    pub quad_tolerance: f64,
    pub order: usize,
    pub max_depth: usize,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            t_sequence: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            tolerance: None,
            quad_tolerance: 1e-12,
            order: 32,
            max_depth: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub enabled: bool,
    /// The `H` of the growth allowance.
    pub h: f64,
    /// Defaults to the middle 2/3 of the domain.
    pub x_box: Option<Vec<(f64, f64)>>,
    pub x_points: usize,
    pub t_max: f64,
    pub levels: Vec<f64>,
    pub points_per_decade: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            h: 1.0,
            x_box: None,
            x_points: 101,
            t_max: 1.0,
            levels: vec![1e-1, 1e-2, 1e-3],
            points_per_decade: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BvConfig {
    pub tube: TubeConfig,
    pub bump: BumpShape,
    /// The direction `Y` in the cone.
    pub direction: Vec<f64>,
    pub quadrature: QuadConfig,
    pub direct: DirectConfig,
    pub growth: GrowthConfig,
}

impl Default for BvConfig {
    fn default() -> Self {
        Self {
            tube: TubeConfig::default(),
            bump: BumpShape::default(),
            direction: vec![0.5],
            quadrature: QuadConfig::default(),
            direct: DirectConfig::default(),
            growth: GrowthConfig::default(),
        }
    }
}

/// Data analyzed by `wf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    /// Unit step at `jump` with value 1/2 at the jump.
    Heaviside { jump: f64, sample_box: (f64, f64), samples: usize },
    /// `exp(-(x - center)² / (2 s²))`
    Gaussian { center: f64, s: f64, sample_box: (f64, f64), samples: usize },
    /// Headerless floats with a sidecar `<path>.json` describing the grid.
    File { path: String },
    /// `F(x + i t Y)` for a tube fixture, checked against the dual cone.
    Boundary {
        tube: TubeConfig,
        t: f64,
        direction: Vec<f64>,
        sample_box: Vec<(f64, f64)>,
        samples: Vec<usize>,
        #[serde(default)]
        growth: GrowthConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantConfig {
    T,
    LogPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WfConfig {
    pub signal: SignalConfig,
    pub points: Vec<Vec<f64>>,
    pub cones: Vec<ConeConfig>,
    pub variant: VariantConfig,
    pub band: Option<(f64, f64)>,
    pub h_grid: Vec<f64>,
    pub a_cap_factor: f64,
    pub window_plateau: f64,
    pub window_support: f64,
    pub pad_factor: usize,
    pub noise_floor: f64,
    pub angular_bins: usize,
    pub min_cone_bins: usize,
    /// Log-spaced `|ξ|` buckets of the decay curves.
    pub curve_buckets: usize,
}

impl Default for WfConfig {
    fn default() -> Self {
        Self {
            signal: SignalConfig::Heaviside {
                jump: 0.0,
                sample_box: (-4.0, 4.0),
                samples: 4096,
            },
            points: vec![vec![0.0], vec![0.5], vec![-0.5]],
            cones: vec![ConeConfig::Sign("+".into()), ConeConfig::Sign("-".into())],
            variant: VariantConfig::T,
            band: None,
            h_grid: vec![1.0, 2.0, 4.0],
            a_cap_factor: 4.0,
            window_plateau: 0.2,
            window_support: 0.45,
            pad_factor: 2,
            noise_floor: 1e-12,
            angular_bins: 64,
            min_cone_bins: 3,
            curve_buckets: 48,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Criteria to run, by number.
    pub criteria: Vec<u32>,
    pub wirtinger_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            criteria: (1..=12).collect(),
            wirtinger_points: 50,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn manifest_round_trips() {
        let mut c = RunConfig::default();
        c.subcommand = Some(Subcommand::Wf);
        c.wf.signal = SignalConfig::File { path: "u.txt".into() };
        c.wf.cones = vec![ConeConfig::Sector {
            center: 0.5,
            half_angle: 0.3,
        }];
        c.bv.tube.fixture = FixtureConfig::Rational {
            numerator: vec![1.0],
            denominator: vec![0.0, 1.0],
        };
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn errors_point_at_the_field() {
        let e = RunConfig::from_json(r#"{"bv": {"quadrature": {"order": "x"}}}"#).unwrap_err();
        match e {
            CliError::Config { field, .. } => assert_eq!(field, "bv.quadrature.order"),
            other => panic!("{other:?}"),
        }
        let e = RunConfig::from_json(r#"{"params": {"tau": 1, "sigmaa": 2}}"#).unwrap_err();
        assert!(matches!(e, CliError::Config { ref field, .. } if field.starts_with("params")), "{e:?}");
    }
}
