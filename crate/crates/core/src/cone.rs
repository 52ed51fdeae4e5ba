//! Open convex cones in dimension 1 or 2 and their closed duals
//! `Γ⁰ = {ξ : y·ξ ≥ 0 for all y ∈ Γ}`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};

const ANGLE_EPS: f64 = 1e-12;

/// Wrap an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Open cone excluding the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeSpec {
    /// `{y > 0}` or `{y < 0}` on the line.
    HalfLine { positive: bool },
    /// Open planar sector of directions within `half_angle` of `center`.
    Sector { center: f64, half_angle: f64 },
}

impl ConeSpec {
    pub fn positive() -> Self {
        Self::HalfLine { positive: true }
    }

    pub fn negative() -> Self {
        Self::HalfLine { positive: false }
    }

    pub fn sector(center: f64, half_angle: f64) -> Result<Self> {
        if !(center.is_finite() && half_angle > 0.0 && half_angle < PI) {
            return Err(Error::Parameter(format!(
                "sector needs a finite center and half-angle in (0, π), got {center}, {half_angle}"
            )));
        }
        Ok(Self::Sector {
            center: wrap_angle(center),
            half_angle,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::HalfLine { .. } => 1,
            Self::Sector { .. } => 2,
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match (*self, y) {
            (Self::HalfLine { positive }, [v]) => {
                if positive {
                    *v > 0.0
                } else {
                    *v < 0.0
                }
            }
            (Self::Sector { center, half_angle }, [a, b]) => {
                if *a == 0.0 && *b == 0.0 {
                    return false;
                }
                wrap_angle(b.atan2(*a) - center).abs() < half_angle
            }
            _ => false,
        }
    }

    /// Unit vector along the axis of the cone.
    pub fn axis(&self) -> Vec<f64> {
        match *self {
            Self::HalfLine { positive } => vec![if positive { 1.0 } else { -1.0 }],
            Self::Sector { center, .. } => vec![center.cos(), center.sin()],
        }
    }
}

impl fmt::Display for ConeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfLine { positive: true } => write!(f, "+"),
            Self::HalfLine { positive: false } => write!(f, "-"),
            Self::Sector { center, half_angle } => write!(f, "sector({center:.6}, {half_angle:.6})"),
        }
    }
}

/// Closed convex cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedCone {
    HalfLine { positive: bool },
    /// Closed sector; `half_angle` in `[0, π/2]`, zero meaning a ray.
    Sector { center: f64, half_angle: f64 },
    Origin { dim: usize },
    Whole { dim: usize },
}

impl ClosedCone {
    pub fn contains(&self, xi: &[f64]) -> bool {
        if xi.iter().all(|v| *v == 0.0) {
            return true;
        }
        match (*self, xi) {
            (Self::HalfLine { positive }, [v]) => {
                if positive {
                    *v >= 0.0
                } else {
                    *v <= 0.0
                }
            }
            (Self::Sector { center, half_angle }, [a, b]) => {
                wrap_angle(b.atan2(*a) - center).abs() <= half_angle + ANGLE_EPS
            }
            (Self::Origin { .. }, _) => false,
            (Self::Whole { .. }, _) => true,
            _ => false,
        }
    }

    /// Whether every direction of the open cone lies in this closed cone.
    pub fn contains_cone(&self, cone: &ConeSpec) -> bool {
        match (*self, *cone) {
            (Self::Whole { .. }, _) => true,
            (Self::Origin { .. }, _) => false,
            (Self::HalfLine { positive }, ConeSpec::HalfLine { positive: p }) => positive == p,
            (Self::Sector { center, half_angle }, ConeSpec::Sector { center: c, half_angle: h }) => {
                wrap_angle(c - center).abs() + h <= half_angle + ANGLE_EPS
            }
            _ => false,
        }
    }

    pub fn dual(&self) -> ClosedCone {
        match *self {
            Self::HalfLine { positive } => Self::HalfLine { positive },
            Self::Sector { center, half_angle } => Self::Sector {
                center,
                half_angle: (FRAC_PI_2 - half_angle).max(0.0),
            },
            Self::Origin { dim } => Self::Whole { dim },
            Self::Whole { dim } => Self::Origin { dim },
        }
    }
}

impl fmt::Display for ClosedCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfLine { positive: true } => write!(f, "[0, inf)"),
            Self::HalfLine { positive: false } => write!(f, "(-inf, 0]"),
            Self::Sector { center, half_angle } if *half_angle == 0.0 => write!(f, "ray({center:.6})"),
            Self::Sector { center, half_angle } => write!(f, "closed_sector({center:.6}, {half_angle:.6})"),
            Self::Origin { .. } => write!(f, "origin"),
            Self::Whole { .. } => write!(f, "whole"),
        }
    }
}

/// Closed dual cone of an open cone.
pub fn dual_cone(cone: &ConeSpec) -> ClosedCone {
    match *cone {
        ConeSpec::HalfLine { positive } => ClosedCone::HalfLine { positive },
        ConeSpec::Sector { center, half_angle } => {
            if half_angle <= FRAC_PI_2 {
                ClosedCone::Sector {
                    center,
                    half_angle: FRAC_PI_2 - half_angle,
                }
            } else {
                // the convex hull of a sector wider than a half-plane is the plane
                ClosedCone::Origin { dim: 2 }
            }
        }
    }
}
