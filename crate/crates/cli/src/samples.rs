//! Sample files: headerless whitespace-separated floats, with the grid in a
//! sidecar `<path>.json`. Complex data interleaves real and imaginary parts.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use gevrey_core::wavefront::SampledDistribution;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    /// Samples per axis, first axis slowest.
    pub extent: Vec<usize>,
    #[serde(default)]
    pub complex: bool,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn read(path: &Path) -> Result<SampledDistribution, CliError> {
    let side_path = sidecar_path(path);
    let side_text = std::fs::read_to_string(&side_path).map_err(|e| CliError::io(&side_path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&side_text);
    let side: Sidecar = serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
        field: format!("{}: {}", side_path.display(), e.path()),
        message: e.into_inner().to_string(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let floats: Vec<f64> = text
        .split_whitespace()
        .enumerate()
        .map(|(i, w)| {
            w.parse::<f64>().map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: format!("value {i} ({w:?}): {e}"),
            })
        })
        .collect::<Result<_, _>>()?;
    let values: Vec<Complex64> = if side.complex {
        if !floats.len().is_multiple_of(2) {
            return Err(CliError::Io {
                path: path.display().to_string(),
                message: "complex data needs an even number of floats".into(),
            });
        }
        floats.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
    } else {
        floats.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    };
    SampledDistribution::new(side.origin, side.spacing, side.extent, values)
        .map_err(|e| CliError::core(path.display().to_string(), e))
}

/// Writes real samples and their sidecar; used by tests and examples.
pub fn write_real(path: &Path, side: &Sidecar, values: &[f64]) -> Result<(), CliError> {
    let body: String = values.iter().map(|v| format!("{v:e}\n")).collect();
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))?;
    let side_path = sidecar_path(path);
    let json = serde_json::to_string_pretty(side).expect("sidecar serializes");
    std::fs::write(&side_path, json).map_err(|e| CliError::io(&side_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.txt");
        let side = Sidecar {
            origin: vec![-1.0],
            spacing: vec![0.5],
            extent: vec![4],
            complex: false,
        };
        write_real(&p, &side, &[0.0, 1.0, 2.5, -3.0]).unwrap();
        let u = read(&p).unwrap();
        assert_eq!(u.extent(), &[4]);
        assert_eq!(u.values()[2], Complex64::new(2.5, 0.0));
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.txt");
        let side = Sidecar {
            origin: vec![0.0],
            spacing: vec![1.0],
            extent: vec![5],
            complex: false,
        };
        write_real(&p, &side, &[1.0, 2.0]).unwrap();
        assert!(matches!(read(&p), Err(CliError::Core { .. })));
    }
}
