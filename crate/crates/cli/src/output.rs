//! Artifact writing: columnar text and atomic file replacement.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Writes `contents` to `dir/name` through a temporary file in `dir` and a
/// rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(&target, e))?;
    tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
    Ok(target)
}

/// Formats a float for artifacts: fixed 12 significant digits, `nan`/`inf`
/// spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.12e}")
    }
}

/// Whitespace-delimited columns under a `#` header.
pub struct Columns {
    text: String,
    width: usize,
}

impl Columns {
    pub fn new(comment: &str, names: &[&str]) -> Self {
        let mut text = String::new();
        for line in comment.lines() {
            let _ = writeln!(text, "# {line}");
        }
        let _ = writeln!(text, "# {}", names.join(" "));
        Self {
            text,
            width: names.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.width, "row width");
        let _ = writeln!(self.text, "{}", cells.join(" "));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", "one").unwrap();
        write_atomic(dir.path(), "a.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn columns_layout() {
        let mut c = Columns::new("demo", &["k", "T"]);
        c.row(&[num(1.0), num(f64::NAN)]);
        assert_eq!(c.finish(), "# demo\n# k T\n1.000000000000e0 nan\n");
    }
}
