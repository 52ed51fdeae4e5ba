use std::path::Path;
use std::process::{Command, Output};

use gevrey_cli::samples::{write_real, Sidecar};

fn gevrey(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gevrey"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("gevrey runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn bv_reproduces_minus_i_pi() {
    let dir = tempfile::tempdir().unwrap();
    let o = gevrey(&["bv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(dir.path(), "bv_summary.txt");
    let v: Vec<f64> = field(&summary, "stokes.value").split(' ').map(|w| w.parse().unwrap()).collect();
    assert!(v[0].abs() < 1e-6 && (v[1] + std::f64::consts::PI).abs() < 1e-6, "{v:?}");
}

#[test]
fn manifest_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(gevrey(&["seqcheck", "--seed", "5"], a.path()).status.code(), Some(0));
    let manifest = a.path().join("manifest.json");
    let o = gevrey(&["seqcheck", "--config", manifest.to_str().unwrap()], b.path());
    assert_eq!(o.status.code(), Some(0));
    for name in ["manifest.json", "seqcheck.txt", "seqcheck.dat"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert!(read(b.path(), "manifest.json").contains("\"seed\": 5"));
}

#[test]
fn bad_config_exits_two_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"assoc": {"points": "many"}}"#).unwrap();
    let o = gevrey(&["assoc", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("assoc.points"));

    std::fs::write(&cfg, r#"{"params": {"sigma": 1.0}}"#).unwrap();
    let o = gevrey(&["assoc", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn growth_violation_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"wf": {"signal": {"kind": "boundary", "tube": {"fixture": {"name": "exp_inv_z"}, "domain": [[-3, 3]]},
            "t": 0.01, "direction": [0.5], "sample_box": [[-1, 1]], "samples": [4096]}}}"#,
    )
    .unwrap();
    let o = gevrey(&["wf", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn wf_reads_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let n = 2048;
    let dx = 8.0 / n as f64;
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let x = -4.0 + j as f64 * dx;
            if x > 1.0 {
                1.0
            } else if x == 1.0 {
                0.5
            } else {
                0.0
            }
        })
        .collect();
    let data = dir.path().join("step.txt");
    let side = Sidecar {
        origin: vec![-4.0],
        spacing: vec![dx],
        extent: vec![n],
        complex: false,
    };
    write_real(&data, &side, &values).unwrap();
    let cfg = dir.path().join("cfg.json");
    let json = format!(
        r#"{{"wf": {{"signal": {{"kind": "file", "path": {:?}}}, "points": [[1.0], [0.0]]}}}}"#,
        data.to_str().unwrap()
    );
    std::fs::write(&cfg, json).unwrap();
    let out = dir.path().join("out");
    let o = gevrey(&["wf", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read(&out, "wf_report.txt");
    let verdicts: Vec<&str> = report.lines().filter(|l| l.starts_with("point ")).collect();
    assert_eq!(verdicts.len(), 4, "{report}");
    assert!(verdicts[..2].iter().all(|l| l.contains("SINGULAR")), "{report}");
    assert!(verdicts[2..].iter().all(|l| l.contains("regular")), "{report}");
    assert!(read(&out, "wf_curves.dat").lines().count() > 10);
}
