use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nhse(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhse"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = nhse(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn spectrum_is_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&["spectrum"], a.path());
    ok(&["spectrum"], b.path());
    let x = fs::read(a.path().join("spectrum.csv")).unwrap();
    let y = fs::read(b.path().join("spectrum.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn default_spectrum_has_two_edge_states() {
    let dir = TempDir::new().unwrap();
    ok(&["spectrum"], dir.path());
    let rows = rows(&dir.path().join("spectrum.csv"));
    assert_eq!(rows.len(), 200);
    assert_eq!(rows.iter().filter(|r| &r[3] == "edge").count(), 2);
}

#[test]
fn svg_is_written_on_request() {
    let dir = TempDir::new().unwrap();
    ok(&["spectrum", "--svg", "--L", "20"], dir.path());
    let svg = fs::read_to_string(dir.path().join("spectrum.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn profile_selections() {
    let dir = TempDir::new().unwrap();
    ok(&["profiles", "--select", "edge:all"], dir.path());
    let states: std::collections::BTreeSet<String> =
        rows(&dir.path().join("profiles.csv")).iter().map(|r| r[0].to_string()).collect();
    assert_eq!(states.len(), 2);

    ok(&["profiles", "--select", "bulk:4"], dir.path());
    let rows = rows(&dir.path().join("profiles.csv"));
    let mut by_state: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for r in &rows {
        by_state.entry(r[0].to_string()).or_default().push(r[2].parse().unwrap());
    }
    assert_eq!(by_state.len(), 4);
    for (state, rho) in by_state {
        let pr = 1.0 / rho.iter().map(|p| p * p).sum::<f64>();
        assert!(pr >= 10.0, "state {state}: PR {pr}");
    }
}

#[test]
fn skin_configuration_localizes_bulk_states() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"V": 2.0, "theta": 0.7853981633974483}"#).unwrap();
    ok(&["profiles", "--select", "bulk:4", "--config", cfg.to_str().unwrap()], dir.path());
    let mut by_state: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for r in rows(&dir.path().join("profiles.csv")) {
        by_state.entry(r[0].to_string()).or_default().push(r[2].parse().unwrap());
    }
    let edge_weight = |rho: &[f64]| rho[..10].iter().sum::<f64>() + rho[rho.len() - 10..].iter().sum::<f64>();
    let localized = by_state.values().filter(|rho| edge_weight(rho) > 0.5).count();
    assert!(localized >= 1, "no bulk state sits at an edge");
}

#[test]
fn verdict_file() {
    let dir = TempDir::new().unwrap();
    ok(&["symmetry", "--V", "2", "--theta", "1.0471975511965976"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["kind"], "NhseBlocked", "{v}");
}

#[test]
fn sweep_and_boundary_row_counts() {
    let dir = TempDir::new().unwrap();
    ok(&["sweep-theta", "--L", "30", "--V", "2"], dir.path());
    assert_eq!(rows(&dir.path().join("sweep.csv")).len(), 24);
    ok(&["boundary"], dir.path());
    assert_eq!(rows(&dir.path().join("boundary.csv")).len(), 12);
}

#[test]
fn zak_file_keys() {
    let dir = TempDir::new().unwrap();
    ok(&["zak", "--band", "minus"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("zak.json")).unwrap()).unwrap();
    for key in ["band", "phase", "grid", "residual"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["band"], "minus");
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str], out: &Path| nhse(args, out).status.code();
    assert_eq!(code(&["spectrum", "--L", "1"], dir.path()), Some(1));
    assert_eq!(code(&["spectrum", "--bogus"], dir.path()), Some(1));
    assert_eq!(code(&["zak", "--delta", "0.6", "--gamma", "1.6"], dir.path()), Some(2));
    let file = dir.path().join("file");
    fs::write(&file, "").unwrap();
    assert_eq!(code(&["spectrum"], &file.join("sub")), Some(3));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"mu": 1.0}"#).unwrap();
    let o = nhse(&["spectrum", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
