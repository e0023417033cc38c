//! Command-line contract of the binary: flags, output layout and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use resonance_core::emission::forward_backward;
use resonance_core::{make_pair, scan_separation, RealVec3, SpeciesRegistry};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_resonance-recoil"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn summary(csv: &str, key: &str) -> f64 {
    let prefix = format!("# summary {key}=");
    csv.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing {key}"))
        .parse()
        .unwrap()
}

fn write_species(dir: &Path, gamma: f64) -> String {
    let path = dir.join("species.json");
    let text = format!(
        r#"[{{"label":"A","wavelength_nm":795.0,"gamma_rad_s":{gamma},"dipole_axis":[0,0,1],"source":"test"}},
            {{"label":"B","wavelength_nm":770.0,"gamma_rad_s":3.7e7,"dipole_axis":[0,0,1],"source":"test"}}]"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn scan_defaults_match_library() {
    let out = run(&["scan"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.contains("# species_sha256="));
    assert!(csv.contains("# orientation=fixed"));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("x,separation_m,f0_x_n"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 400);
    assert_eq!(rows[0][0], 0.5);
    assert_eq!(rows[399][0], 20.0);

    let reg = SpeciesRegistry::bundled();
    let rb = reg.get("RB87_5P12").unwrap();
    let pair = make_pair(rb, reg.get("K40_GS").unwrap(), 0.5 / rb.k, RealVec3::X).unwrap();
    let lib = scan_separation(&pair, 0.5, 20.0, 400).unwrap();
    let lib_peak = lib
        .iter()
        .max_by(|a, b| a.directionality.abs().total_cmp(&b.directionality.abs()))
        .unwrap();
    assert_eq!(summary(&csv, "peak_x"), lib_peak.x);
    for (row, r) in rows.iter().zip(&lib) {
        assert_eq!(row[8], r.directionality);
    }
}

#[test]
fn emission_integral_matches_budget() {
    let emission = stdout(&run(&["emission", "--x", "1.7"]));
    let budget = stdout(&run(&["budget", "--x", "1.7"]));
    let p_fg = data_rows(&budget)[0][5];
    let integral = summary(&emission, "sphere_integral");
    assert!((integral - p_fg).abs() < 1e-6 * p_fg.abs());
    assert_eq!(summary(&emission, "p_fg"), p_fg);
}

#[test]
fn emission_vanishes_along_the_dipoles() {
    // Dipoles along z and φ = 0 towards z: θ = π/2 points along the dipoles.
    let rows = data_rows(&stdout(&run(&["emission", "--ntheta", "5"])));
    assert_eq!(rows.len(), 5);
    assert!((rows[2][0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    let scale = rows.iter().map(|r| r[1].abs()).fold(0.0, f64::max);
    assert!(rows[2][1].abs() < 1e-12 * scale);
}

#[test]
fn forward_backward_near_maximum_at_x_1_2() {
    let csv = stdout(&run(&["emission", "--x", "1.2"]));
    let at = summary(&csv, "forward_minus_backward_per_sr").abs();
    let reg = SpeciesRegistry::bundled();
    let rb = reg.get("RB87_5P12").unwrap();
    let pair = make_pair(rb, reg.get("K40_GS").unwrap(), 1.0 / rb.k, RealVec3::X).unwrap();
    let best = (0..=450)
        .map(|i| forward_backward(&pair.at_scaled_separation(0.5 + 0.01 * i as f64).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(at > 0.98 * best, "{at} vs {best}");
}

#[test]
fn json_output() {
    let out = run(&["budget", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["x"], "1.28e0");
    let row = &doc["rows"][0];
    assert!((row["p_a"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(
        row["p_de"].as_f64().unwrap(),
        -row["p_fg"].as_f64().unwrap()
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "xmin = 1.0\nxmax = 2.0\nsamples = 3\nformat = \"csv\"\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let rows = data_rows(&stdout(&run(&["scan", "--config", cfg])));
    assert_eq!(
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        vec![1.0, 1.5, 2.0]
    );
    let rows = data_rows(&stdout(&run(&["scan", "--config", cfg, "--samples", "5"])));
    assert_eq!(rows.len(), 5);
    let out = run(&[
        "scan",
        "--config",
        dir.path().join("missing.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_isotropic_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = run(&[
        "scan",
        "--samples",
        "4",
        "--orientation",
        "isotropic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# orientation=isotropic"));
    assert_eq!(data_rows(&text).len(), 4);
}

#[test]
fn dipole_axis_override() {
    let csv = stdout(&run(&["budget", "--dipole-axis", "0,1,1"]));
    assert!(csv.contains("# dipole_axis=0e0,1e0,1e0"));
    let out = run(&["budget", "--dipole-axis", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["budget", "--dipole-axis", "0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_and_error_lines() {
    let cases: [(&[&str], i32); 6] = [
        (&["scan", "--xmin", "2", "--xmax", "1"], 1),
        (&["scan", "--samples", "1"], 1),
        (&["emission", "--ntheta", "2"], 1),
        (&["budget", "--excited", "NOPE"], 1),
        (
            &["budget", "--species-file", "/nonexistent/species.json"],
            2,
        ),
        (&["budget", "--out", "/nonexistent/dir/out.csv"], 2),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["exit_code"], code);
        assert!(err["message"].as_str().unwrap().len() > 3);
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_lines_are_rejected() {
    let out = run(&["budget", "--excited", "K40_GS", "--ground", "K40_GS"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn custom_species_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_species(dir.path(), 3.6e7);
    let out = run(&["species", "list", "--species-file", &path]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.contains("\nA,") && csv.contains("\nB,"));
    let out = run(&[
        "budget",
        "--species-file",
        &path,
        "--excited",
        "A",
        "--ground",
        "B",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_fast_passes() {
    let out = run(&["verify", "--fast"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL "));
}

#[test]
fn verify_rejects_corrupt_species_before_checks() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_species(dir.path(), -3.6e7);
    let out = run(&["verify", "--fast", "--species-file", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_seed_is_echoed() {
    let out = run(&["verify", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("# seed=42\n"));
}
