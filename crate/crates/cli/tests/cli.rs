//! End-to-end CLI tests: exit codes and the sample -> analyze -> probe
//! pipeline.

use std::path::Path;
use std::process::Command;

fn geoknot() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geoknot"))
}

fn write_trefoil_xyz(dir: &Path) -> std::path::PathBuf {
    let curve = geoknot_core::load_seed_polygon(geoknot_core::KnotClass::Trefoil)
        .unwrap()
        .to_curve();
    let path = dir.join("trefoil.xyz");
    geoknot_core::io::write_xyz(&path, &curve).unwrap();
    path
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tre = write_trefoil_xyz(dir.path());

    let ok = geoknot()
        .args(["verify", "--in"])
        .arg(&tre)
        .args(["--expect", "3_1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{:?}", ok);
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("determinant=3"));
    assert!(stdout.contains("verdict=3_1"));

    let mismatch = geoknot()
        .args(["verify", "--in"])
        .arg(&tre)
        .args(["--expect", "0_1"])
        .output()
        .unwrap();
    assert_eq!(mismatch.status.code(), Some(1));

    let missing = geoknot()
        .args(["verify", "--in", "/nonexistent/zz.xyz", "--expect", "0_1"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let bad_label = geoknot()
        .args(["verify", "--in"])
        .arg(&tre)
        .args(["--expect", "5_2"])
        .output()
        .unwrap();
    assert_eq!(bad_label.status.code(), Some(2));

    let bad_flag = geoknot().args(["verify", "--bogus"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn version_embeds_format_string() {
    let out = geoknot().arg("--version").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("geoknot-xyz/1"), "{text}");
}

#[test]
fn writhe_matrix_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let tre = write_trefoil_xyz(dir.path());
    let out_csv = dir.path().join("w.csv");
    let status = geoknot()
        .args(["writhe-matrix", "--in"])
        .arg(&tre)
        .arg("--out")
        .arg(&out_csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let w = geoknot_core::io::read_writhe_matrix(&out_csv).unwrap();
    assert_eq!(w.dim(), 24);
    // Lattice trefoil writhe sits near +-3.4.
    assert!(geoknot_core::total_writhe(&w).abs() > 2.5);
}

#[test]
fn tau_direct_mode() {
    let out = geoknot()
        .args(["tau", "--m", "0.999", "--m-a", "0.831"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("feature_set,m,m_a,tau,flag"), "{text}");
    assert!(text.contains("0.8318"), "{text}");
    assert!(text.contains(",ok"), "{text}");

    let flagged = geoknot()
        .args(["tau", "--m", "0.50", "--m-a", "0.50"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&flagged.stdout).contains("not-informative"));

    let conflicting = geoknot().args(["tau", "--m", "0.9"]).output().unwrap();
    assert_eq!(conflicting.status.code(), Some(2));
}

#[test]
fn sample_analyze_probe_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let combined = dir.path().join("combined");
    std::fs::create_dir_all(&combined).unwrap();
    for (knot, seed) in [("0_1", "41"), ("3_1", "42")] {
        let out = dir.path().join(format!("run_{knot}"));
        let status = geoknot()
            .args([
                "sample",
                "--knot",
                knot,
                "--n-vertices",
                "40",
                "--count",
                "10",
                "--bins",
                "-4:4:8",
                "--seed",
                seed,
                "--jitter",
                "0.1",
                "--quiet",
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "sample {knot} failed");
        for entry in std::fs::read_dir(out.join("xyz")).unwrap() {
            let p = entry.unwrap().path();
            std::fs::copy(&p, combined.join(p.file_name().unwrap())).unwrap();
        }
    }

    let manifest = dir.path().join("manifest.csv");
    let status = geoknot()
        .args(["analyze", "--in"])
        .arg(&combined)
        .arg("--out")
        .arg(&manifest)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = geoknot_core::io::read_manifest(&manifest).unwrap();
    assert!(rows.len() >= 20);
    assert!(rows.iter().any(|r| r.label == "0_1"));
    assert!(rows.iter().any(|r| r.label == "3_1"));

    let probe_csv = dir.path().join("probe.csv");
    let status = geoknot()
        .args(["probe", "--manifest"])
        .arg(&manifest)
        .args(["--k", "3", "--out"])
        .arg(&probe_csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&probe_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "functional,mi_nats,rank");
    let mut seen = 0;
    for line in lines {
        let name = line.split(',').next().unwrap();
        let mi: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        // The biased direction is flattened even in a tiny run; unbiased size
        // functionals legitimately separate the classes here (that separation
        // is the phenomenon the probe exists to flag), so they are only
        // bounded by the binary-MI ceiling ln 2.
        if name == "writhe" {
            assert!(mi < 0.3, "biased functional not flattened: {line}");
        }
        assert!((0.0..=0.70).contains(&mi), "MI out of range: {line}");
        seen += 1;
    }
    assert_eq!(seen, 10);
}

#[test]
fn sample_partial_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let status = geoknot()
        .args([
            "sample",
            "--knot",
            "0_1",
            "--n-vertices",
            "40",
            "--count",
            "50",
            "--bins",
            "-5:5:10",
            "--seed",
            "1",
            "--max-moves",
            "2000",
            "--quiet",
            "--out",
        ])
        .arg(dir.path().join("partial"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn sample_accepts_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "knot = 0_1\nn_vertices = 40\ncount = 6\nbins = -4:4:8\nseed = 9\nprogress = false\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = geoknot()
        .args(["sample", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = geoknot_core::io::read_manifest(&out.join("manifest.csv")).unwrap();
    assert!(rows.iter().all(|r| r.label == "0_1"));
}
