use std::path::Path;
use std::process::{Command, Output};

fn rrm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrm"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn rrm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn table1_csv_matches_the_reference_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = rrm(&["table1", "--format", "csv"], dir.path());
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let want = [
        [0.0, 0.0, 4.5, 0.7071, 1.0],
        [0.125, 0.125, 2.625, 0.6124, 0.8660],
        [0.0; 5],
    ];
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, w) in rows.iter().zip(want) {
        for (i, x) in w.iter().enumerate() {
            let got: f64 = row[i].parse().unwrap();
            assert!((got - x).abs() < 1e-4);
        }
    }
    assert_eq!(&rows[2][5], "real");
}

#[test]
fn exit_codes_distinguish_validation_and_io() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(rrm(&["zoo", "isotropic", "--param", "p=1.5"], p).status.code(), Some(1));
    assert_eq!(rrm(&["zoo", "nonesuch"], p).status.code(), Some(1));
    assert_eq!(rrm(&["moments", "--state", "missing.json"], p).status.code(), Some(2));
    assert_eq!(rrm(&["fig3a"], p).status.code(), Some(1), "seed is required");
    assert_eq!(rrm(&["--bogus-flag"], p).status.code(), Some(1));
    assert_eq!(rrm(&["zoo", "rho0"], p).status.code(), Some(1));
    assert_eq!(
        rrm(&["schmidt", "--c2", "0.128", "--c4", "0.0351", "--d", "3"], p)
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn zoo_state_feeds_moments_and_schmidt() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(rrm(
        &[
            "zoo",
            "isotropic",
            "--param",
            "d=3",
            "--param",
            "p=0.8",
            "--out",
            "iso.json"
        ],
        p
    )
    .status
    .success());
    assert!(p.join("iso.json.manifest.json").exists());
    let o = rrm(&["moments", "--state", "iso.json", "--kind", "RRM", "--t", "2"], p);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.128).abs() < 1e-12);
    let o = rrm(&["schmidt", "--state", "iso.json"], p);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bound"], 2);
    assert_eq!(v["fired_rule"], "fourth_moment");
}

#[test]
fn seeded_recipes_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for out in ["a", "b"] {
        let o = rrm(
            &[
                "sfig2",
                "--seed",
                "5",
                "--points",
                "3",
                "--settings",
                "200",
                "--out",
                out,
            ],
            p,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["points.csv", "exact.csv"] {
        assert_eq!(
            std::fs::read(p.join("a").join(f)).unwrap(),
            std::fs::read(p.join("b").join(f)).unwrap()
        );
    }
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);
    assert!(m["wall_time_s"].is_number());
    assert!(m["versions"]["rrm"].is_string());
}

#[test]
fn shadow_command_writes_csv_and_replayable_records() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = rrm(
        &[
            "shadow",
            "--seed",
            "9",
            "--qubits",
            "3",
            "--grid",
            "0.5",
            "--settings",
            "50",
            "--runs",
            "2",
            "--snapshots-out",
            "snaps.jsonl",
            "--out",
            "err.csv",
        ],
        p,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(p.join("err.csv")).unwrap();
    assert!(text.starts_with("grid_value,ensemble,mean_error,std,n_settings,n_runs,seed"));
    assert_eq!(text.lines().count(), 3);
    let lines = std::fs::read_to_string(p.join("snaps.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 100);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["seed_path"]["master"].is_u64());
}

#[test]
fn imaginarity_partition_scan() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(rrm(&["zoo", "table1", "--param", "k=2", "--out", "t.json"], p)
        .status
        .success());
    let o = rrm(&["imaginarity", "--state", "t.json", "--partition", "0|1"], p);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(
        rrm(&["imaginarity", "--state", "t.json", "--partition", "0|0"], p)
            .status
            .code(),
        Some(1)
    );
}
