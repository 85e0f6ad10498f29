use std::process::Command;

use quaquaversal_cli::{run, Outcome};
use serde_json::Value;

fn qq(args: &[&str]) -> Outcome {
    run(std::iter::once("qq").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = qq(&full);
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    serde_json::from_str(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

#[test]
fn k1_spectrum_is_eighth_quarter_half() {
    let v = json(&["spectrum", "--k", "1"]);
    let clusters = v["results"]["clusters"].as_array().unwrap();
    let got: Vec<(f64, u64)> = clusters
        .iter()
        .map(|c| (c["value"].as_f64().unwrap(), c["mult"].as_u64().unwrap()))
        .collect();
    assert_eq!(got.len(), 3);
    for ((value, mult), expected) in got.iter().zip([0.125, 0.25, 0.5]) {
        assert!((value - expected).abs() < 1e-12);
        assert_eq!(*mult, 1);
    }
    assert_eq!(v["pass"], Value::Bool(true));
    for key in ["command", "config", "results", "residuals", "pass"] {
        assert!(v.get(key).is_some(), "missing top-level {key}");
    }
}

#[test]
fn k0_spectrum_is_one() {
    let v = json(&["spectrum", "--k", "0", "--method", "block"]);
    let clusters = v["results"]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert!((clusters[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn spectrum_csv_multiplicities_sum_to_dimension() {
    for k in [2u32, 7] {
        let out = qq(&["spectrum", "--k", &k.to_string(), "--format", "csv"]);
        assert_eq!(out.code, 0);
        let (header, rows) = csv_rows(&out.stdout);
        assert_eq!(header, ["value", "multiplicity", "spread"]);
        let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
        assert_eq!(total, u64::from(2 * k + 1));
    }
}

#[test]
fn json_round_trip_is_idempotent() {
    for args in [
        vec!["spectrum", "--k", "3", "--format", "json"],
        vec!["blocks", "--k", "2", "--format", "json"],
        vec!["gap-scan", "--kmax", "3", "--format", "json"],
        vec!["expected", "--kmax", "6", "--format", "json"],
        vec!["moments", "--k", "1", "--N", "2", "--format", "json"],
    ] {
        let out = qq(&args);
        let first: Value = serde_json::from_str(&out.stdout).unwrap();
        let text = serde_json::to_string_pretty(&first).unwrap();
        let second: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(first, second);
        assert_eq!(text + "\n", out.stdout, "{args:?}");
    }
}

#[test]
fn numbers_keep_full_precision() {
    let out = qq(&["spectrum", "--k", "4", "--format", "json"]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let report = quaquaversal::spectra::dense_spectrum(quaquaversal::IrrepIndex::new(4)).unwrap();
    let printed: Vec<f64> = v["results"]["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["value"].as_f64().unwrap())
        .collect();
    let direct: Vec<f64> = report.clusters.iter().map(|c| c.value).collect();
    assert_eq!(printed, direct, "JSON floats must round-trip exactly");
}

#[test]
fn blocks_dims_and_structure() {
    let v = json(&["blocks", "--k", "1"]);
    assert_eq!(v["results"]["dims"], serde_json::json!([0, 1, 1, 1]));
    let norms = v["results"]["block_norms"].as_array().unwrap();
    let scale = v["results"]["operator_norm"].as_f64().unwrap();
    for (i, row) in norms.iter().enumerate() {
        for cell in &row.as_array().unwrap()[i + 1..] {
            assert!(cell.as_f64().unwrap() <= 1e-9 * scale);
        }
    }
    let v = json(&["blocks", "--k", "2"]);
    assert_eq!(v["results"]["dims"], serde_json::json!([2, 1, 1, 1]));
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn blocks_swapped_pair_reports_swapped_partition() {
    let v = json(&["blocks", "--k", "1", "--pair", "x,y"]);
    assert_eq!(v["results"]["pair"], "x,y");
    assert_eq!(v["pass"], Value::Bool(true));
    for key in ["upper", "hermiticity", "zero_block"] {
        assert!(v["residuals"][key].as_f64().unwrap() <= 1e-9);
    }
    // A pair the operator is not adapted to still yields a report.
    let v = json(&["blocks", "--k", "3", "--pair", "z,x"]);
    assert!(v["residuals"]["predicted_diagonal_blocks"].is_null());
}

#[test]
fn gap_scan_table() {
    let out = qq(&["gap-scan", "--kmax", "1", "--format", "csv"]);
    assert_eq!(out.code, 0);
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header.join(","), "k,spectral_radius,gap,realness_residual");
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert!(out.stderr.contains("max spectral radius"));

    let v = json(&["gap-scan", "--kmax", "12"]);
    let rows = v["results"]["rows"].as_array().unwrap();
    let ks: Vec<u64> = rows.iter().map(|r| r["k"].as_u64().unwrap()).collect();
    assert_eq!(ks, (1..=12).collect::<Vec<_>>(), "rows ordered by k");
    assert!(rows
        .iter()
        .all(|r| r["spectral_radius"].as_f64().unwrap() < 1.0));
}

#[test]
fn moments_exact_and_refused() {
    let v = json(&["moments", "--k", "2", "--N", "3", "--exact"]);
    assert!(v["residuals"]["moment"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["results"]["samples"], 512);

    let out = qq(&["moments", "--k", "2", "--N", "10", "--exact"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--samples"), "{}", out.stderr);
}

#[test]
fn sampled_moments_are_reproducible() {
    let args = [
        "moments",
        "--k",
        "2",
        "--N",
        "6",
        "--samples",
        "20000",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = qq(&args);
    let b = qq(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["results"]["seed"], 7);
    assert_eq!(v["results"]["samples"], 20000);
    let other = qq(&[
        "moments",
        "--k",
        "2",
        "--N",
        "6",
        "--samples",
        "20000",
        "--seed",
        "8",
        "--format",
        "json",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn expected_reports_candidates() {
    let v = json(&["expected", "--k", "1"]);
    let row = &v["results"]["rows"][0];
    assert_eq!(
        (
            row["d"].as_u64(),
            row["q"].as_u64(),
            row["closed_form"].as_u64()
        ),
        (Some(1), Some(1), Some(1))
    );
    assert_eq!(row["agree"]["q_closed_form"], true);
    assert_eq!(row["agree"]["q_mod6"], true);

    let v = json(&["expected", "--k", "5"]);
    let row = &v["results"]["rows"][0];
    assert_eq!(row["q"], 2);
    assert_eq!(row["closed_form"], 1);
    assert_eq!(row["agree"]["q_closed_form"], false);
    let human = qq(&["expected", "--k", "5"]).stdout;
    assert!(human.contains("DISAGREE"));

    assert_eq!(
        json(&["expected", "--k", "2"])["results"]["rows"][0]["d"],
        1
    );
}

#[test]
fn verify_small_suite_passes() {
    let out = qq(&["verify", "--kmax", "3", "--theta", "0.7"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("golden_spectrum"));
    assert!(out.stdout.contains("spectrum {1/8, 1/4, 1/2}"));
    assert!(out.stdout.contains("theorem_given_angle"));
    assert!(!out.stdout.contains("[FAIL]"));
}

#[test]
fn verify_fails_when_tolerance_is_impossible() {
    let out = qq(&["verify", "--kmax", "1", "--tol", "1e-300"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("[FAIL]"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify", "--kmax", "0"],
        vec!["spectrum", "--k", "201"],
        vec!["spectrum"],
        vec!["blocks", "--k", "1", "--pair", "x,x"],
        vec!["blocks", "--k", "1", "--pair", "q,y"],
        vec!["spectrum", "--k", "1", "--format", "xml"],
        vec!["spectrum", "--k", "1", "--tol", "-1"],
        vec![
            "moments",
            "--k",
            "1",
            "--N",
            "2",
            "--exact",
            "--samples",
            "5",
        ],
        vec!["expected"],
        vec!["frobnicate"],
    ] {
        assert_eq!(qq(&args).code, 2, "{args:?}");
    }
    assert_eq!(qq(&["--help"]).code, 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qq-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.json");
    let out = qq(&[
        "spectrum",
        "--k",
        "1",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "spectrum");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes_and_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_qq");
    let status = |args: &[&str], threads: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(args);
        if let Some(t) = threads {
            cmd.env("QQ_THREADS", t);
        }
        cmd.output().unwrap()
    };
    assert_eq!(
        status(&["verify", "--kmax", "2"], Some("2")).status.code(),
        Some(0)
    );
    assert_eq!(
        status(&["verify", "--kmax", "0"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        status(&["moments", "--k", "2", "--N", "10"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        status(&["spectrum", "--k", "1"], Some("zero"))
            .status
            .code(),
        Some(2)
    );

    let one = status(&["gap-scan", "--kmax", "8", "--format", "csv"], Some("1"));
    let many = status(&["gap-scan", "--kmax", "8", "--format", "csv"], Some("4"));
    assert_eq!(
        one.stdout, many.stdout,
        "output independent of thread count"
    );
}
