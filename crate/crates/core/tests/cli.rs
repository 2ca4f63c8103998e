use std::path::Path;
use std::process::{Command, Output};

use mbqc_channel::experiment::{ChiReport, ClusterReport};
use tempfile::tempdir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbqc-channel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn report_at(path: &Path) -> ChiReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn phase_identity_has_unit_fidelity() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("chi.json");
    run_ok(&[
        "channel",
        "--mode",
        "phase",
        "--gamma",
        "0",
        "--engine",
        "mbqc",
        "--out",
        path.to_str().unwrap(),
    ]);
    let report = report_at(&path);
    assert!((report.process_fidelity - 1.0).abs() < 1e-9);
    assert!(report.bootstrap_sigma.is_none());
    assert_eq!(report.branch_probabilities.len(), 32);
    report.chi().unwrap();
}

#[test]
fn beta_point_same_chi_on_both_engines() {
    let dir = tempdir().unwrap();
    let mut reports = Vec::new();
    for engine in ["mbqc", "kraus"] {
        let path = dir.path().join(format!("{engine}.json"));
        run_ok(&[
            "channel",
            "--mode",
            "beta",
            "--alpha",
            "0.3",
            "--beta",
            "1.2",
            "--engine",
            engine,
            "--out",
            path.to_str().unwrap(),
        ]);
        reports.push(report_at(&path));
    }
    for i in 0..4 {
        for j in 0..4 {
            assert!((reports[0].chi_real[i][j] - reports[1].chi_real[i][j]).abs() < 1e-9);
            assert!((reports[0].chi_imag[i][j] - reports[1].chi_imag[i][j]).abs() < 1e-9);
        }
    }
}

#[test]
fn noisy_sampled_run_reports_sigma() {
    let text = run_ok(&[
        "channel",
        "--mode",
        "amplitude",
        "--gamma",
        "0.5",
        "--noise-v",
        "0.6053",
        "--shots",
        "10000",
        "--seed",
        "3",
    ]);
    let report: ChiReport = serde_json::from_str(&text).unwrap();
    assert!(report.process_fidelity < 1.0);
    assert!(report.bootstrap_sigma.unwrap() > 0.0);
    let chi = report.chi().unwrap();
    assert!(chi.min_eigenvalue() > -1e-8);
}

#[test]
fn channel_csv_lists_sixteen_entries() {
    let rows = csv_rows(&run_ok(&[
        "channel", "--mode", "phase", "--gamma", "1", "--format", "csv",
    ]));
    assert_eq!(rows.len(), 16);
    assert_eq!(&rows[0][0], "I");
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn sweep_rows_and_columns() {
    let text = run_ok(&["sweep", "--mode", "phase"]);
    assert!(text.starts_with("gamma,alpha,beta,s1,s2,label,fidelity,sigma\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert!((row[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    }
    assert_eq!(&rows[0][5], "no-FF");
    assert_eq!(&rows[1][5], "FF");

    let noisy = csv_rows(&run_ok(&[
        "sweep",
        "--mode",
        "amplitude",
        "--noise-v",
        "0.6053",
    ]));
    for pair in noisy.chunks(2) {
        let f: Vec<f64> = pair.iter().map(|r| r[6].parse().unwrap()).collect();
        assert!((f[0] - f[1]).abs() < 0.1);
        assert!(f[0] < 1.0);
    }
}

#[test]
fn beta_sweep() {
    let rows = csv_rows(&run_ok(&[
        "sweep", "--mode", "beta", "--alpha", "0.3", "--betas", "0.4,1.2",
    ]));
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][0], "");
    assert_eq!(&rows[3][2], "1.2");
}

#[test]
fn bloch_limits() {
    let full_phase = csv_rows(&run_ok(&[
        "bloch",
        "--mode",
        "phase",
        "--gamma",
        "1",
        "--samples",
        "50",
    ]));
    assert_eq!(full_phase.len(), 50);
    for r in &full_phase {
        let (x, y): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(x * x + y * y < 1e-9);
    }
    let full_amp = csv_rows(&run_ok(&[
        "bloch",
        "--mode",
        "amplitude",
        "--gamma",
        "1",
        "--samples",
        "50",
    ]));
    for r in &full_amp {
        let v: Vec<f64> = (3..6).map(|k| r[k].parse().unwrap()).collect();
        assert!(v[0].abs() < 1e-9 && v[1].abs() < 1e-9 && (v[2] - 1.0).abs() < 1e-9);
    }
    let none = csv_rows(&run_ok(&[
        "bloch",
        "--mode",
        "amplitude",
        "--gamma",
        "0",
        "--samples",
        "50",
    ]));
    for r in &none {
        for k in 0..3 {
            let (a, b): (f64, f64) = (r[k].parse().unwrap(), r[k + 3].parse().unwrap());
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn cluster_fidelity_reports() {
    let ideal: ClusterReport = serde_json::from_str(&run_ok(&["cluster-fidelity"])).unwrap();
    assert!((ideal.estimated_fidelity - 1.0).abs() < 1e-12);
    let noisy: ClusterReport =
        serde_json::from_str(&run_ok(&["cluster-fidelity", "--noise-v", "0.6053"])).unwrap();
    assert!((noisy.estimated_fidelity - 0.63).abs() < 1e-3 && noisy.gme);
    let weak: ClusterReport =
        serde_json::from_str(&run_ok(&["cluster-fidelity", "--noise-v", "0.4"])).unwrap();
    assert!(!weak.gme);
    let sampled: ClusterReport = serde_json::from_str(&run_ok(&[
        "cluster-fidelity",
        "--noise-v",
        "0.6053",
        "--shots",
        "5000",
    ]))
    .unwrap();
    assert!(sampled.bootstrap_sigma.unwrap() > 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempdir().unwrap();
    let commands: [&[&str]; 3] = [
        &[
            "channel",
            "--mode",
            "amplitude",
            "--gamma",
            "0.25",
            "--noise-v",
            "0.7",
            "--shots",
            "2000",
            "--seed",
            "9",
        ],
        &[
            "sweep",
            "--mode",
            "phase",
            "--noise-v",
            "0.8",
            "--shots",
            "1000",
            "--seed",
            "4",
        ],
        &[
            "bloch",
            "--mode",
            "beta",
            "--alpha",
            "0.3",
            "--beta",
            "1.2",
            "--samples",
            "20",
            "--seed",
            "2",
        ],
    ];
    for (k, args) in commands.iter().enumerate() {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|r| {
                let path = dir.path().join(format!("{k}-{r}"));
                let mut full = args.to_vec();
                full.extend(["--out", path.to_str().unwrap()]);
                run_ok(&full);
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}

#[test]
fn invalid_arguments_exit_2() {
    for args in [
        &["channel", "--mode", "beta", "--gamma", "0.5"][..],
        &["channel", "--mode", "amplitude"],
        &[
            "channel",
            "--mode",
            "amplitude",
            "--gamma",
            "0.5",
            "--alpha",
            "0.1",
        ],
        &["channel", "--mode", "amplitude", "--gamma", "1.5"],
        &[
            "channel",
            "--mode",
            "amplitude",
            "--gamma",
            "0.5",
            "--engine",
            "kraus",
            "--noise-v",
            "0.8",
        ],
        &["channel", "--mode", "sideways", "--gamma", "0.5"],
        &["sweep", "--mode", "phase", "--gammas", "0.2,1.7"],
        &[
            "bloch",
            "--mode",
            "phase",
            "--gamma",
            "0.5",
            "--samples",
            "0",
        ],
        &["cluster-fidelity", "--noise-v", "-1"],
    ] {
        let out = cli(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn empty_postselection_exits_3() {
    // One shot per setting leaves some setting with no postselected events.
    let out = cli(&[
        "channel",
        "--mode",
        "amplitude",
        "--gamma",
        "0.5",
        "--postselect",
        "1",
        "1",
        "--shots",
        "1",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero probability"));
}
