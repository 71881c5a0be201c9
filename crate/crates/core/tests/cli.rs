use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chaoscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaoscope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lyap1d_summary_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("l.csv");
    let out = chaoscope(&[
        "lyap1d",
        "--param",
        "r=4",
        "--steps",
        "10000",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let printed = line.trim().strip_prefix("lyapunov_exponent,").unwrap();
    assert_eq!(printed.len(), "0.693178".len());

    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "map",
            "r",
            "x0",
            "method",
            "n",
            "epsilon",
            "burn_in",
            "floor_hits",
            "lyapunov"
        ]
    );
    let row = reader.records().next().unwrap().unwrap();
    let value: f64 = row[8].parse().unwrap();
    assert_eq!(format!("{value:.6}"), printed);
    assert!((value - 2f64.ln()).abs() < 0.005);
}

#[test]
fn orbit_rows_and_headers() {
    let out = chaoscope(&["orbit", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,3.6"));

    let henon = chaoscope(&["orbit", "--map", "henon", "--steps", "3"]);
    assert_eq!(stdout(&henon).lines().next(), Some("step,x,y"));

    let empty = chaoscope(&["orbit", "--steps", "0"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty), "step,x\n");
}

#[test]
fn divergent_orbit_keeps_partial_output() {
    let out = chaoscope(&["orbit", "--x0", "1.5", "--steps", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let rows = stdout(&out).lines().count() - 1;
    assert!((1..100).contains(&rows), "{rows} rows");
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["orbit", "--map", "lorenz"][..],
        &["spectrum", "--jacobian-mode", "exact"],
        &["lyap1d", "--map", "henon"],
        &["sweep", "--r-min", "4", "--r-max", "3"],
        &[
            "spectrum", "--map", "henon", "--method", "benettin", "--steps", "101", "--tau", "10",
        ],
        &["teleport"],
        &["orbit", "--steps", "many"],
    ] {
        assert_eq!(chaoscope(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let path = dir.path().join(format!("s{threads}.csv"));
        let out = chaoscope(&[
            "sweep",
            "--r-min",
            "3.6",
            "--r-max",
            "4",
            "--r-step",
            "0.01",
            "--steps",
            "2000",
            "--threads",
            threads,
            "--out",
            path_str(&path),
        ]);
        assert_eq!(out.status.code(), Some(0));
        fs::read(path).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("8"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().next(), Some("r,lyapunov,floor_hits,diverged"));
    assert_eq!(text.lines().count(), 42);
}

#[test]
fn bifurcate_fixed_point() {
    let out = chaoscope(&[
        "bifurcate",
        "--r-min",
        "2",
        "--r-max",
        "2",
        "--samples",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,x"));
    let xs: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 100);
    assert!(xs.iter().all(|x| (x - 0.5).abs() < 1e-6));
}

#[test]
fn spectrum_modes_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# henon, paper convention\nmap=henon\nmethod=qr\nsteps=100000\njacobian-mode=paper-compat\n").unwrap();
    let out = chaoscope(&["spectrum", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "lyapunov_spectrum,0.089576,-1.293549");

    let csv = dir.path().join("s.csv");
    let out = chaoscope(&[
        "spectrum",
        "--config",
        path_str(&cfg),
        "--jacobian-mode",
        "corrected",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("map,a,b,x0,method,jacobian_mode,t,tau,s,seed,lambda_1,lambda_2,det_sum_check")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[5], "corrected");
    let l1: f64 = row[10].parse().unwrap();
    assert!((l1 - 0.418).abs() < 0.002);
}
