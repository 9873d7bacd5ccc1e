use std::process::{Command, Output};

fn bh_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bh-lab"))
        .args(args)
        .output()
        .expect("spawn bh-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_examples() {
    let o = bh_lab(&["count", "--n", "3", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6 3 3 6\n");
    assert_eq!(
        stdout(&bh_lab(&["count", "--n", "2", "--m", "3"])),
        "4 0 4 0\n"
    );
    assert_eq!(
        stdout(&bh_lab(&["count", "--n", "2", "--m", "0"])),
        "1 1 0 —\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(bh_lab(&["count", "--n", "3"]).status.code(), Some(1));
    assert_eq!(bh_lab(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        bh_lab(&["count", "--n", "40", "--m", "30"]).status.code(),
        Some(2)
    );
    assert_eq!(bh_lab(&["--help"]).status.code(), Some(0));

    let o = bh_lab(&["report", "--m", "2", "--n", "2,4,8", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n > m"));

    let o = bh_lab(&["supnorm", "--n", "4", "--m", "2", "--grid", "16"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_then_supnorm_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("p.json");
    let o = bh_lab(&[
        "gen",
        "--n",
        "3",
        "--m",
        "2",
        "--seed",
        "11",
        "--out",
        poly.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&poly).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 6);

    let from_file = bh_lab(&["supnorm", "--in", poly.to_str().unwrap(), "--seed", "11"]);
    let from_params = bh_lab(&["supnorm", "--n", "3", "--m", "2", "--seed", "11"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_params));
    let est: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    let lb = est["lower_bound"].as_f64().unwrap();
    assert!(lb >= 6f64.sqrt() - 1e-6 && lb <= 6.0 + 1e-9);
    assert_eq!(est["method"], "ascent");
    assert_eq!(est["witness_phases"].as_array().unwrap().len(), 3);

    let grid = bh_lab(&["supnorm", "--in", poly.to_str().unwrap(), "--grid", "64"]);
    let g: serde_json::Value = serde_json::from_str(&stdout(&grid)).unwrap();
    assert!(g["upper_bound"].as_f64().unwrap() >= lb - 1e-9);
}

#[test]
fn ksz_rows() {
    let o = bh_lab(&[
        "ksz",
        "--n",
        "3,5",
        "--m",
        "2",
        "--trials",
        "2",
        "--restarts",
        "4",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,m,seed,trials,sup_estimate,denominator,constant_estimate"
    );
    assert_eq!(lines.len(), 3);
    let all = bh_lab(&[
        "ksz",
        "--n",
        "3",
        "--m",
        "2",
        "--trials",
        "3",
        "--restarts",
        "4",
        "--all",
    ]);
    assert_eq!(stdout(&all).lines().count(), 4);
}

#[test]
fn fit_reproduces_report_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let common = [
        "--m",
        "2",
        "--n",
        "3,5,8,12",
        "--trials",
        "3",
        "--restarts",
        "6",
        "--samples",
        "32",
        "--seed",
        "5",
    ];
    let mut args = vec!["sweep", "--q", "1.0,crit"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", sweep.to_str().unwrap()]);
    assert!(bh_lab(&args).status.success());

    let mut args = vec!["report", "--q", "1.0,crit"];
    args.extend_from_slice(&common);
    let report = stdout(&bh_lab(&args));
    let report_rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(report_rows.len(), 2);

    for (q, row) in ["1.0", "crit"].iter().zip(&report_rows) {
        let fit = stdout(&bh_lab(&[
            "fit",
            "--in",
            sweep.to_str().unwrap(),
            "--m",
            "2",
            "--q",
            q,
        ]));
        let fit_row = fit.lines().nth(1).unwrap();
        let a: f64 = fit_row.split(',').nth(2).unwrap().parse().unwrap();
        let b: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((a - b).abs() <= 1e-12);
        assert_eq!(fit_row, *row);
    }
}

#[test]
fn report_side_outputs_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec.csv");
    let cons = dir.path().join("cons.csv");
    let o = bh_lab(&[
        "report",
        "--m",
        "2",
        "--q",
        "1.0",
        "--n",
        "3,4,6",
        "--trials",
        "2",
        "--restarts",
        "4",
        "--format",
        "json",
        "--records-out",
        rec.to_str().unwrap(),
        "--conservative-out",
        cons.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 1);
    let rec_text = std::fs::read_to_string(rec).unwrap();
    assert!(rec_text.starts_with(
        "m,n,q,trials,seed,coeff_count,coeff_lq,sup_estimate,ratio,constant_estimate\n"
    ));
    assert_eq!(rec_text.lines().count(), 4);
    let cons_text = std::fs::read_to_string(cons).unwrap();
    assert!(cons_text.starts_with("m,n,q,constant_envelope,conservative_ratio\n"));
}

#[test]
fn polarize_check_output() {
    let o = bh_lab(&[
        "polarize-check",
        "--n",
        "3",
        "--m",
        "3",
        "--restarts",
        "4",
        "--samples",
        "32",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let residual: f64 = text
        .lines()
        .find(|l| l.starts_with("diagonal_residual"))
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-9);
    assert_eq!(text.lines().filter(|l| l.starts_with("q ")).count(), 3);
    let get = |key: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(key))
            .unwrap()
            .split_whitespace()
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(get("form_sup") >= get("poly_sup") - 1e-9);
}
