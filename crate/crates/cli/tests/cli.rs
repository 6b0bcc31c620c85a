use std::fs;
use std::process::{Command, Output};

fn nflattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nflattice")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariants_for_real_quadratic() {
    let o = nflattice(&["invariants", "--field", "Q(sqrt(2))"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("# nflattice "));
    assert!(out.contains("# seed=1"));
    let row = out.lines().find(|l| l.starts_with("Q(sqrt(2)),")).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    let ndp: f64 = cols[13].parse().unwrap();
    assert!((ndp - 0.3535534).abs() < 1e-7);
    assert!(cols[15].parse::<f64>().unwrap() <= 1e-8);
}

#[test]
fn simulate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let o = nflattice(&[
            "simulate",
            "--field",
            "Q(sqrt(5))",
            "--rate",
            "1",
            "--snr",
            "6:12:3",
            "--trials",
            "400",
            "--seed",
            "99",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("snr_db,trials,errors_nld,errors_ml,pe_nld,pe_ml,mc_sigma,sphere_bound,chernoff_bound"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn ideal_for_imaginary_quadratic() {
    let o = nflattice(&["ideal", "--field", "Q(sqrt(-5))"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let header: Vec<&str> =
        out.lines().find(|l| l.starts_with("field,")).unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "min_ideal").unwrap();
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("Q(sqrt(-5))")).collect();
    // the quoted ideal label holds one comma
    let value = |r: &str, shift: usize| -> f64 { r.split(',').nth(col + shift).unwrap().parse().unwrap() };
    assert!((value(rows[0], 0) - 1.0).abs() < 1e-12);
    assert!((value(rows[1], 1) - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "field = Q(i)\nsnr = 10,20\nrate = 2\n").unwrap();
    let o = nflattice(&["rates", "--config", cfg.to_str().unwrap(), "--snr", "30"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("field=Q(i)"));
    assert!(out.contains("snr=30 "));
    assert!(out.lines().any(|l| l.starts_with("field_awgn_complex,awgn_complex,30.000000,")));
}

#[test]
fn bounds_table() {
    let o = nflattice(&["bounds"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("label,channel,P_db,rate_bits,gap_bits,params"));
    let row = out.lines().find(|l| l.starts_with("odlyzko_limit,")).unwrap();
    let gap: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((gap - 1.9159).abs() < 1e-4);
}

#[test]
fn failures_exit_nonzero() {
    for args in [
        &["invariants", "--field", "Q(sqrt(7))"][..],
        &["simulate", "--field", "Q(i)", "--rate", "40"][..],
        &["simulate", "--field", "Q(i)", "--trials", "0"][..],
        &["simulate", "--field", "Q(i)", "--model", "awgn_real"][..],
        &["rates", "--snr", "a,b"][..],
    ] {
        let o = nflattice(args);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn custom_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.txt");
    fs::write(
        &path,
        "[field]\nname = Q(sqrt(3))\ndegree = 2\nr1 = 2\nr2 = 0\nminpoly = -3, 0, 1\nbasis = 1, 0; 0, 1\ndisc = 12\n",
    )
    .unwrap();
    let o = nflattice(&["invariants", "--catalog", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().any(|l| l.starts_with("Q(sqrt(3)),2,2,0,12,")));

    fs::write(&path, "[field]\nname = X\ndegree = 2\nr1 = 1\nr2 = 1\n").unwrap();
    let o = nflattice(&["invariants", "--catalog", path.to_str().unwrap()]);
    assert!(!o.status.success());
}
