use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb-count"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and numeric rows of a CSV document, skipping the `#` preamble.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn csv_is_bit_stable() {
    let args = ["variance-curve", "--ensemble", "mittag_leffler", "--param", "b=1.5", "--param", "c=0.5", "--n", "200"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn preamble_echoes_config() {
    let o = run(&["edge-profile", "--beta", "4", "--n", "60", "--grid", "-1:1:3"]);
    let text = stdout(&o);
    for key in ["# ensemble = ginibre", "# beta = 4", "# n = 60", "# regime = edge", "# grid = -1:1:3", "# trials = 0"] {
        assert!(text.contains(key), "missing {key:?} in\n{text}");
    }
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["S", "a", "V_N", "scaled_V", "prediction"]);
    // S = 0: (2/√π) f(0) = 1/√π
    let mid = &rows[1];
    assert_eq!(mid[0], 0.0);
    assert!((mid[4] - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
}

#[test]
fn json_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("scan.json");
    let csv_path = dir.path().join("scan.csv");
    let common = ["origin-profile", "--ensemble", "product", "--param", "m=2", "--n", "30", "--grid", "0.1:2:5:log"];
    let mut a: Vec<&str> = common.to_vec();
    a.extend(["--format", "json", "--out", json_path.to_str().unwrap()]);
    assert!(run(&a).status.success());
    let mut b: Vec<&str> = common.to_vec();
    b.extend(["--out", csv_path.to_str().unwrap()]);
    assert!(run(&b).status.success());

    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let (header, rows) = parse_csv(&std::fs::read_to_string(&csv_path).unwrap());
    let cols: Vec<String> = serde_json::from_value(doc["columns"].clone()).unwrap();
    let json_rows: Vec<Vec<f64>> = serde_json::from_value(doc["rows"].clone()).unwrap();
    assert_eq!(cols, header);
    for (x, y) in json_rows.iter().flatten().zip(rows.iter().flatten()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    assert_eq!(doc["curve"]["regime"], "origin");
    assert_eq!(doc["config"]["ensemble"]["params"]["m"], "2");
}

#[test]
fn origin_ginibre_symplectic_mean() {
    let (_, rows) = parse_csv(&stdout(&run(&[
        "origin-profile", "--beta", "4", "--n", "250", "--grid", "0.5:2:4",
    ])));
    for r in rows {
        let t = r[0];
        let want = t * t - 0.25 * (1.0 - (-4.0 * t * t).exp());
        assert!((r[4] - want).abs() < 1e-12);
    }
}

#[test]
fn monte_carlo_columns_only_with_trials() {
    let base = ["variance-curve", "--n", "20", "--grid", "0.3:0.6:2"];
    let (h0, _) = parse_csv(&stdout(&run(&base)));
    assert!(!h0.iter().any(|c| c.starts_with("mc_")));
    let mut with: Vec<&str> = base.to_vec();
    with.extend(["--trials", "200", "--seed", "9"]);
    let (h1, rows) = parse_csv(&stdout(&run(&with)));
    assert_eq!(&h1[h1.len() - 2..], ["mc_V", "mc_V_se"]);
    assert!(rows.iter().all(|r| r[r.len() - 1] > 0.0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# weak edge run\nensemble = trunc_weak\nc = 5\nn = 100\ngrid = 0:10:3\n").unwrap();
    let o = run(&["edge-profile", "--config", cfg.to_str().unwrap(), "--n", "120"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# n = 120") && text.contains("# regime = weak_edge"));
}

#[test]
fn tabulated_potential() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("g.txt");
    // Ginibre at β = 2: g(r) = r²
    let body: String = (1..=400)
        .map(|i| {
            let r = i as f64 * 0.01;
            format!("{r} {}\n", r * r)
        })
        .collect();
    std::fs::write(&table, body).unwrap();
    let file = format!("file={}", table.display());
    let o = run(&["variance-curve", "--ensemble", "tabulated", "--param", &file, "--n", "20", "--grid", "0.3:0.7:2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = parse_csv(&stdout(&o));
    let (_, exact) = parse_csv(&stdout(&run(&["variance-curve", "--n", "20", "--grid", "0.3:0.7:2"])));
    for (r, e) in rows.iter().zip(&exact) {
        assert!((r[1] - e[1]).abs() < 1e-4 * e[1], "{} vs {}", r[1], e[1]);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["variance-curve", "--beta", "3"]).status.code(), Some(2));
    assert_eq!(run(&["variance-curve", "--grid", "1:0:3"]).status.code(), Some(2));
    assert_eq!(run(&["variance-curve", "--trials", "5"]).status.code(), Some(2));
    assert_eq!(run(&["origin-profile", "--ensemble", "trunc_weak", "--param", "c=1"]).status.code(), Some(2));
    assert_eq!(run(&["variance-curve", "--frobnicate"]).status.code(), Some(2));
    // the scan leaves the droplet: radius below zero
    assert_eq!(run(&["edge-profile", "--n", "2", "--grid", "0:5:3"]).status.code(), Some(3));
}

#[test]
fn verify_quick_and_negative_control() {
    let ok = run(&["verify"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let text = stdout(&ok);
    assert!(!text.contains('\x1b'));
    assert!(text.lines().filter(|l| l.starts_with("criterion")).all(|l| l.contains("PASS")));
    let bad = run(&["verify", "--negative-control"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}
