use std::process::{Command, Output};

fn flowcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowcat"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = flowcat(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn ground_rows() {
    let three = rows(&stdout(&["ground", "--n", "3"]));
    assert_eq!(three.len(), 10);
    let center = three.iter().find(|r| r[0] == "1" && r[1] == "1").unwrap();
    let p: f64 = center[2].parse().unwrap();
    assert!((p - 2.0 / 9.0).abs() < 1e-15);
    let total: f64 = three.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);

    assert_eq!(rows(&stdout(&["ground", "--n", "30"])).len(), 496);
    let zero = stdout(&["ground", "--n", "0"]);
    assert_eq!(zero, "n_a,n_b,probability\n0,0,1.0000000000000000e0\n");
}

#[test]
fn floats_carry_seventeen_digits() {
    let text = stdout(&["ground", "--n", "2"]);
    for r in rows(&text) {
        let mantissa = r[2].split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{}", r[2]);
    }
}

#[test]
fn cat_tables() {
    for n in ["3", "30"] {
        let text = stdout(&["cat", "--n", n, "--theta-pi", "2/3"]);
        let (dist, summary) = text.split_once("\n\n").unwrap();
        let probs: Vec<f64> = rows(dist).iter().map(|r| r[3].parse().unwrap()).collect();
        let big: Vec<f64> = probs.iter().copied().filter(|&p| p >= 1e-10).collect();
        assert_eq!(big.len(), 3, "N={n}");
        assert!(big.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-10));
        let s = &rows(summary)[0];
        assert!((s[5].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    }
    let text = stdout(&["cat", "--n", "4"]);
    let summary = rows(text.split_once("\n\n").unwrap().1);
    assert!(summary[0][5].parse::<f64>().unwrap() < 1.0);
}

#[test]
fn delta_and_theta_agree() {
    let a = stdout(&["cat", "--n", "6", "--delta", "0"]);
    let b = stdout(&["cat", "--n", "6"]);
    assert_eq!(a, b);
    let c = flowcat(&["cat", "--n", "6", "--delta", "0.1", "--theta-pi", "2/3"]);
    assert_eq!(c.status.code(), Some(2));
}

#[test]
fn sweep_marks_the_comb() {
    let text = stdout(&["cattiness-sweep", "--n", "1:31"]);
    for r in rows(&text) {
        let n: usize = r[0].parse().unwrap();
        let c: f64 = r[5].parse().unwrap();
        if n.is_multiple_of(3) {
            assert!((c - 1.0).abs() < 1e-10, "N={n}");
        } else {
            assert!(c < 1e-3, "N={n}");
        }
    }
}

#[test]
fn timing_emits_fit() {
    let text = stdout(&["timing", "--n", "3:9:3"]);
    let (table, fit) = text.split_once("\n\n").unwrap();
    assert_eq!(rows(table).len(), 3);
    assert!(fit.starts_with("c_target,slope,prefactor\n"));
    assert_eq!(flowcat(&["timing", "--n", "3,4"]).status.code(), Some(3));
}

#[test]
fn fringes_columns_agree() {
    let text = stdout(&[
        "fringes", "--n", "3", "--xi", "0:3", "--grid", "31", "--dt", "0.7",
    ]);
    let table = text.split_once("\n\n").unwrap().0;
    for r in rows(table) {
        for k in 4..7 {
            let a: f64 = r[k].parse().unwrap();
            let b: f64 = r[k + 3].parse().unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
    assert_eq!(
        flowcat(&["fringes", "--n", "5", "--xi", "0:1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn calibration_finds_cat_phase() {
    let text = stdout(&["calibrate-u", "--n", "9", "--grid", "121"]);
    let cal = rows(text.split_once("\n\n").unwrap().1);
    let peak: f64 = cal[0][1].parse().unwrap();
    assert!((peak - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(
        flowcat(&["calibrate-u", "--n", "9", "--theta-pi", "0.1:0.3"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn json_output() {
    let text = stdout(&["cat", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "cat");
    assert_eq!(v["distribution"].as_array().unwrap().len(), 10);
    assert!((v["summary"][0]["cattiness"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ground.csv");
    let out = flowcat(&["ground", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        stdout(&["ground", "--n", "3"])
    );
}

#[test]
fn invalid_configurations_exit_two() {
    let missing = tempfile::tempdir()
        .unwrap()
        .path()
        .join("no/such/dir/out.csv");
    for args in [
        vec!["ground"],
        vec!["ground", "--n", "-1"],
        vec!["cat", "--n", "61"],
        vec!["cat", "--n", "3", "--theta-pi", "x"],
        vec!["cattiness-sweep", "--n", "9:3"],
        vec!["fringes", "--n", "3", "--xi", "2:1"],
        vec!["timing", "--c-target", "1.5"],
        vec!["bogus"],
        vec!["ground", "--n", "3", "--out", missing.to_str().unwrap()],
    ] {
        assert_eq!(flowcat(&args).status.code(), Some(2), "{args:?}");
    }
}
