use std::process::{Command, Output};

use serde_json::Value;

fn sector(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sector"))
        .args(args)
        .env_remove("SECTOR_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn expand_listings() {
    let out = sector(&["expand", "--alpha", "sqrt:2", "--depth", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let pq: Vec<(String, String)> = rows(&stdout(&out)).into_iter().map(|r| (r[2].clone(), r[3].clone())).collect();
    let want = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)].map(|(p, q)| (p.to_string(), q.to_string()));
    assert_eq!(pq, want);

    let out = sector(&["expand", "--alpha", "e", "--depth", "14"]);
    let a: Vec<String> = rows(&stdout(&out)).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(a.join(" "), "2 1 2 1 1 4 1 1 6 1 1 8 1 1");

    let out = sector(&["expand", "--alpha", "rat:355/113"]);
    let a: Vec<String> = rows(&stdout(&out)).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(a, ["3", "7", "16"]);
}

#[test]
fn area_sawtooth_csv() {
    let out = sector(&["area", "--alpha", "sqrt:2", "--r-max", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    assert!(text.starts_with("r,area,branch_k\n"));
    let rows = rows(&text);
    let branches: Vec<i64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(branches.windows(2).all(|w| w[0] <= w[1]));
    // breakpoints 2, 13, 74, 433, 2523 lie below 3600
    assert_eq!(branches.windows(2).filter(|w| w[0] != w[1]).count(), 5);
    for w in rows.windows(2) {
        let (a, b): (f64, f64) = (w[0][1].parse().unwrap(), w[1][1].parse().unwrap());
        if w[0][2] == w[1][2] {
            assert!(a <= b);
        } else {
            assert!(b < a);
        }
    }
}

#[test]
fn area_for_rational_alpha_vanishes() {
    let out = sector(&["area", "--alpha", "rat:3/2", "--r-max", "60", "--samples", "50"]);
    let rows = rows(&stdout(&out));
    for r in rows.iter().filter(|r| r[0].parse::<f64>().unwrap() > 3.61) {
        assert_eq!(r[1], "0");
        assert_eq!(r[2], "1");
    }
}

#[test]
fn area_for_pi_drops_after_the_large_quotient() {
    let out = sector(&["area", "--alpha", "pi", "--r-max", "400", "--samples", "100"]);
    let rows = rows(&stdout(&out));
    let i = rows.iter().position(|r| r[2] == "3").expect("branch 3 reached");
    let (before, after): (f64, f64) = (rows[i - 1][1].parse().unwrap(), rows[i][1].parse().unwrap());
    // m_3 / M_2 ≈ 0.0034 / 1.06
    assert!(after / before < 0.01, "{before} -> {after}");
}

#[test]
fn limits_for_sqrt2() {
    let out = sector(&["limits", "--alpha", "sqrt:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["period"], serde_json::json!(["2"]));
    assert!(v["C"][0]["value"].as_str().unwrap().starts_with("2.41421356"));
    assert_eq!(v["C"][0]["exact"], "1 + √2");
    assert!(v["mu"]["value"].as_str().unwrap().starts_with("2.000000"));
    assert_eq!(v["mu"]["exact"], "2");
    assert!(v["M"]["value"].as_str().unwrap().starts_with("2.41421356"));
    assert!(v["nu"]["value"].as_str().unwrap().starts_with("0.41421356"));
    assert!(v["m"]["value"].as_str().unwrap().starts_with("0.34314575"));
}

#[test]
fn limits_need_a_periodic_expansion() {
    assert_eq!(sector(&["limits", "--alpha", "e"]).status.code(), Some(4));
}

#[test]
fn bounds_all_hold_for_sqrt3() {
    let out = sector(&["bounds", "--alpha", "sqrt:3", "--depth", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("k,target,lower,value,upper,holds\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 31 * 4);
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn oracle_check_finds_the_axis_point() {
    let out = sector(&["oracle-check", "--alpha", "sqrt:2", "--r-min", "1", "--r-max", "1.2", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("r,theta_cf,theta_exact,best_q,best_p,agree\n"));
    let last = rows(&text).pop().unwrap();
    assert_eq!((last[3].as_str(), last[4].as_str(), last[5].as_str()), ("0", "1", "false"));
    let theta: f64 = last[2].parse().unwrap();
    let expect = 2.0 * (std::f64::consts::FRAC_PI_2 - 2f64.sqrt().atan());
    assert!((theta - expect).abs() < 1e-12);
    assert!((last[1].parse::<f64>().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn discrepancy_scan_for_pi() {
    let out = sector(&["discrepancy-scan", "--alpha", "pi", "--r-min", "10", "--r-max", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let got: Vec<(String, String, Value)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d["r2_lo"].as_str().unwrap().into(), d["r2_hi"].as_str().unwrap().into(), d["oracle_point"].clone()))
        .collect();
    let want = [("185", "281", [4, 13]), ("281", "397", [5, 16]), ("397", "533", [6, 19])]
        .map(|(a, b, p)| (a.to_string(), b.to_string(), serde_json::json!(p)));
    assert_eq!(got, want);
}

#[test]
fn discrepancy_scan_for_phi_is_empty() {
    let out = sector(&["discrepancy-scan", "--alpha", "phi", "--r-min", "r2:5", "--r-max", "100"]);
    assert_eq!(stdout(&out).trim(), "[]");
}

#[test]
fn discrepancy_scan_clips_to_the_window() {
    let out = sector(&["discrepancy-scan", "--alpha", "pi", "--r-min", "15", "--r-max", "17", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("r_lo,r_hi,r2_lo,r2_hi,oracle_q,oracle_p,cf_branch\n"));
    let rows = rows(&text);
    assert_eq!(rows[0][0], "15.000000000000000000");
    assert_eq!(rows[0][2], "");
    assert_eq!(rows[0][3], "281");
    assert_eq!(rows.last().unwrap()[3], "");
}

#[test]
fn output_is_deterministic() {
    let args = ["extrema", "--alpha", "e", "--depth", "12"];
    assert_eq!(sector(&args).stdout, sector(&args).stdout);
    let args = ["area", "--alpha", "sqrt:3", "--format", "json", "--samples", "10"];
    let a = sector(&args);
    assert_eq!(a.stdout, sector(&args).stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v[0].as_object().unwrap().keys().collect::<Vec<_>>(), ["r", "area", "branch_k"]);
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("sector-cli-{}.csv", std::process::id()));
    let out = sector(&["expand", "--alpha", "phi", "--depth", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, "k,a_k,p_k,q_k,c_k\n0,1,1,1,\n1,1,2,1,1\n2,1,3,2,2\n");
}

#[test]
fn precision_comes_from_the_environment() {
    let run = |p: &str| {
        Command::new(env!("CARGO_BIN_EXE_sector"))
            .args(["extrema", "--alpha", "sqrt:2", "--depth", "3", "--digits", "60"])
            .env("SECTOR_PRECISION", p)
            .output()
            .unwrap()
    };
    let (lo, hi) = (run("64"), run("512"));
    assert_eq!(lo.status.code(), Some(0));
    assert_ne!(lo.stdout, hi.stdout);
    assert_eq!(run("32").status.code(), Some(4));
}

#[test]
fn exit_status_for_bad_input() {
    assert_eq!(sector(&["expand", "--alpha", "sqrt:4"]).status.code(), Some(4));
    assert_eq!(sector(&["expand", "--alpha", "nonsense"]).status.code(), Some(4));
    assert_eq!(sector(&["expand"]).status.code(), Some(4));
    assert_eq!(sector(&["area", "--alpha", "e", "--r-max", "abc"]).status.code(), Some(4));
    assert_eq!(sector(&["oracle-check", "--alpha", "e", "--r-max", "20000"]).status.code(), Some(4));
    let out = sector(&["expand", "--alpha", "pi:20", "--depth", "40"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon 7"));
    assert_eq!(sector(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(sector(&["--help"]).status.code(), Some(0));
}
