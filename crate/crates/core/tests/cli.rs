//! End-to-end checks of the command-line surface: golden table output,
//! report shapes, and the exit-code contract.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-hc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const EXISTENCE_GOLDEN: &str = "k\tp\n1\t-\n2\t3\n3\t7\n4\t3, 5\n5\t31\n6\t3, 7\n7\t127\n8\t3, 5, 17\n9\t7, 73\n10\t3, 11, 31\n";
const PERIODIC_GOLDEN: &str = "k\tp\n1\t-\n2\t3\n3\t-\n4\t-\n5\t-\n6\t-\n7\t-\n8\t3\n9\t7\n10\t-\n";

#[test]
fn existence_table_golden() {
    let out = run(&["table", "existence", "--kmax", "10", "--pmax", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), EXISTENCE_GOLDEN);
}

#[test]
fn periodic_table_golden() {
    let out = run(&["table", "periodic", "--kmax", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), PERIODIC_GOLDEN);
}

#[test]
fn table_kmax_one() {
    let out = run(&["table", "existence", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "k\tp\n1\t-\n");
}

#[test]
fn table_json_round_trips() {
    let out = run(&["table", "existence", "--kmax", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: std::collections::BTreeMap<u32, Vec<u64>> =
        serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed[&4], vec![3, 5]);
    assert_eq!(parsed[&10], vec![3, 11, 31]);
    // re-rendering is idempotent
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(stdout(&out), again);
}

#[test]
fn solve_ti_reports_root_digits() {
    let out = run(&[
        "solve",
        "ti",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--precision",
        "12",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["status"], "solved");
    let digits = report["solutions"][0]["residues"][0]["digits"]
        .as_array()
        .unwrap();
    // z = 4 (mod 9): digits start 1, 1
    assert_eq!(digits[0], 1);
    assert_eq!(digits[1], 1);
    // JSON parses back into the typed report and re-renders identically
    let typed: padic_hc::report::SolveReport = serde_json::from_str(&stdout(&out)).unwrap();
    let re = serde_json::to_string_pretty(&typed).unwrap() + "\n";
    assert_eq!(stdout(&out), re);
}

#[test]
fn solve_periodic_k2_reports_pair() {
    let out = run(&[
        "solve",
        "periodic",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--precision",
        "12",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sols = report["solutions"][0]["residues"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    // z1 = 19 (mod 27): digits 1, 0, 2 -- z2 = 16 (mod 27): digits 1, 2, 1
    let d1 = sols[0]["digits"].as_array().unwrap();
    let d2 = sols[1]["digits"].as_array().unwrap();
    assert_eq!(
        (d1[0].as_u64(), d1[1].as_u64(), d1[2].as_u64()),
        (Some(1), Some(0), Some(2))
    );
    assert_eq!(
        (d2[0].as_u64(), d2[1].as_u64(), d2[2].as_u64()),
        (Some(1), Some(2), Some(1))
    );
}

#[test]
fn solve_dispatch_and_gate_exits() {
    // p = 3, k = 4: existence holds but 3 | k + 2
    let out = run(&["solve", "ti", "--p", "3", "--k", "4", "--lambda", "13"]);
    assert_eq!(out.status.code(), Some(2));
    // lambda = 4 is outside the k = 2 ball
    let out = run(&["solve", "periodic", "--p", "3", "--k", "2", "--lambda", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // p = 3, k = 8: necessary condition holds, existence undecided
    let out = run(&[
        "solve", "periodic", "--p", "3", "--k", "8", "--lambda", "13",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // (5, 4) passes both TI gates and solves
    let out = run(&["solve", "ti", "--p", "5", "--k", "4", "--lambda", "6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn solve_periodic_general_lambda_dependence() {
    // lambda = 8: a genuine period-2 pair exists at (p, k) = (7, 9)
    let out = run(&[
        "solve",
        "periodic",
        "--p",
        "7",
        "--k",
        "9",
        "--lambda",
        "8",
        "--precision",
        "20",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // lambda = exp_7(7): certified no root of U in E_7
    let out = run(&[
        "solve",
        "periodic",
        "--p",
        "7",
        "--k",
        "9",
        "--J",
        "7",
        "--precision",
        "20",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["status"], "no_root_in_ep");
}

#[test]
fn lambda_digit_list_input() {
    // digits 1,1,1 encode 13
    let out = run(&[
        "solve",
        "periodic",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "1,1,1",
        "--precision",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_input_exits_4() {
    let out = run(&["solve", "ti", "--p", "3", "--k", "2", "--lambda", "nope"]);
    assert_eq!(out.status.code(), Some(4));
    // both J and lambda
    let out = run(&[
        "solve", "ti", "--p", "3", "--k", "2", "--lambda", "13", "--J", "3",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // precision below the floor
    let out = run(&[
        "solve",
        "ti",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--precision",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // non-prime p
    let out = run(&["solve", "ti", "--p", "9", "--k", "2", "--lambda", "13"]);
    assert_eq!(out.status.code(), Some(4));
    // missing required flag (structural error)
    let out = run(&["solve", "ti", "--p", "3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cap_exceeded_exits_5() {
    let out = run(&[
        "oracle", "compat", "--p", "3", "--k", "2", "--lambda", "13", "--n", "5",
    ]);
    assert_eq!(out.status.code(), Some(5));
    // an explicit larger cap lets the same volume through
    let out = run(&[
        "oracle",
        "compat",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--n",
        "3",
        "--cap",
        "40",
        "--precision",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oracle_count_reports_honest_counts() {
    let out = run(&[
        "oracle", "count", "--k", "2", "--n", "2", "--format", "json",
    ]);
    // the closed form disagrees with the exact count from depth 2 on
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["omega_count"], "189");
    assert_eq!(report["omega_count_closed_form"], "513");
    assert_eq!(report["closed_form_match"], false);

    let out = run(&[
        "oracle", "count", "--k", "2", "--n", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["omega_count"], "9");
    assert_eq!(report["closed_form_match"], true);
}

#[test]
fn oracle_compat_ti_boundary() {
    let out = run(&[
        "oracle",
        "compat",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--n",
        "2",
        "--boundary",
        "ti",
        "--precision",
        "24",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["min_deviation_valuation"]["valuation"], "inf");
    // constant 1 is not a boundary law
    let out = run(&[
        "oracle",
        "compat",
        "--p",
        "3",
        "--k",
        "2",
        "--lambda",
        "13",
        "--n",
        "2",
        "--boundary",
        "1",
        "--precision",
        "24",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_norms_p7() {
    let out = run(&[
        "oracle",
        "norms",
        "--p",
        "7",
        "--k",
        "3",
        "--lambda",
        "8",
        "--n",
        "1",
        "--precision",
        "16",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["mu_norm_range"][0], "1");
    assert_eq!(report["mu_norm_range"][1], "1");
    assert_eq!(report["normalization_ok"], true);
}

#[test]
fn precision_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-hc"))
        .args([
            "solve", "ti", "--p", "3", "--k", "2", "--lambda", "13", "--format", "json",
        ])
        .env("PADIC_HC_PRECISION", "16")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["solutions"][0]["precision"], 16);
}
