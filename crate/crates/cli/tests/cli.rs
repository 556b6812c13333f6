//! End-to-end tests that drive the compiled `stalg` binary and pin the
//! public contract: stdout payloads, exit codes, and the stderr channel
//! for traces and diagnostics.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use state_algebra::StateVector;
use tempfile::NamedTempFile;

/// The five-definition chain used by the larger proofs.
const CHAIN: &str = "E4 = (E2 -> E3)\n\
                     E5 = (E1 -> E4)\n\
                     E6 = (E1 & E2)\n\
                     E7 = (E6 -> E3)\n\
                     E8 = (E5 -> E7)\n";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stalg"));
    // The test environment must not leak configuration into assertions.
    for (key, _) in std::env::vars() {
        if key.starts_with("STALG_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn run_with(mut cmd: Command, args: &[&str], stdin: &str) -> Output {
    let mut child = cmd
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn stalg");
    child
        .stdin
        .as_mut()
        .expect("stdin handle")
        .write_all(stdin.as_bytes())
        .expect("feed stdin");
    child.wait_with_output().expect("collect output")
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with(bin(), args, stdin)
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("utf8 stdout")
}

fn stderr(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).expect("utf8 stderr")
}

fn rows_file(patterns: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().expect("temp file");
    file.write_all(patterns.as_bytes()).expect("write rows");
    file
}

#[test]
fn count_reports_dimacs_models() {
    let out = run(&["count", "--format", "dimacs"], "p cnf 2 1\n1 2 0\n");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn count_of_a_row_file_multiplies_out_free_positions() {
    let out = run(&["count", "--format", "rows"], "1--\n011\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "5\n");
}

#[test]
fn canon_merges_rows_under_the_default_order() {
    let out = run(&["canon", "--format", "rows"], "11\n10\n01\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1-\n01\n");
}

#[test]
fn canon_order_flag_changes_which_rows_merge() {
    let out = run(
        &["canon", "--format", "rows", "--order", "2,1"],
        "11\n10\n01\n",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "-1\n10\n");

    // Chevron syntax and the default order spell the same permutation.
    let out = run(
        &["canon", "--format", "rows", "--order", "1<2"],
        "11\n10\n01\n",
    );
    assert_eq!(stdout(&out), "1-\n01\n");
}

#[test]
fn canon_resolves_order_tokens_against_formula_names() {
    let out = run(&["canon", "--order", "E2,E1"], "E1 | E2\n");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "-1\n10\n");
}

#[test]
fn compile_output_round_trips_through_the_rows_format() {
    let out = run(&["compile"], "E1 -> E2\n");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let (vector, width) = StateVector::parse_pattern_block(stdout(&out)).expect("parse output");
    assert_eq!(width, 2);
    let (expected, _) = StateVector::parse_pattern_block("11\n0-\n").unwrap();
    assert!(vector.equivalent(&expected));
}

#[test]
fn compile_true_prints_the_unconstrained_row() {
    let out = run(&["compile"], "true\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "-\n");
}

#[test]
fn compile_labels_each_entry_when_there_are_several() {
    let out = run(&["compile"], "E1 -> E2\nE1 & E2\n");
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# 1: "), "missing first header: {text}");
    assert!(text.contains("# 2: "), "missing second header: {text}");
}

#[test]
fn prove_maps_each_verdict_to_its_exit_code() {
    let entailed = run(&["prove", "(E1 & E2) -> E3"], "E1 -> (E2 -> E3)\n");
    assert_eq!(entailed.status.code(), Some(0));
    assert_eq!(stdout(&entailed).lines().next(), Some("entailed"));

    let refuted = run(&["prove", "!E1"], "E1 & E2\n");
    assert_eq!(refuted.status.code(), Some(1));
    assert_eq!(stdout(&refuted).lines().next(), Some("refuted"));

    let contingent = run(&["prove", "E1"], "E1 | E2\n");
    assert_eq!(contingent.status.code(), Some(3));
    assert_eq!(stdout(&contingent).lines().next(), Some("contingent"));

    let unsat = run(&["prove", "E2"], "E1 & !E1\n");
    assert_eq!(unsat.status.code(), Some(4));
    assert_eq!(stdout(&unsat).lines().next(), Some("premise-unsatisfiable"));
}

#[test]
fn prove_discharges_the_definition_chain() {
    let out = run(&["prove", "E8"], CHAIN);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("entailed"));

    let out = run(&["prove", "E5 -> E7"], CHAIN);
    assert_eq!(out.status.code(), Some(0));

    // E5 alone is not settled by definitions: both truth values survive.
    let out = run(&["prove", "E5"], CHAIN);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_input_exits_two_with_a_diagnostic() {
    let out = run(&["prove", "E2"], "E1 ->\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("stalg:"), "stderr: {}", stderr(&out));

    let out = run(&["count", "--format", "dimacs"], "p cnf oops\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn prove_rejects_the_rows_format() {
    let out = run(&["prove", "E1", "--format", "rows"], "1-\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rows input"), "stderr: {}", stderr(&out));
}

#[test]
fn equiv_compares_formula_inputs_as_sets() {
    let a = rows_file("E1 -> E2\n");
    let b = rows_file("!E1 | E2\n");
    let a_path = a.path().to_str().unwrap();
    let b_path = b.path().to_str().unwrap();

    let out = run(&["equiv", a_path, b_path], "");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "equivalent\n");

    let c = rows_file("E2 -> E1\n");
    let out = run(&["equiv", a_path, c.path().to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "inequivalent\n");
}

#[test]
fn oracle_check_agrees_on_a_width_eight_product() {
    let a = rows_file("-111----\n-0-1----\n-100----\n");
    let b = rows_file("1--11---\n0---1---\n1--00---\n");
    let out = run(
        &[
            "oracle-check",
            "product",
            a.path().to_str().unwrap(),
            b.path().to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "agree\n");
}

#[test]
fn oracle_check_refuses_universes_beyond_its_cap() {
    let wide = format!("{}1\n", "-".repeat(24));
    let a = rows_file(&wide);
    let out = run(
        &["oracle-check", "reduce", a.path().to_str().unwrap()],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("oracle-cap"), "stderr: {}", stderr(&out));

    let out = run_with(
        bin(),
        &[
            "oracle-check",
            "reduce",
            "--oracle-cap",
            "25",
            a.path().to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "agree\n");
}

#[test]
fn oracle_check_validates_its_arity() {
    let a = rows_file("1-\n");
    let a_path = a.path().to_str().unwrap();

    let out = run(&["oracle-check", "product", a_path], "");
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["oracle-check", "canon", a_path, a_path], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parallel_mode_keeps_stdout_byte_identical() {
    let sequential = run(&["canon"], CHAIN);
    assert_eq!(sequential.status.code(), Some(0));

    let parallel = run(&["canon", "--parallel"], CHAIN);
    assert_eq!(parallel.status.code(), Some(0));
    assert_eq!(sequential.stdout, parallel.stdout);

    // And a second run reproduces the bytes exactly.
    let again = run(&["canon", "--parallel"], CHAIN);
    assert_eq!(parallel.stdout, again.stdout);
}

#[test]
fn environment_variables_mirror_the_flags() {
    let flagged = run(&["count", "--format", "dimacs"], "p cnf 2 1\n1 2 0\n");

    let mut cmd = bin();
    cmd.env("STALG_FORMAT", "dimacs");
    let via_env = run_with(cmd, &["count"], "p cnf 2 1\n1 2 0\n");
    assert_eq!(via_env.status.code(), Some(0), "stderr: {}", stderr(&via_env));
    assert_eq!(flagged.stdout, via_env.stdout);

    let mut cmd = bin();
    cmd.env("STALG_JSON", "true");
    let json_out = run_with(cmd, &["count", "--format", "dimacs"], "p cnf 2 1\n1 2 0\n");
    assert_eq!(stdout(&json_out), "{\"models\":\"3\"}\n");
}

#[test]
fn json_payloads_have_stable_shapes() {
    let out = run(&["count", "--format", "dimacs", "--json"], "p cnf 2 1\n1 2 0\n");
    let payload: Value = serde_json::from_str(stdout(&out)).expect("count json");
    assert_eq!(payload, json!({"models": "3"}));

    let out = run(&["prove", "--json", "E8"], CHAIN);
    let payload: Value = serde_json::from_str(stdout(&out)).expect("prove json");
    assert_eq!(payload["verdict"], json!("entailed"));
    assert!(payload["witness"].is_string());

    let out = run(&["canon", "--format", "rows", "--json"], "11\n10\n01\n");
    let payload: Value = serde_json::from_str(stdout(&out)).expect("canon json");
    assert_eq!(payload, json!({"width": 2, "rows": ["1-", "01"]}));

    let a = rows_file("E1\n");
    let b = rows_file("E1\n");
    let out = run(
        &[
            "equiv",
            "--json",
            a.path().to_str().unwrap(),
            b.path().to_str().unwrap(),
        ],
        "",
    );
    let payload: Value = serde_json::from_str(stdout(&out)).expect("equiv json");
    assert_eq!(payload, json!({"equivalent": true}));
}

#[test]
fn traces_go_to_stderr_and_never_disturb_stdout() {
    let quiet = run(&["prove", "--json", "E8"], CHAIN);
    assert!(stderr(&quiet).is_empty());

    let traced = run(&["prove", "--json", "--trace", "E8"], CHAIN);
    assert_eq!(quiet.stdout, traced.stdout);
    assert!(stderr(&traced).contains("step"), "stderr: {}", stderr(&traced));

    let reduced = run(&["reduce", "--format", "rows", "--trace"], "11\n11\n");
    assert_eq!(stdout(&reduced), "11x2\n");
    assert!(stderr(&reduced).contains("reduce:"), "stderr: {}", stderr(&reduced));
}
