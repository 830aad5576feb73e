//! End-to-end checks of the command-line surface: verdict printing,
//! exit codes, file outputs, verification.

use agc_cli::{run_cli, EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use std::path::PathBuf;

fn machines(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../machines")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn agc(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["agc".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn atm_run_prints_yes_on_the_worked_input() {
    let (code, out, err) = agc(&["atm-run", &machines("table1.atm"), "000000"]);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    assert_eq!(out.trim(), "Yes");
}

#[test]
fn atm_run_prints_no_on_seven_zeros() {
    let (code, out, _) = agc(&["atm-run", &machines("table1.atm"), "0000000"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "No");
}

#[test]
fn atm_verify_passes_the_bundled_strings() {
    let (code, out, err) = agc(&[
        "atm-verify",
        &machines("table1.atm"),
        "--inputs-file",
        &machines("reference-strings.txt"),
    ]);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    assert!(out.contains("verified 4 inputs, all match"));
}

#[test]
fn tm_verify_small_sweep_passes() {
    let (code, out, _) = agc(&["tm-verify", &machines("div2.tm"), "--all-up-to", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("all match"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let (code, _, err) = agc(&["sm-run", "missing.sm"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("missing.sm"));
}

#[test]
fn malformed_machine_reports_positions() {
    let dir = std::env::temp_dir().join(format!("agc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.sm");
    std::fs::write(&path, "metasignal a 1\nrule a -> a\n").unwrap();
    let (code, _, err) = agc(&["sm-run", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad.sm:2:"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budget_halt_exits_three() {
    let (code, _, err) = agc(&[
        "sm-run",
        &machines("simple.sm"),
        "--max-collisions",
        "1",
    ]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.contains("halted early"));
}

#[test]
fn sm_run_text_output_lists_events() {
    let (code, out, _) = agc(&["sm-run", &machines("simple.sm")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("halt: quiescent"));
    assert!(out.contains("a+b"));
}

#[test]
fn sm_render_writes_svg() {
    let dir = std::env::temp_dir().join(format!("agc-cli-svg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("simple.svg");
    let (code, _, _) = agc(&[
        "sm-render",
        &machines("simple.sm"),
        "--format",
        "svg",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let svg = std::fs::read_to_string(&out_path).unwrap();
    assert!(svg.starts_with("<svg "));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tm_compile_round_trips_through_the_machine_format() {
    let (code, out, _) = agc(&["tm-compile", &machines("div2.tm"), "01"]);
    assert_eq!(code, EXIT_OK);
    let (sm, cfg) = agc::parse_machine_text(&out).unwrap();
    assert_eq!(sm.metasignals().len(), 17);
    assert!(cfg.len() >= 5);
}

#[test]
fn middle_machine_runs_quiescent() {
    let (code, out, _) = agc(&["sm-run", &machines("middle.sm"), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let d = agc::export::import_diagram(&out).unwrap();
    assert_eq!(d.first_birth_of("Middle").unwrap().x, agc::Rational::int(3));
    assert_eq!(
        d.first_birth_of("Middle").unwrap().t,
        agc::rat(13, 4)
    );
}

#[test]
fn stats_reports_the_formula() {
    let (code, out, _) = agc(&["stats", &machines("div2.tm")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("meta-signals: 17"));
    assert!(out.contains("predicted 2|Q|+|G|+5: 17 (exact)"));
    let (code, out, _) = agc(&["stats", &machines("table1.atm"), "00"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("static depth: 2"));
    assert!(out.contains("branch bound 2^(d-1): 2"));
}

#[test]
fn tm_run_prints_the_interpreter_outcome() {
    let (code, out, _) = agc(&["tm-run", &machines("div2.tm"), "00"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Accept in state qtrue1"));
}

/// Verify exits zero exactly when every verdict pair matches: inject a
/// lying interpreter outcome and a doctored result list and check both
/// sides of the mapping.
#[test]
fn verify_mismatch_injection_flips_the_exit_code() {
    use agc::tm::{run_tm_direct, Verdict};
    use agc_cli::{verification_exit_code, verify_tm_against, VerifyOutcome};

    let text = std::fs::read_to_string(machines("div2.tm")).unwrap();
    let agc::frontend::FrontendMachine::Tm(tm) =
        agc::frontend::parse_frontend_text(&text, agc::frontend::FrontendKind::Tm).unwrap()
    else {
        unreachable!()
    };
    let limits = agc::RunLimits::default();
    let honest = run_tm_direct(&tm, "0", 1000).unwrap();
    assert!(matches!(
        verify_tm_against(&tm, "0", &limits, &honest),
        VerifyOutcome::Match
    ));
    let mut lying = honest.clone();
    lying.verdict = Verdict::Accept;
    lying.final_state = "qtrue1".into();
    let outcome = verify_tm_against(&tm, "0", &limits, &lying);
    assert!(matches!(outcome, VerifyOutcome::Mismatch(_)));

    let inputs = vec!["0".to_string(), "00".to_string()];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = verification_exit_code(
        &inputs,
        &[outcome, VerifyOutcome::Match],
        &mut out,
        &mut err,
    );
    assert_eq!(code, EXIT_MISMATCH);
    let all_good = verification_exit_code(
        &inputs,
        &[VerifyOutcome::Match, VerifyOutcome::Match],
        &mut out,
        &mut err,
    );
    assert_eq!(all_good, EXIT_OK);
}

/// Inputs outside the machine alphabet make the oracle itself fail:
/// that is a usage error, not a mismatch.
#[test]
fn oracle_error_is_a_usage_error() {
    let (code, _, err) = agc(&["tm-verify", &machines("div2.tm"), "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("verification failed"));
}
