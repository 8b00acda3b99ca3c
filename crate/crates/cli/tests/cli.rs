//! Exit-code contract of the binary: 0 on success, 1 on check failure,
//! 2 on input errors.

use std::process::Command;

fn copmix(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_copmix")).args(args).output().expect("spawn copmix")
}

#[test]
fn success_paths_exit_zero() {
    for args in [
        vec!["validate", "fgm", "0.5"],
        vec!["rho1", "frechet", "0.3", "0.2"],
        vec!["mix", "fgm", "0.9", "--nmax", "2", "--grid-size", "128"],
        vec!["bound", "derivative", "fgm", "0.5"],
        vec!["bound", "table", "m2"],
        vec!["bound", "beta-sandwich", "mh", "0.9", "--n", "4"],
        vec!["fold", "fgm:0.9", "frechet:0.3,0.2", "--grid-size", "128"],
        vec!["simulate", "mh", "0.5", "--length", "100"],
        vec!["drift", "0.3", "0.2"],
        vec!["arch-root", "example3", "--bracket", "1.01", "2", "--grid-size", "128"],
    ] {
        let out = copmix(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn check_failures_exit_one() {
    // The frozen mixture has no usable envelope: bound 1, not satisfied.
    let out = copmix(&["bound", "envelope", "frechet", "0.6", "0.4", "--grid-size", "128"]);
    assert_eq!(out.status.code(), Some(1));
    // Forcing an unreachable tolerance flips validation to a check failure.
    let out = copmix(&["validate", "m2", "--tol", "1e-15", "--grid-size", "128"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["rho1", "gaussian", "0.5"],
        vec!["validate", "fgm", "1.5"],
        vec!["validate", "fgm"],
        vec!["bound", "nonsense", "fgm", "0.5"],
        vec!["arch-root", "example2", "--bracket", "0.01", "0.1"],
        vec!["drift", "0.5", "0.5"],
        vec!["mix", "fgm", "0.5", "--grid-size", "4"],
    ] {
        let out = copmix(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: stdout {} stderr {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // clap usage errors share the input-error code.
    let out = copmix(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_csv_has_json_header() {
    let out = copmix(&["simulate", "fgm", "0.9", "--length", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# {"), "header line: {header}");
    assert!(header.contains("\"seed\":7"));
    assert_eq!(lines.next().unwrap(), "state");
    assert_eq!(lines.count(), 50);
}

#[test]
fn mix_emits_the_documented_columns() {
    let out = copmix(&["mix", "frechet", "0.3", "0.2", "--nmax", "3", "--grid-size", "128"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n,beta_n,phi_n,rho1_pow_n"));
    assert!(text.contains("\"schema_version\": 1"));
}
