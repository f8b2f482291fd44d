use std::fs;
use std::path::PathBuf;
use std::process::Command;

use fcforge::cli::{run, EXIT_BUDGET, EXIT_OK, EXIT_SURPRISE, EXIT_USAGE};
use fcforge::setfam::Family;
use tempfile::TempDir;

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fcforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

const CE: &str = "n=5\n1,2,3\n1,2,4\n3,4,5\n";

#[test]
fn close_prints_the_generated_family() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", "n=3\n1,2\n2,3\n");
    let (code, out, _) = run_cli(&["close", "--gens", g.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "n=3\n-\n1,2\n2,3\n1,2,3\n");
}

#[test]
fn machine_close_output_parses_back() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", CE);
    let (code, out, _) = run_cli(&[
        "--format",
        "machine",
        "close",
        "--gens",
        g.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let body = out.strip_prefix("format=1\n").expect("machine header");
    let fam: Family = body.parse().unwrap();
    assert_eq!(fam.len(), 6);
    assert!(fam.is_union_closed());
}

#[test]
fn verify_reports_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", CE);
    let g = g.to_str().unwrap();

    let (code, out, _) = run_cli(&["verify", "--gens", g, "--c", "2,2,2,2,1", "--recheck"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("FCVerified minK="), "{out}");

    let (code, out, _) = run_cli(&[
        "verify",
        "--gens",
        g,
        "--c",
        "9,7,12,12,8",
        "--expect",
        "counterexample",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("CounterexampleFound K=-16"), "{out}");

    let (code, _, _) = run_cli(&[
        "verify",
        "--gens",
        g,
        "--c",
        "9,7,12,12,8",
        "--expect",
        "fc",
    ]);
    assert_eq!(code, EXIT_SURPRISE);

    let (code, _, _) = run_cli(&[
        "verify",
        "--gens",
        g,
        "--c",
        "2,2,2,2,1",
        "--expect",
        "counterexample",
    ]);
    assert_eq!(code, EXIT_SURPRISE);
}

#[test]
fn input_errors_exit_with_usage_status() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.fam", "n=3\n1,x\n");
    let (code, _, err) = run_cli(&["close", "--gens", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 2"), "{err}");

    let g = write(&dir, "g.fam", CE);
    let (code, _, err) = run_cli(&["verify", "--gens", g.to_str().unwrap(), "--c", "1,1"]);
    assert_eq!(code, EXIT_USAGE, "{err}");

    let (code, _, _) = run_cli(&["no-such-command"]);
    assert_eq!(code, EXIT_USAGE);

    let (code, _, _) = run_cli(&["close", "--gens", "/nonexistent/file.fam"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn small_budget_exits_with_budget_status() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", CE);
    let (code, out, _) = run_cli(&[
        "--budget",
        "5",
        "min-k",
        "--gens",
        g.to_str().unwrap(),
        "--c",
        "1,1,1,1,1",
    ]);
    assert_eq!(code, EXIT_BUDGET, "{out}");
}

#[test]
fn find_c_prints_a_certificate_line() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", CE);
    let (code, out, _) = run_cli(&[
        "--format",
        "machine",
        "find-c",
        "--gens",
        g.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("format=1"));
    assert!(lines.next().unwrap().starts_with("FC n=5 c="));

    let lb = write(&dir, "lb.fam", "n=6\n1,2,3\n1,2,4\n3,5,6\n");
    let (code, out, _) = run_cli(&["find-c", "--gens", lb.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("NOTFC n=6 probes="), "{out}");
}

#[test]
fn bounds_subcommands() {
    assert_eq!(
        run_cli(&["bounds", "dj", "--n", "6", "--k", "5", "--r", "1"])
            .1
            .trim(),
        "1"
    );
    assert_eq!(
        run_cli(&["bounds", "window", "--r", "4", "--n", "9", "--w", "7"])
            .1
            .trim(),
        "-1/10"
    );
    assert_eq!(
        run_cli(&["bounds", "pigeonhole", "--k", "3", "--n", "7", "--m", "6"])
            .1
            .trim(),
        "k=3 n=6 m=4"
    );
    let (code, _, _) = run_cli(&["bounds", "window", "--r", "8", "--n", "9", "--w", "7"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn catalog_commands() {
    let (code, out, _) = run_cli(&["catalog", "verify", "--id", "thm1f"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("thm1f FCVerified"), "{out}");

    let (code, out, _) = run_cli(&["catalog", "list"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().count() >= 20);

    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.fam", "n=9\n2,4,6\n2,4,7\n2,6,7\n");
    let (code, out, _) = run_cli(&["catalog", "detect", "--family", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("fc34 "), "{out}");
}

#[test]
fn vcj_echoes_its_seed() {
    let (code, out, _) = run_cli(&["vcj", "--n", "6", "--samples", "200", "--seed", "42"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("seed=42"), "{out}");
    assert!(out.contains("violations=0"), "{out}");
}

#[test]
fn binary_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.fam", CE);
    let out = Command::new(env!("CARGO_BIN_EXE_fcforge"))
        .args(["--format", "machine", "probe-compare", "--gens"])
        .arg(&g)
        .args(["--c", "9,7,12,12,8"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("format=1\n"), "{text}");
    assert!(text.contains("K=-16"), "{text}");

    let out = Command::new(env!("CARGO_BIN_EXE_fcforge"))
        .args(["close", "--gens", "/nonexistent/file.fam"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("error: "));

    let out = Command::new(env!("CARGO_BIN_EXE_fcforge"))
        .env("FCFORGE_BUDGET", "5")
        .args(["min-k", "--gens"])
        .arg(&g)
        .args(["--c", "1,1,1,1,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_BUDGET));
}
