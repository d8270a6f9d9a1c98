use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;

use optcausal::report::{ConesDoc, DistributionDoc, FalsifyDoc, ReportDoc, ValidationDoc};
use optcausal::text::parse_circuit;
use optcausal::{run, Outcome};
use optcausal_testkit::brute_cones;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("optcausal").chain(args.iter().copied()))
}

fn with_files(circuit: &str, payloads: &str, rest: &[&str]) -> Outcome {
    let (c, p) = (data(circuit), data(payloads));
    let mut args = vec!["--circuit", c.as_str(), "--payloads", p.as_str()];
    args.extend_from_slice(rest);
    cli(&args)
}

fn simulate_json(circuit: &str, payloads: &str) -> DistributionDoc {
    let out = with_files(circuit, payloads, &["--output", "json", "simulate"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn marginal_of_last_axis(doc: &DistributionDoc) -> Vec<f64> {
    let k = doc.axes.last().unwrap().outcomes;
    let mut m = vec![0.0; k];
    for row in &doc.rows {
        m[*row.outcomes.last().unwrap()] += row.probability;
    }
    m
}

#[test]
fn validate_exit_codes() {
    let chain = data("chain.circuit");
    let out = cli(&["--circuit", &chain, "validate"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "valid\n"));

    let out = cli(&["--circuit", &data("cycle.circuit"), "validate"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("cycle"));

    let out = cli(&["--circuit", &data("malformed.circuit"), "validate"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);

    let out = cli(&["--circuit", &data("missing.circuit"), "validate"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("cannot read"));
}

#[test]
fn validate_json_lists_violations() {
    let out = cli(&["--circuit", &data("cycle.circuit"), "--output", "json", "validate"]);
    let doc: ValidationDoc = serde_json::from_str(&out.stdout).unwrap();
    assert!(!doc.valid);
    assert!(doc.violations.iter().any(|v| v.starts_with("cycle")));
}

#[test]
fn cones_of_a_chain() {
    let chain = data("chain.circuit");
    let out = cli(&["--circuit", &chain, "cones", "--node", "T"]);
    assert_eq!(out.stdout, "node: T\npast: P\nfuture: O\n");
    let out = cli(&["--circuit", &chain, "--output", "json", "cones", "--node", "P"]);
    let doc: ConesDoc = serde_json::from_str(&out.stdout).unwrap();
    assert!(doc.past.is_empty());
    assert_eq!(doc.future, ["O", "T"]);
    assert_eq!(cli(&["--circuit", &chain, "cones", "--node", "Q"]).code, 2);
    assert_eq!(cli(&["--circuit", &data("cycle.circuit"), "cones", "--node", "X"]).code, 1);
}

#[test]
fn dag_cones_match_golden_and_path_enumeration() {
    let path = data("dag.circuit");
    let circuit = parse_circuit(&fs::read_to_string(&path).unwrap()).unwrap();
    let mut expected = String::new();
    let mut actual = String::new();
    for node in circuit.nodes() {
        let (past, future) = brute_cones(&circuit, node.id.as_str());
        let list = |s: &std::collections::BTreeSet<String>| {
            if s.is_empty() {
                "(none)".to_string()
            } else {
                s.iter().cloned().collect::<Vec<_>>().join(" ")
            }
        };
        let _ = write!(expected, "node: {}\npast: {}\nfuture: {}\n", node.id, list(&past), list(&future));
        actual.push_str(&cli(&["--circuit", &path, "cones", "--node", node.id.as_str()]).stdout);
    }
    assert_eq!(actual, expected);
    assert_eq!(actual, fs::read_to_string(data("dag.cones.golden")).unwrap());
}

#[test]
fn eigenstate_and_mixed_state_measurements() {
    let eigen = marginal_of_last_axis(&simulate_json("measure.circuit", "eigenstate.json"));
    assert!((eigen[0] - 1.0).abs() <= 1e-12 && eigen[1].abs() <= 1e-12, "{eigen:?}");
    let mixed = marginal_of_last_axis(&simulate_json("measure.circuit", "mixed.json"));
    assert!(mixed.iter().all(|p| (p - 0.5).abs() <= 1e-12), "{mixed:?}");
}

#[test]
fn bell_golden_matches_closed_form() {
    let out = with_files("bell.circuit", "bell.json", &["simulate"]);
    assert_eq!(out.stdout, fs::read_to_string(data("bell.simulate.golden")).unwrap());

    let doc = simulate_json("bell.circuit", "bell.json");
    let names: Vec<&str> = doc.axes.iter().map(|a| a.node.as_str()).collect();
    assert_eq!(names, ["P", "MA", "U", "MB"]);
    let (c, s) = ((PI / 6.0).cos(), (PI / 6.0).sin());
    for row in &doc.rows {
        let (a, b) = (row.outcomes[1], row.outcomes[3]);
        let expected = 0.5 * if a == b { c * c } else { s * s };
        assert!((row.probability - expected).abs() <= 1e-12, "{row:?}");
    }
}

#[test]
fn quantum_demo_passes_no_signaling() {
    for target in ["MA", "MB", "P"] {
        let out = with_files("bell.circuit", "bell.json", &["check", "no-signaling", "--target", target]);
        assert_eq!(out.code, 0, "{target}: {}{}", out.stdout, out.stderr);
        assert!(out.stdout.contains("verdict: pass"));
    }
}

#[test]
fn planted_signal_is_reported() {
    let args = ["--backend", "table", "--output", "json", "check", "no-signaling", "--target", "P"];
    let out = with_files("signaling.circuit", "signaling.json", &args);
    assert_eq!(out.code, 1);
    let doc: ReportDoc = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc.verdict, "fail");
    assert!((doc.max_deviation - 0.2).abs() <= 1e-9);
    assert_eq!(out.stdout, fs::read_to_string(data("signaling.report.golden.json")).unwrap());
    assert_eq!(optcausal::report::to_json(&doc), out.stdout);
}

#[test]
fn loose_tolerance_overrides_the_verdict() {
    let args = ["--backend", "table", "--tol", "0.25", "check", "no-signaling", "--target", "P"];
    let out = with_files("signaling.circuit", "signaling.json", &args);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("tolerance: 2.5e-1"));
}

#[test]
fn check_usage_errors() {
    assert_eq!(with_files("bell.circuit", "bell.json", &["check", "no-signaling"]).code, 2);
    assert_eq!(
        with_files("bell.circuit", "bell.json", &["check", "marginal", "--target", "MB", "--swap", "U"]).code,
        2
    );
    assert_eq!(with_files("bell.circuit", "bell.json", &["check", "bogus"]).code, 2);
    let out = with_files(
        "signaling.circuit",
        "signaling.json",
        &["--backend", "table", "falsify", "--prep", "p", "--test-a", "a", "--test-b", "b", "--test-b-alt", "c"],
    );
    assert_eq!(out.code, 2);
}

#[test]
fn marginal_check_with_named_alternatives() {
    let args = ["check", "marginal", "--target", "MA", "--swap", "MB", "--alternatives", "computational,fourier,z"];
    let out = with_files("bell.circuit", "bell.json", &args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let args = ["check", "marginal", "--target", "MA", "--swap", "MB", "--alternatives", "nope"];
    assert_eq!(with_files("bell.circuit", "bell.json", &args).code, 2);
}

#[test]
fn table_uniqueness_counterexample_fails() {
    let args = ["--backend", "table", "check", "uniqueness", "--system", "S"];
    let out = with_files("signaling.circuit", "signaling.json", &args);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("verdict: fail"));
}

#[test]
fn falsify_reports_forward_dependence() {
    let p = data("falsify.json");
    let args = [
        "--payloads",
        &p,
        "--output",
        "json",
        "falsify",
        "--prep",
        "ket0",
        "--test-a",
        "a",
        "--test-b",
        "b",
        "--test-b-alt",
        "b_x",
        "--test-a-alt",
        "a_x",
    ];
    let out = cli(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc: FalsifyDoc = serde_json::from_str(&out.stdout).unwrap();
    assert!(doc.p_a_zero.iter().all(|p| p.abs() <= 1e-12));
    assert!((doc.forward_dependence - 0.5).abs() <= 1e-12);
    let args = ["--payloads", &p, "falsify", "--prep", "a", "--test-a", "a", "--test-b", "b", "--test-b-alt", "b_x"];
    assert_eq!(cli(&args).code, 2);
}

#[test]
fn output_is_byte_identical_across_runs_and_modes() {
    let args = ["--seed", "7", "--output", "json", "check", "no-signaling", "--target", "MA"];
    let first = with_files("bell.circuit", "bell.json", &args);
    let second = with_files("bell.circuit", "bell.json", &args);
    assert_eq!(first, second);
    let mut parallel = args.to_vec();
    parallel.insert(0, "--parallel");
    assert_eq!(with_files("bell.circuit", "bell.json", &parallel), first);
}

#[test]
fn rewritten_circuit_behaves_identically() {
    let original = data("dag.circuit");
    let circuit = parse_circuit(&fs::read_to_string(&original).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.circuit");
    fs::write(&copy, optcausal::text::write_circuit(&circuit)).unwrap();
    let copy = copy.to_str().unwrap();
    for node in ["v1", "v5"] {
        assert_eq!(
            cli(&["--circuit", copy, "cones", "--node", node]),
            cli(&["--circuit", &original, "cones", "--node", node])
        );
    }
}
