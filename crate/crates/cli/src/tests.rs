use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{Map, Value};

use super::*;

fn parse(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("chronoq").chain(args.iter().copied())).expect("valid arguments")
}

fn parse_err(args: &[&str]) -> clap::Error {
    Cli::try_parse_from(std::iter::once("chronoq").chain(args.iter().copied())).expect_err("invalid arguments")
}

fn report(args: &[&str]) -> Report {
    run(&parse(args)).expect("command runs")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&render(&report(args), Format::Json)).expect("valid JSON")
}

#[test]
fn defaults_and_seed_from_environment() {
    std::env::remove_var("CHRONOQ_SEED");
    let cli = parse(&["chain", "demo"]);
    assert_eq!((cli.seed, cli.trials, cli.tol), (42, 100_000, None));
    assert_eq!(cli.format(), Format::Table);
    std::env::set_var("CHRONOQ_SEED", "9");
    assert_eq!(parse(&["chain", "demo"]).seed, 9);
    assert_eq!(parse(&["--seed", "3", "chain", "demo"]).seed, 3);
    std::env::remove_var("CHRONOQ_SEED");
}

#[test]
fn global_flags_after_the_subcommand() {
    let cli = parse(&["game", "monty-classic", "--strategy", "stick", "--csv", "--trials", "10"]);
    assert_eq!(cli.format(), Format::Csv);
    assert_eq!(cli.trials, 10);
    assert_eq!(parse(&["swap", "--json"]).format(), Format::Json);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["--json", "--csv", "swap"],
        &["--trials", "0", "swap"],
        &["--tol", "-1", "swap"],
        &["--tol", "nan", "swap"],
        &["game", "monty-classic", "--strategy", "maybe"],
        &["chain", "tamper", "--op", "w"],
    ] {
        let e = parse_err(args);
        assert_eq!(e.exit_code(), 2, "{args:?}");
    }
    assert_eq!(parse_err(&[]).kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand);
}

#[test]
fn invalid_arguments_exit_with_two() {
    for args in [
        &["consensus", "run", "--nodes", "1"][..],
        &["consensus", "run", "--noise", "1.5"],
        &["state", "ghz", "--qubits", "1"],
        &["game", "pbr-epistemic", "--q", "1"],
        &["game", "pbr-epistemic", "--split", "1/4,1/4"],
        &["chain", "demo", "--records", "00,2"],
        &["gleason", "roundtrip", "--dim", "1"],
    ] {
        let err = run(&parse(args)).expect_err("rejected");
        assert_eq!(err.exit_code(), 2, "{args:?}");
        assert_eq!(err.to_json()["error"]["code"], "INVALID_ARGUMENT", "{args:?}");
        assert!(execute(&parse(args)) == 2);
    }
}

#[test]
fn chain_demo_example() {
    let v = json(&["chain", "demo", "--records", "00,10,11"]);
    assert_eq!(v["command"], "chain demo");
    assert_eq!(v["result"]["records"], "001011");
    assert_eq!(v["result"]["valid"], true);
    assert_eq!(v["pass"], true);
    assert_eq!(execute(&parse(&["--out", "/dev/null", "chain", "demo"])), 0);
}

#[test]
fn consensus_run_example() {
    let v = json(&["consensus", "run", "--nodes", "4", "--rounds", "1000", "--dishonest", "0"]);
    assert_eq!(v["result"]["pass_rate"], 1.0);
    assert_eq!(v["result"]["passes"], 1000);
    assert_eq!(v["pass"], true);
}

#[test]
fn monty_teleport_example() {
    let r = report(&["--seed", "7", "--trials", "100000", "game", "monty-teleport", "--strategy", "switch"]);
    assert!(r.pass);
    assert_eq!(r.result["analytic_exact"], "3/8");
    let csv = render(&r, Format::Csv);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(csv.contains("analytic_exact,3/8"));
    assert!(csv.contains("game,monty-teleport"));
}

#[test]
fn werner_csv_has_one_row_per_point() {
    let r = report(&["entangle", "werner", "--points", "11"]);
    assert!(r.pass);
    let csv = render(&r, Format::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("f,pt_min,"));
}

#[test]
fn table_lists_checks_and_verdict() {
    let text = render(&report(&["--trials", "20000", "game", "all"]), Format::Table);
    assert!(text.starts_with("game all  (seed 42, trials 20000)"));
    assert!(text.contains("monty-ignorant"));
    assert!(text.contains("overall: PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn tolerance_override_applies_to_deterministic_checks() {
    let r = report(&["--tol", "0", "lg", "k3", "--tau", "0.5"]);
    let check = &r.checks[0];
    assert_eq!(check.tolerance, Some(0.0));
    assert_eq!(r.config.tol, Some(0.0));
}

#[test]
fn failing_check_exits_with_one() {
    // Reconstruction carries rounding error, so a zero tolerance fails.
    let cli = parse(&["--tol", "0", "--out", "/dev/null", "gleason", "roundtrip", "--dim", "3", "--samples", "5", "--frames", "0"]);
    assert!(!run(&cli).unwrap().pass);
    assert_eq!(execute(&cli), 1);
}

#[test]
fn same_config_gives_identical_json() {
    let args = ["--trials", "3000", "--seed", "5", "game", "all"];
    assert_eq!(render(&report(&args), Format::Json), render(&report(&args), Format::Json));
    let other = ["--trials", "3000", "--seed", "6", "game", "all"];
    assert_ne!(render(&report(&args), Format::Json), render(&report(&other), Format::Json));
}

/// Minimal JSON Schema check: `type`, `required`, `properties`, `items`, `enum`, `minimum`,
/// `additionalProperties: false` and local `$ref`.
fn validate(v: &Value, schema: &Value, root: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return validate(v, &root["$defs"][name], root, path, errors);
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            errors.push(format!("{path}: {v} is not {types:?}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            errors.push(format!("{path}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object).cloned().unwrap_or_default();
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(key.as_str().unwrap_or_default()) {
                errors.push(format!("{path}: missing `{key}`"));
            }
        }
        for (k, child) in obj {
            match props.get(k) {
                Some(s) => validate(child, s, root, &format!("{path}.{k}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}: unexpected `{k}`"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            validate(child, items, root, &format!("{path}[{i}]"), errors);
        }
    }
}

fn schema(name: &str) -> Value {
    let text = match name {
        "report" => include_str!("../schemas/report.schema.json"),
        "state" => include_str!("../schemas/state.schema.json"),
        "entangle" => include_str!("../schemas/entangle.schema.json"),
        "entropy" => include_str!("../schemas/entropy.schema.json"),
        "swap" => include_str!("../schemas/swap.schema.json"),
        "chain" => include_str!("../schemas/chain.schema.json"),
        "consensus" => include_str!("../schemas/consensus.schema.json"),
        "game" => include_str!("../schemas/game.schema.json"),
        "gleason" => include_str!("../schemas/gleason.schema.json"),
        "lg" => include_str!("../schemas/lg.schema.json"),
        other => panic!("no schema {other}"),
    };
    serde_json::from_str(text).expect("schema parses")
}

#[test]
fn reports_match_their_schemas() {
    let cases: &[(&[&str], &str, &str)] = &[
        (&["state", "bell"], "state", "bell"),
        (&["state", "ghz"], "state", "ghz"),
        (&["entangle", "werner"], "entangle", "werner"),
        (&["entangle", "chsh"], "entangle", "chsh"),
        (&["entangle", "concurrence", "--samples", "20"], "entangle", "concurrence"),
        (&["entropy", "codec"], "entropy", "codec"),
        (&["entropy", "uncertainty", "--samples", "20"], "entropy", "uncertainty"),
        (&["swap"], "swap", "swap"),
        (&["swap", "--early"], "swap", "swap"),
        (&["chain", "demo"], "chain", "demo"),
        (&["chain", "tamper"], "chain", "tamper"),
        (&["chain", "contrast"], "chain", "contrast"),
        (&["consensus", "run", "--rounds", "200"], "consensus", "run"),
        (&["consensus", "bounds", "--rounds", "200", "--samples", "2"], "consensus", "bounds"),
        (&["consensus", "admit", "--rounds", "50"], "consensus", "admit"),
        (&["game", "monty-ignorant"], "game", "stats"),
        (&["game", "pbr-epistemic"], "game", "stats"),
        (&["game", "chsh"], "game", "table"),
        (&["game", "all"], "game", "table"),
        (&["game", "teleport"], "game", "teleport"),
        (&["game", "superdense"], "game", "superdense"),
        (&["game", "qkd"], "game", "qkd"),
        (&["gleason", "roundtrip", "--samples", "3", "--frames", "100"], "gleason", "roundtrip"),
        (&["lg", "k3", "--points", "4"], "lg", "k3"),
        (&["lg", "temporal-chsh"], "lg", "temporal-chsh"),
        (&["lg", "entropic", "--points", "50"], "lg", "entropic"),
    ];
    let envelope = schema("report");
    for (args, file, def) in cases {
        let mut full = vec!["--trials", "500"];
        full.extend_from_slice(args);
        let v = json(&full);
        let mut errors = Vec::new();
        validate(&v, &envelope, &envelope, "$", &mut errors);
        let s = schema(file);
        validate(&v["result"], &s["$defs"][*def], &s, "$.result", &mut errors);
        assert!(errors.is_empty(), "{args:?}: {errors:#?}");
    }
}

#[test]
fn error_json_shape() {
    let err = CliError::from(chronoq::Error::InvalidArgument("bad".into()));
    let v = err.to_json();
    let keys: Vec<&String> = v["error"].as_object().map(Map::keys).into_iter().flatten().collect();
    assert_eq!(keys, ["code", "message"]);
    assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    assert_eq!(CliError::Sim(chronoq::Error::DecodeMismatch).exit_code(), 1);
}
