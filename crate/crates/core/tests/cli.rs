use switchmix::cli::{run_with, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("switchmix").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_reversibility_exits_zero() {
    let (code, out, _) = run(&["verify", "reversibility", "--n", "3", "--d", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["header"]["n"], 3);
    assert_eq!(header["header"]["mode"], "exhaustive");
    let report: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(report["failure_count"], 0);
}

#[test]
fn failing_suite_exits_one() {
    let (code, out, err) = run(&["verify", "matching", "--n", "12", "--d", "3", "--trials", "30", "--k", "3", "--seed", "11"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("\"suite\":\"matching\""));
    assert!(err.contains("failed"));
}

#[test]
fn multigraph_enumeration_has_twenty_one_states() {
    let (code, out, _) = run(&["enumerate", "--multigraph", "--n", "3", "--d", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 22);
    let total: num_rational::BigRational = lines[1..]
        .iter()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            v["measure"].as_str().unwrap().parse::<num_rational::BigRational>().unwrap()
        })
        .sum();
    assert_eq!(total, num_rational::BigRational::from_integer(1.into()));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["sample", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "no-such-suite"]).0, EXIT_USAGE);
    assert_eq!(run(&["sample", "--n", "2", "--d", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["mixing", "--eps", "1.5"]).0, EXIT_USAGE);
    assert_eq!(run(&["enumerate", "--n", "4", "--d", "3", "--multigraph", "--cap", "10"]).0, EXIT_USAGE);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("enumerate"));
}

#[test]
fn replay_is_byte_identical() {
    let cases: [&[&str]; 5] = [
        &["sample", "--model", "switch", "--n", "6", "--d", "3", "--trials", "5", "--seed", "9"],
        &["sample", "--model", "configuration", "--n", "8", "--d", "3", "--trials", "5", "--seed", "9"],
        &["connect", "--trials", "10", "--seed", "4"],
        &["extend", "--n", "6", "--d", "2", "--trials", "10", "--samples", "200", "--seed", "2"],
        &["compare", "--trials", "5", "--levels", "3", "--seed", "1"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.0, EXIT_OK, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
    let s1 = run(&["sample", "--trials", "3", "--seed", "1"]).1;
    let s2 = run(&["sample", "--trials", "3", "--seed", "2"]).1;
    assert_ne!(s1, s2);
}

#[test]
fn connect_round_trips_a_tuple_file() {
    let (code, out, _) = run(&["connect", "--trials", "5", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 6);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let t = switchmix::connections::sample_tuple(30, 3, 2, &mut rng).unwrap();
    let line = serde_json::to_string(&switchmix::connections::TupleJson::from(&t)).unwrap();
    let path = std::env::temp_dir().join(format!("switchmix-cli-{}.jsonl", std::process::id()));
    std::fs::write(&path, format!("{line}\n")).unwrap();
    let (code, out, err) = run(&["connect", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.lines().nth(1).unwrap().contains("\"passed\":true"));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("switchmix-out-{}.csv", std::process::id()));
    let (code, out, _) = run(&["spectrum", "--space", "simple", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("# switchmix"));
    assert!(text.contains("3,2,simple,6,"));
}
