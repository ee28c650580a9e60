use std::path::Path;
use std::process::{Command, Output};

fn qig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qig")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn qubit_inputs(dir: &Path) -> (String, String) {
    (
        write(dir, "d.json", r#"{"dim": 2, "re": [[0.7, 0.0], [0.0, 0.3]], "im": [[0, 0], [0, 0]]}"#),
        write(dir, "a.json", r#"{"dim": 2, "re": [[0, 1], [1, 0]]}"#),
    )
}

#[test]
fn eval_qubit_example() {
    let dir = tempfile::tempdir().unwrap();
    let (d, a) = qubit_inputs(dir.path());
    let cases = [
        ("gamma", "sld", "4.0"),
        ("qcov", "sld", "1.0"),
        ("cov", "sld", "1.0"),
        ("skew", "wy", "0.083484861008832"),
    ];
    for (q, f, want) in cases {
        let o = qig(&["eval", q, "--f", f, "--state", &d, "--a", &a]);
        assert!(o.status.success(), "{o:?}");
        assert_eq!(stdout(&o).trim(), want, "{q} {f}");
    }
    let o = qig(&["eval", "tilde-residual", "--f", "kosaki:0.3", "--state", &d, "--a", &a]);
    assert!(stdout(&o).trim().parse::<f64>().unwrap() < 1e-14);
}

#[test]
fn eval_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let (d, a) = qubit_inputs(dir.path());
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2,\n \"re\": [[1, 0] [0, 1]]}");
    let o = qig(&["eval", "gamma", "--state", &bad, "--a", &a]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line 2"), "{err}");

    let not_state = write(dir.path(), "trace.json", r#"{"dim": 2, "re": [[1, 0], [0, 1]]}"#);
    let o = qig(&["eval", "gamma", "--state", &not_state, "--a", &a]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));

    let o = qig(&["eval", "gamma", "--f", "kosaki:2", "--state", &d, "--a", &a]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_emits_one_line_per_trial() {
    let o = qig(&["verify", "dyn-ucp", "--dim", "3", "--m", "2", "--f", "wy", "--samples", "20", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 21);
    for v in &lines[..20] {
        assert_eq!(v["theorem"], "dyn-ucp");
        assert_eq!(v["f"], "wy");
        assert_eq!(v["c"], 0.125);
        assert_eq!(v["holds"], true);
    }
    assert_eq!(lines[0]["seed"], 7);
    assert_eq!(lines[20]["violations"], 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("wall time"));
}

#[test]
fn verify_exit_code_reports_violations() {
    // A zero tolerance turns round-off in the identity into violations.
    let o = qig(&["verify", "tilde-identity", "--dim", "4", "--samples", "20", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qig(&["verify", "tilde-identity", "--dim", "4", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let o = qig(&["verify", "dyn-ucp", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qig(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = qig(&[
        "verify", "monotone", "--channel-kind", "pinching", "--f", "km", "--samples", "30", "--format", "csv", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theorem,f,g,c,d,dim,m,seed,lhs,rhs,margin,holds,equality_case");
    assert_eq!(lines.count(), 60);
}

#[test]
fn verify_with_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    // Amplitude damping with gamma = 0.36.
    let ch = write(
        dir.path(),
        "ch.json",
        r#"{"in_dim": 2, "out_dim": 2, "kraus": [
            {"dim": 2, "re": [[1, 0], [0, 0.8]]},
            {"dim": 2, "re": [[0, 0.6], [0, 0]]}
        ]}"#,
    );
    let o = qig(&["verify", "monotone", "--channel", &ch, "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"in_dim": 2, "out_dim": 2, "kraus": [{"dim": 2, "re": [[1, 0], [0, 0.8]]}]}"#,
    );
    let o = qig(&["verify", "monotone", "--channel", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace preserving"));
}

#[test]
fn functions_report() {
    let o = qig(&["functions", "--list", "sld,wy,rld,km,kosaki:0.3,tilde(wy)"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with("pass")), "{text}");

    let o = qig(&["functions", "--probe", "xsq", "--format", "json"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(row["function"], "probe:xsq");
    assert_eq!(row["standard"], false);

    let o = qig(&["functions", "--list", "tilde(sld"]);
    assert_eq!(o.status.code(), Some(1));
}
