use std::process::{Command, Output};

fn harmsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmsum")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn closed_form_matches_published_s1() {
    let o = harmsum(&["closed-form", "sum(k * H(k)^2, k=0..n)", "--format", "plain"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "1/2*n*(n+1)*H(n+1)^2 - 1/2*(n^2+n-1)*H(n+1) + 1/4*(n-2)*(n+1)\n"
    );
}

#[test]
fn eval_examples() {
    for (expr, n, want) in [
        ("sum(H(k) * H(n-k), k=0..n)", "3", "3\n"),
        ("sum(H(k)^2, k=0..n)", "0", "0\n"),
        ("sum(H(k)^2, k=0..n)", "2", "13/4\n"),
        ("sum(1/k * H(k), k=1..n)", "3", "85/36\n"),
    ] {
        let o = harmsum(&["eval", expr, "--n", n]);
        assert!(o.status.success(), "{expr}: {}", stderr(&o));
        assert_eq!(stdout(&o), want, "{expr} at n={n}");
    }
}

#[test]
fn eval_below_domain_fails() {
    let o = harmsum(&["eval", "sum(1/k * H(n-k), k=1..n)", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n >= 1"));
}

#[test]
fn syntax_errors_report_offset() {
    let o = harmsum(&["closed-form", "sum(k^2 * H(k)^2, k=2..n)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte 20"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unsupported_sums_list_supported_shapes() {
    for expr in ["sum(H(k)^3, k=0..n)", "sum(k * H(k) * H(n-k,2), k=0..n)", "sum(k^0, k=0..n)"] {
        let o = harmsum(&["closed-form", expr]);
        assert_eq!(o.status.code(), Some(3), "{expr}");
        assert!(stderr(&o).contains("supported sums:"), "{expr}");
    }
}

#[test]
fn verify_pass_and_corrupted_fail() {
    let o = harmsum(&["verify", "sum(k^3 * H(k,4), k=0..n)", "--max-n", "25"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "PASS sum(k^3 * H(k,4), k=0..n) n=0..25\n");
    let o = harmsum(&["verify", "sum(H(k)^2, k=0..n)", "--max-n", "5", "--corrupt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL sum(H(k)^2, k=0..n) n=0..5: first mismatch at n=0"));
}

#[test]
fn table_json_is_an_array_of_entries() {
    let o = harmsum(&["table", "--family", "F", "--max-p", "2", "--m", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for (p, e) in entries.iter().enumerate() {
        assert_eq!(e["spec"]["p"], p);
        assert_eq!(e["spec"]["m"], 2);
        assert!(e["closedForm"]["terms"].is_array());
    }
}

fn bench_equal(family: &str, p: &str, n: &str) {
    let o = harmsum(&["bench", "--family", family, "--p", p, "--n", n]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "equal: yes"), "{out}");
    let ops = |label: &str| -> u64 {
        out.lines()
            .find_map(|l| l.strip_prefix(label))
            .and_then(|v| v.trim().parse().ok())
            .unwrap()
    };
    assert!(ops("closed form ops:") < ops("direct sum ops:"), "{out}");
    assert!(stderr(&o).starts_with("timing:"));
}

#[test]
fn bench_r0_at_2000() {
    bench_equal("R", "0", "2000");
}

#[test]
fn bench_s2_at_5000() {
    bench_equal("S", "2", "5000");
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(harmsum(&["--help"]).status.code(), Some(0));
    assert_eq!(harmsum(&[]).status.code(), Some(2));
    assert_eq!(harmsum(&["eval", "sum(H(k)^2, k=0..n)", "--n", "x"]).status.code(), Some(2));
    assert_eq!(harmsum(&["closed-form", "sum(H(k)^2, k=0..n)", "--format", "xml"]).status.code(), Some(2));
}
