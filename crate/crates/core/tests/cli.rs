use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_puiseux")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["expand"]).0, 1);
    assert_eq!(run(&["expand", "--expr", "Y^2 +"]).0, 1);
    assert_eq!(run(&["expand", "--expr", "2*Y^2 - X"]).0, 1);
    assert_eq!(run(&["expand", "--expr", "Y^3"]).0, 2);
    assert_eq!(run(&["expand", "--expr", "Y^2 - X", "--fuel", "0"]).0, 3);
    let (code, _, err) = run(&["expand", "--expr", "Y^2 - X^2*Y^2"]);
    assert_eq!(code, 1);
    assert!(err.contains("not monic"));
}

#[test]
fn json_expansion_of_square_root() {
    let (code, out, _) = run(&["expand", "--expr", "Y^2 - X", "--format", "json", "--order", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let b = &v["branches"][0];
    assert_eq!(v["input"], "Y^2 - X");
    assert_eq!(b["ramification"], 2);
    assert_eq!(b["dimension"], 2);
    assert_eq!(b["algebra"][0]["poly"], "a^2 - 1");
    assert_eq!(b["expansions"][0][0]["exponent"], "1/2");
    assert_eq!(b["expansions"][0][0]["coeff"]["a"], "1");
    assert_eq!(b["expansions"][1][0]["coeff"]["a"], "-1");
}

#[test]
fn input_file_and_first_branch() {
    let path = std::env::temp_dir().join("puiseux_cli_input.txt");
    std::fs::write(&path, "Y^4 - 3*Y^2 + X*Y + X^2\n").unwrap();
    let (code, out, _) = run(&["expand", "--input", path.to_str().unwrap(), "--branches", "first", "--order", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("branch ")).count(), 1);
    assert!(out.contains("(Y + (-b - 1/6)*X + …)"));
}

#[test]
fn pruned_levels_are_hidden() {
    let (_, out, _) = run(&["expand", "--expr", "Y^4 - 3*Y^2 + X*Y + X^2", "--prune-trivial-levels", "--order", "1"]);
    assert!(!out.contains("a: a = 0"));
    assert!(out.contains("b: b^2 - 13/36 = 0"));
}

#[test]
fn verify_splits_normalize() {
    let cusp = ["--expr", "Y^3 - X^2", "--order", "20"];
    let (code, out, _) = run(&[&["verify"][..], &cusp].concat());
    assert_eq!(code, 0);
    assert!(out.contains("product identity mod T^20: ok, roots: 3/3"));
    let (code, out, _) = run(&[&["splits"][..], &cusp].concat());
    assert_eq!(code, 0);
    assert!(out.contains("branch 1 splits branch 1"));
    let (code, out, _) = run(&["normalize", "--expr", "Y^4 - 3*Y^2 + X*Y + X^2", "--pair", "2", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("branch 2 ≅ R^1"));
    assert_eq!(run(&["normalize", "--expr", "Y^2 - X", "--pair", "1", "5"]).0, 1);
}
