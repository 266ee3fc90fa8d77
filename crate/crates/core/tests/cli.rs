use std::process::{Command, Output};

fn opalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opalg")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = opalg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

#[test]
fn golden_outputs() {
    assert_eq!(stdout(&["partitions", "count", "--kind", "NC2", "--k", "8"]), "1430");
    assert_eq!(stdout(&["freeprob", "moments", "--law", "poisson", "--t", "1", "--K", "4"]), "1,2,5,15");
    // (1 - q^2)/(1 - q^3)
    assert_eq!(stdout(&["graph", "t-series", "--ade", "A", "--n", "3", "--order", "6"]), "1,0,-1,1,0,-1,1");
}

#[test]
fn rationals_are_exact() {
    assert_eq!(stdout(&["wg", "integrate", "--cat", "O", "--N", "3", "--rows", "1,1", "--cols", "1,1"]), "1/3");
    assert_eq!(stdout(&["hadamard", "kesten", "--M", "2", "--N", "3", "--p", "2"]), "4");
    assert_eq!(stdout(&["hadamard", "pk", "--fourier", "3", "--k", "3"]), "9");
}

#[test]
fn formats() {
    let csv = stdout(&["--format", "csv", "freeprob", "moments", "--law", "free-poisson", "--K", "3"]);
    assert_eq!(csv, "k,moment\n1,1\n2,2\n3,5");
    let json: serde_json::Value = serde_json::from_str(&stdout(&["--format", "json", "partitions", "list", "--kind", "NC", "--k", "2"])).unwrap();
    assert_eq!(json, serde_json::json!([[[1, 2]], [[1], [2]]]));
    let f = stdout(&["rm", "moments", "--kind", "wigner", "--N", "10", "--k", "2"]);
    let last = f.lines().last().unwrap().split_whitespace().last().unwrap();
    assert_eq!(last.split('e').next().unwrap().len(), 18);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("opalg-cli-{}.txt", std::process::id()));
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["--out", p, "tl", "dim", "--k", "3"]), "");
    assert!(std::fs::read_to_string(&path).unwrap().contains('5'));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(opalg(&["partitions", "count", "--kind", "bogus", "--k", "3"]).status.code(), Some(1));
    assert_eq!(opalg(&["hadamard", "pk", "--fourier", "11", "--k", "2"]).status.code(), Some(1));
    let usage = opalg(&["partitions", "count", "--frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert_eq!(opalg(&["--help"]).status.code(), Some(0));
}

#[test]
fn size_guard_names_itself() {
    let out = opalg(&["hadamard", "pk", "--fourier", "11", "--k", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("guard"));
}

#[test]
fn deterministic_output() {
    let args = ["rm", "haar", "--group", "O", "--N", "3", "--word", "1,1;1,1", "--samples", "500", "--seed", "7"];
    assert_eq!(stdout(&args), stdout(&args));
    let other = ["rm", "haar", "--group", "O", "--N", "3", "--word", "1,1;1,1", "--samples", "500", "--seed", "8"];
    assert_ne!(stdout(&args), stdout(&other));
    let wg = ["wg", "weingarten", "--cat", "P", "--N", "5", "--k", "3"];
    assert_eq!(stdout(&wg), stdout(&wg));
}

#[test]
fn threads_do_not_change_results() {
    let run = |t: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_opalg"))
            .args(["hadamard", "kesten", "--M", "3", "--N", "2", "--p", "4"])
            .env("OPALG_THREADS", t)
            .output()
            .unwrap();
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn reproduce_catalan() {
    let out = stdout(&["reproduce", "catalan"]);
    assert!(out.contains("C_8") && !out.contains("FAIL"));
    assert_eq!(opalg(&["reproduce", "nope"]).status.code(), Some(2));
}
