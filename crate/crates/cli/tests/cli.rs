use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_elliptic_and_quartic() {
    for (file, gamma) in [("elliptic.json", ("1", "1")), ("quartic.json", ("4", "3"))] {
        let path = data(file);
        let out = cmt(&["analyze", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let g = &v["analysis"]["gamma"];
        assert_eq!((g["num"].as_str().unwrap(), g["den"].as_str().unwrap()), gamma);
    }
}

#[test]
fn repeated_factor_names_the_pair() {
    let path = data("biquadratic_imprimitive.json");
    let out = cmt(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("characters 0 and 2 coincide"), "{err}");
}

#[test]
fn bad_input_exit_codes() {
    let dir = std::env::temp_dir().join(format!("cmt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{").unwrap();
    assert_eq!(cmt(&["analyze", broken.to_str().unwrap()]).status.code(), Some(2));

    let odd = dir.join("odd.json");
    std::fs::write(&odd, r#"{"group":{"kind":"abelian","invariants":[3]},"conjugation":1,"factors":[{"phi":[0]}]}"#).unwrap();
    assert_eq!(cmt(&["analyze", odd.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(cmt(&["analyze", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(cmt(&["enumerate"]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_csv_rows() {
    let path = data("quartic.json");
    let out = cmt(&["simulate", path.to_str().unwrap(), "--ell", "5,13"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ell,n,subgroup_order,degree,dim_W,n_W,estimate_decimal,bound_ok");
    assert!(lines[1].starts_with("5,1,625,64,3,4,"));
    assert!(lines[2].starts_with("13,1,28561,1728,3,4,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn enumerate_quartic_family() {
    let out = cmt(&["enumerate", "--abelian", "4", "--up-to-translation", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["summary"]["all_bounds_ok"].as_bool().unwrap());
}

#[test]
fn oracle_agrees() {
    let path = data("quartic.json");
    let out = cmt(&["oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_is_deterministic() {
    let path = data("degenerate_z2xa4.json");
    let p = path.to_str().unwrap();
    let a = cmt(&["analyze", p]);
    let b = cmt(&["--sequential", "analyze", p]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
