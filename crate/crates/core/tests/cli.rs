use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_res-kernel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn order_of_xy() {
    let o = run(&["order", "--vars", "x,y", "--ideal", "x*y"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("maxord: 2"), "{s}");
    assert!(s.contains("t_ideal: (x, y)"), "{s}");
    assert!(s.contains("coefficient_ideal: (x^2, x*y, y^2) mark 2"), "{s}");

    let o = run(&["order", "--vars", "x,y", "--ideal", "x*y", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["maxord"], 2);
    assert_eq!(v["coefficient_ideal"]["mark"], 2);
}

#[test]
fn principalize_writes_a_checkable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cusp.json");
    let p = path.to_str().unwrap();
    let o = run(&["principalize", "--vars", "x,y", "--ideal", "y^2 - x^3", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("outcome: principalized after 7 blow-ups"));

    let o = run(&["check-trace", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("ok: "));

    let text = fs::read_to_string(&path).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["nodes"][0]["center"] = serde_json::json!(["x"]);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["check-trace", p, "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accepted"], false);
}

#[test]
fn resolve_curve_reports_the_stage() {
    let o = run(&["resolve-curve", "--vars", "x,y", "--ideal", "y^2 - x^3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"]["embedded_stage"], 4);
    assert_eq!(v["version"], "res-kernel-trace/1");
}

#[test]
fn toric_resolve_from_stdin() {
    let mut child = bin()
        .args(["toric-resolve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"dim 2\n(1,0) (1,2)\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "dim 2\n1,0; 1,1\n1,1; 1,2\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.txt");
    fs::write(&path, "dim 2\n1,0; 1,3\n").unwrap();
    let o = run(&["toric-resolve", path.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["inserted_rays"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    // parse error
    assert_eq!(run(&["order", "--vars", "x,y", "--ideal", "x**"]).status.code(), Some(1));
    // unknown variable
    assert_eq!(run(&["order", "--vars", "x", "--ideal", "y"]).status.code(), Some(1));
    // bad usage
    assert_eq!(run(&["principalize"]).status.code(), Some(1));
    // budget
    let o = run(&["principalize", "--vars", "x,y", "--ideal", "y^2 - x^3", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(3));
    // driver failure
    let o = run(&["principalize", "--vars", "x,y,z", "--ideal", "z^2 - x^3 - y^3"]);
    assert_eq!(o.status.code(), Some(2));
    // malformed fan
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "dim 2\n1,0; 2,0\n").unwrap();
    assert_eq!(run(&["toric-resolve", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn order_reduction_mode() {
    let o = run(&["principalize", "--vars", "x,y", "--ideal", "x*y", "--mark", "2", "--contact", "y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order-reduced"));
}
