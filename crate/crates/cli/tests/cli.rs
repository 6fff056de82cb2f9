use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};

use deldec::bitseq::delete_at;
use deldec::BitSeq;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_deldec"))
        .args(args)
        .env_remove("DELDEC_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn temp_json() -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let k = NEXT.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("deldec-cli-{}-{k}.json", std::process::id()))
}

fn read_json(path: &PathBuf) -> serde_json::Value {
    let v = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    std::fs::remove_file(path).ok();
    v
}

#[test]
fn encode_reference_message() {
    let path = temp_json();
    let o = run(&["encode", "11001010", "--json", path.to_str().unwrap()], None);
    assert!(o.status.success());
    let cw = stdout(&o);
    assert_eq!(cw.len(), 147);
    assert_eq!(cw, deldec::encode(&"11001010".parse().unwrap()).unwrap().to_string());
    let side = read_json(&path);
    assert_eq!(side["f"], serde_json::json!([14, 46, 200]));
    assert_eq!(side["h"], serde_json::json!([2, 15]));
    assert_eq!((side["N1"].as_u64(), side["N2"].as_u64(), side["N"].as_u64()), (Some(25), Some(114), Some(147)));
}

#[test]
fn encode_zero_message() {
    let path = temp_json();
    let o = run(&["encode", "--json", path.to_str().unwrap()], Some("00000000\n"));
    assert!(o.status.success());
    let side = read_json(&path);
    assert_eq!(side["f"], serde_json::json!([0, 0, 0]));
    assert_eq!(side["h"], serde_json::json!([0, 0]));
}

#[test]
fn malformed_input_is_a_usage_error() {
    assert_eq!(run(&["encode", "1012"], None).status.code(), Some(2));
    assert_eq!(run(&["encode", "101"], None).status.code(), Some(2));
    assert_eq!(run(&["bogus"], None).status.code(), Some(2));
}

#[test]
fn corrupt_positions_and_determinism() {
    let cw = deldec::encode(&"11001010".parse().unwrap()).unwrap();
    let o = run(&["corrupt", "--positions", "1,6"], Some(&cw.to_string()));
    assert!(o.status.success());
    assert_eq!(stdout(&o), delete_at(&cw, &[1, 6]).unwrap().to_string());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1,6"));

    let a = run(&["corrupt", "--random", "2", "--seed", "7"], Some(&cw.to_string()));
    let b = run(&["corrupt", "--random", "2", "--seed", "7"], Some(&cw.to_string()));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).len(), 145);

    let o = run(&["corrupt", "--random", "0"], Some(&cw.to_string()));
    assert_eq!(stdout(&o), cw.to_string());
    assert_eq!(run(&["corrupt", "--random", "3"], Some(&cw.to_string())).status.code(), Some(2));
    assert_eq!(run(&["corrupt", "--positions", "1,2,3"], Some(&cw.to_string())).status.code(), Some(2));
}

#[test]
fn seed_falls_back_to_environment() {
    let cw = deldec::encode(&"1011001110".parse().unwrap()).unwrap().to_string();
    let with_env = Command::new(env!("CARGO_BIN_EXE_deldec"))
        .args(["corrupt", "--random", "2", &cw])
        .env("DELDEC_SEED", "11")
        .output()
        .unwrap();
    let with_flag = run(&["corrupt", "--random", "2", "--seed", "11", &cw], None);
    assert_eq!(with_env.stdout, with_flag.stdout);
}

#[test]
fn pipeline_round_trip() {
    let msg = "0110100111010";
    let cw = stdout(&run(&["encode", msg, "--json", "/dev/null"], None));
    for seed in 0..20 {
        let d = stdout(&run(&["corrupt", "--random", "2", "--seed", &seed.to_string()], Some(&cw)));
        let o = run(&["decode", "--n", "13", "--json", "/dev/null"], Some(&d));
        assert!(o.status.success(), "seed {seed}");
        assert_eq!(stdout(&o), msg);
    }
}

#[test]
fn decode_reference_example_directly() {
    let path = temp_json();
    let o = run(
        &[
            "decode",
            "--n",
            "8",
            "--f",
            "14,46,200",
            "--h",
            "2,15",
            "--trace",
            "--json",
            path.to_str().unwrap(),
            "100110",
        ],
        None,
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "11001010");
    let trace = String::from_utf8(o.stderr).unwrap();
    assert!(trace.starts_with("i=1 j=14 d(i,j)=* p_i=p_j\n"));
    assert!(trace.contains("i=2 j=14 d(i,j)=(1,0,0,0,1,0,1) x0=7 x1=28 x2=140"));
    assert!(trace.contains("x0=8 x1=30 x2=144"));
    let rep = read_json(&path);
    assert_eq!(rep["cell"], serde_json::json!([7, 12]));
}

#[test]
fn decode_intact_and_too_short() {
    let msg: BitSeq = "11001010".parse().unwrap();
    let cw = deldec::encode(&msg).unwrap();
    let o = run(&["decode", "--n", "8", "--json", "/dev/null"], Some(&cw.to_string()));
    assert_eq!(stdout(&o), "11001010");
    let o = run(&["decode", "--n", "8", "--force-general-path", "--json", "/dev/null"], Some(&cw.to_string()));
    assert_eq!(stdout(&o), "11001010");
    let short = delete_at(&cw, &[1, 2, 3]).unwrap();
    assert_eq!(run(&["decode", "--n", "8"], Some(&short.to_string())).status.code(), Some(2));
}

#[test]
fn info_reports_layout() {
    let o = run(&["info", "--n", "8", "--json", "/dev/null"], None);
    assert_eq!(stdout(&o), "n=8 N1=25 N2=114 N=147 redundancy=139");
}

#[test]
fn selftest_suites() {
    let path = temp_json();
    let o = run(
        &["selftest", "--suite", "theorem-main", "--n", "8", "--jobs", "2", "--json", path.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS theorem-main n=8"));
    let rep = read_json(&path);
    assert_eq!(rep[0]["counterexamples"], serde_json::json!([]));

    let o = run(&["selftest", "--suite", "roundtrip", "--n", "9", "--trials", "1", "--json", "/dev/null"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["selftest", "--suite", "case-identities", "--trials", "200", "--json", "/dev/null"], None);
    assert!(o.status.success());
    assert_eq!(run(&["selftest", "--suite", "theorem-main", "--n", "30"], None).status.code(), Some(2));
}
