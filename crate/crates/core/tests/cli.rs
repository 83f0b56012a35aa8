//! The command line tool: exit codes, report format and determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deligne")).args(args).output().expect("binary runs")
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn tame_z_and_two() {
    let o = run(&["tame", "--f", "z", "--g", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = lines(&o);
    let cocycle = v.iter().find(|r| r["id"] == "tame.cocycle").unwrap();
    assert_eq!(cocycle["pass"], true);
    let hol = v.iter().find(|r| r["id"] == "tame.holonomy").unwrap();
    assert_eq!(hol["detail"]["target"], "1/2");
    assert!((hol["detail"]["target_value"][0].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v.last().unwrap()["summary"]["pass"], true);
}

#[test]
fn every_record_carries_the_required_fields() {
    for cmd in ["tame", "hermitian", "holonomy", "symbol-fl", "symbol-ll", "bundle", "heisenberg", "period", "obstruction"] {
        let o = run(&[cmd]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", cmd, String::from_utf8_lossy(&o.stdout));
        let v = lines(&o);
        let ids: Vec<&str> = v[..v.len() - 1].iter().map(|r| r["id"].as_str().unwrap()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        for r in &v[..v.len() - 1] {
            for key in ["id", "anchor", "residual", "tolerance", "pass"] {
                assert!(r.get(key).is_some(), "{} lacks {}", cmd, key);
            }
        }
    }
}

#[test]
fn malformed_expression_is_an_input_error() {
    let o = run(&["tame", "--f", "z+*"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(lines(&o)[0]["error"]["kind"], "Parse");
    let o = run(&["holonomy", "--cover", "3,1.0,0.5,1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["tame", "--g", "z-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_with_one() {
    let dir = std::env::temp_dir().join(format!("deligne-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bundle.toml");
    // the metric exponents do not match the transitions
    std::fs::write(
        &path,
        "metric_exponents = [0, 1, 1]\n\n[[transition]]\ni = 0\nj = 1\ng = \"z\"\n\n[[transition]]\ni = 1\nj = 2\ng = \"z\"\n\n[[transition]]\ni = 0\nj = 2\ng = \"z^2\"\n",
    )
    .unwrap();
    let o = run(&["bundle", "--bundle", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    let v = lines(&o);
    assert_eq!(v.iter().find(|r| r["id"] == "bundle.chern_cocycle").unwrap()["pass"], true);
    assert_eq!(v.iter().find(|r| r["id"] == "bundle.connection_transition").unwrap()["pass"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_deterministic_and_can_go_to_a_file() {
    let dir = std::env::temp_dir().join(format!("deligne-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.jsonl"), dir.join("b.jsonl"));
    for p in [&a, &b] {
        let o = run(&["verify-all", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    std::fs::remove_dir_all(&dir).unwrap();
}
