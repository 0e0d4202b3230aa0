mod common;

use std::fs;
use std::process::Command;

use foldcover::LabeledGraph;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_foldcover"))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn build_verify_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "toy.json", common::CASE1_EVEN);
    let out1 = dir.path().join("a.graph");
    let out2 = dir.path().join("b.graph");
    for out in [&out1, &out2] {
        let st = bin().arg("build").arg(&spec).arg("--out").arg(out).status().unwrap();
        assert_eq!(st.code(), Some(0));
    }
    let text = fs::read_to_string(&out1).unwrap();
    assert_eq!(text, fs::read_to_string(&out2).unwrap());
    let g = LabeledGraph::parse_text(&text).unwrap();
    let nmin = (g.vertex_count() - 1) / 2;
    let st = bin().arg("verify").arg(&out1).arg("--spec").arg(&spec).arg("--nstar").arg(nmin.to_string()).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let st = bin().arg("verify").arg(&out1).arg("--spec").arg(&spec).arg("--nstar").arg((nmin + 2).to_string()).status().unwrap();
    assert_eq!(st.code(), Some(4));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "toy.json", common::CASE1_EVEN);
    let per = write(&dir, "per.json", r#"{"genus":1,"boundary":[1,1],"d":[2,2],"w":["x1"],"y":["a1"]}"#);
    let bad = write(&dir, "bad.json", r#"{"genus":1,"boundary":[1,1],"d":[3,2]}"#);
    assert_eq!(bin().arg("build").arg(&per).status().unwrap().code(), Some(3));
    assert_eq!(bin().arg("build").arg(&bad).status().unwrap().code(), Some(2));
    let out = bin().arg("build").arg(&spec).args(["--nstar", "1001"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let junk = write(&dir, "junk.graph", "graph m=2\n");
    assert_eq!(bin().arg("fold").arg(&junk).status().unwrap().code(), Some(2));
}

#[test]
fn seed_override_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "toy.json", common::CASE2);
    let out = dir.path().join("g.graph");
    let st = bin().env("FOLDCOVER_SEED", "9").arg("build").arg(&spec).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
}

#[test]
fn nmin_reports_max() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.json", common::CASE1_EVEN);
    let b = write(&dir, "b.json", common::CASE1_EVEN_B);
    let out = bin().args(["--jobs", "2", "nmin"]).arg(&a).arg(&b).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let vals: Vec<u64> = text
        .lines()
        .filter_map(|l| l.split("n_min=").nth(1))
        .map(|v| v.trim().parse().unwrap())
        .collect();
    let n0: u64 = text.lines().find_map(|l| l.strip_prefix("n0=")).unwrap().parse().unwrap();
    assert_eq!(vals.len(), 2);
    assert_eq!(n0, *vals.iter().max().unwrap());
}

#[test]
fn fold_is_stable_and_dot_exports() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "g.graph", "graph m=3 base=0\nalphabet g=1 nb=2\nedge 0 1 a1\nedge 1 0 b1\nedge 0 2 a1\nedge 2 0 b1\n");
    let f1 = dir.path().join("f1");
    let f2 = dir.path().join("f2");
    assert!(bin().arg("fold").arg(&g).arg("--out").arg(&f1).status().unwrap().success());
    assert!(bin().arg("fold").arg(&f1).arg("--out").arg(&f2).status().unwrap().success());
    assert_eq!(fs::read(&f1).unwrap(), fs::read(&f2).unwrap());
    let dot = bin().arg("dot").arg(&f1).output().unwrap();
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
}

#[test]
fn slopes_command() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "s.txt", "torus 1 s1=1/0 c1=2 s2=0/1 c2=2\n");
    let out = bin().arg("slopes").arg(&f).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d1=2 d2=2"));
    assert!(text.contains("surface 1 d=2"));
}
