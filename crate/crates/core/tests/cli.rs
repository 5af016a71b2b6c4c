use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_domino-cyl"))
}

fn disk(dir: &Path, name: &str, rows: &[&str]) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, rows.join("\n") + "\n").unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn count_prints_the_number_of_tilings() {
    let dir = tempfile::tempdir().unwrap();
    let d44 = disk(dir.path(), "d4x4.txt", &["####"; 4]);
    let d22 = disk(dir.path(), "d2x2.txt", &["##", "##"]);
    let o = run(&["count", "--disk", d44.to_str().unwrap(), "--height", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5051532105");
    let o = run(&["count", "--disk", d22.to_str().unwrap(), "--height", "0"]);
    assert_eq!(stdout(&o), "1");
}

#[test]
fn poly_emits_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let d44 = disk(dir.path(), "d4x4.txt", &["####"; 4]);
    let o = run(&["poly", "--disk", d44.to_str().unwrap(), "--height", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "exponent,coefficient");
    assert_eq!(rows[1], "-4,18");
    assert_eq!(rows[5], "0,4413212553");
    assert_eq!(rows[9], "4,18");

    let out = dir.path().join("p.json");
    let o = run(&[
        "poly",
        "--disk",
        d44.to_str().unwrap(),
        "--height",
        "4",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["count"], "5051532105");
    assert_eq!(v["poly"]["-3"], "15144");
    assert_eq!(v["N"], 4);
}

#[test]
fn checkpoint_resume_gives_the_same_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let d = disk(dir.path(), "d2x3.txt", &["##", "##", "##"]);
    let ck = dir.path().join("run.ckpt");
    let direct = run(&["poly", "--disk", d.to_str().unwrap(), "--height", "30"]);
    let first = run(&[
        "poly",
        "--disk",
        d.to_str().unwrap(),
        "--height",
        "12",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--checkpoint-every",
        "4",
    ]);
    assert!(first.status.success());
    assert!(ck.exists());
    let resumed = run(&[
        "poly",
        "--disk",
        d.to_str().unwrap(),
        "--height",
        "30",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--resume",
    ]);
    assert!(resumed.status.success());
    assert_eq!(stdout(&resumed), stdout(&direct));

    // a checkpoint from another disk is rejected
    let other = disk(dir.path(), "d2x2.txt", &["##", "##"]);
    let o = run(&[
        "poly",
        "--disk",
        other.to_str().unwrap(),
        "--height",
        "30",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--resume",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let bad = disk(dir.path(), "bad.txt", &["###"]);
    let o = run(&["count", "--disk", bad.to_str().unwrap(), "--height", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["count", "--disk", "/nonexistent/disk.txt", "--height", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let d44 = disk(dir.path(), "d4x4.txt", &["####"; 4]);
    let o = run(&[
        "count",
        "--disk",
        d44.to_str().unwrap(),
        "--height",
        "2",
        "--plug-bound",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "components",
        "--disk",
        d44.to_str().unwrap(),
        "--height",
        "3",
        "--enum-bound",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = disk(dir.path(), "d2x3.txt", &["##", "##", "##"]);
    let files: Vec<PathBuf> = (0..2)
        .map(|i| dir.path().join(format!("s{i}.json")))
        .collect();
    for f in &files {
        let o = run(&[
            "sample",
            "--disk",
            d.to_str().unwrap(),
            "--height",
            "6",
            "--samples",
            "20",
            "--seed",
            "7",
            "--out",
            f.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let a = fs::read(&files[0]).unwrap();
    assert_eq!(a, fs::read(&files[1]).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 20);
}

#[test]
fn spectrum_and_stats_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = disk(dir.path(), "d2x3.txt", &["##", "##", "##"]);
    let out = dir.path().join("spec.json");
    let o = run(&[
        "spectrum",
        "--disk",
        d.to_str().unwrap(),
        "--grid",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["lambda1", "gap", "sigma2", "C0", "C1"] {
        assert!(v[key].is_number(), "{key}");
    }
    assert_eq!(v["etaCurve"].as_array().unwrap().len(), 9);

    let out = dir.path().join("hist.csv");
    let o = run(&[
        "stats",
        "--disk",
        d.to_str().unwrap(),
        "--height",
        "40",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("twist,count\n"));
}

#[test]
fn components_reports_census() {
    let dir = tempfile::tempdir().unwrap();
    let d = disk(dir.path(), "d2x3.txt", &["##", "##", "##"]);
    let out = dir.path().join("c.json");
    let o = run(&[
        "components",
        "--disk",
        d.to_str().unwrap(),
        "--height",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["report"]["n_tilings"], 1845);
    assert_eq!(v["report"]["twist_constant"], true);
    assert_eq!(v["census"]["threshold"], 1);
}
