use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn out_dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn ckkslab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckkslab")).arg("--out").arg(out).args(args).output().unwrap()
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn tables_pass_and_write_csv() {
    let d = out_dir("tables");
    let o = ckkslab(&d, &["tables"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = read(d.join("tables.csv"));
    assert!(csv.starts_with("table,name,gop,gmults,gb,reads_gb,writes_gb,key_gb,ai\n"));
    assert!(csv.lines().any(|l| l.starts_with("api,Mult,")));
    assert!(read(d.join("deviations.csv")).lines().skip(1).all(|l| l.ends_with(",true")));

    let o = ckkslab(&d, &["--preset", "best-case", "--format", "json", "tables"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&read(d.join("optimized.json"))).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
}

#[test]
fn sweep_is_deterministic() {
    let (a, b) = (out_dir("sweep_a"), out_dir("sweep_b"));
    assert!(ckkslab(&a, &["sweep"]).status.success());
    assert!(ckkslab(&b, &["sweep"]).status.success());
    for f in ["sweep.csv", "sweep.svg"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f}");
    }
    assert_eq!(read(a.join("sweep.csv")).lines().count(), 11);
}

#[test]
fn search_and_dram_gates() {
    let d = out_dir("search");
    let o = ckkslab(&d, &["search", "--top", "3"]);
    assert!(o.status.success());
    let csv = read(d.join("search.csv"));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("1,40,2,6,"));

    let o = ckkslab(&d, &["dram"]);
    assert!(o.status.success());
    assert_eq!(read(d.join("dram.csv")).lines().count(), 5);
}

#[test]
fn failures_set_the_exit_code() {
    let d = out_dir("errors");
    let o = ckkslab(&d, &["--preset", "nope", "tables"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));
    let o = ckkslab(&d, &["--preset", "toy", "lr-demo"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ckkslab(&d, &["selftest", "--only", "3"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("[PASS] 3."));
}
