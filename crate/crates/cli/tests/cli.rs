use std::path::Path;
use std::process::{Command, Output};

fn mfp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn supervised_db(dir: &Path) {
    let o = mfp(dir, &["gen-db", "--mode", "supervised", "--out", "db.mfpd"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn gen_db_defaults_give_502_records() {
    let dir = tempfile::tempdir().unwrap();
    supervised_db(dir.path());
    assert!(stdout(&mfp(dir.path(), &["gen-db", "--mode", "supervised", "--out", "b.mfpd"]))
        .starts_with("wrote 502 records of length 30"));
    let o = mfp(dir.path(), &["export", "--db", "db.mfpd"]);
    assert!(o.status.success());
    // hash comment, header, one row per record
    assert_eq!(stdout(&o).lines().count(), 2 + 502);
}

#[test]
fn simulated_query_is_matched() {
    let dir = tempfile::tempdir().unwrap();
    supervised_db(dir.path());
    let o = mfp(
        dir.path(),
        &["simulate", "--db", "db.mfpd", "--model", "blatz-ko", "--params", "50", "--out", "q.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mfp(dir.path(), &["match", "--db", "db.mfpd", "--query", "q.csv", "--format", "csv", "--top-k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 3);
    let cells: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(cells[3], "blatz-ko");
    assert!((cells[4].parse::<f64>().unwrap() - 50.0).abs() < 1e-9);
}

#[test]
fn export_reimport_matches_every_row_to_itself() {
    let dir = tempfile::tempdir().unwrap();
    supervised_db(dir.path());
    assert!(mfp(dir.path(), &["export", "--db", "db.mfpd", "--out", "ex.csv"]).status.success());
    let o = mfp(
        dir.path(),
        &["match", "--db", "db.mfpd", "--query", "ex.csv", "--format", "json", "--top-k", "1"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mut n = 0;
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let sim = v["best"]["similarity"].as_f64().unwrap();
        assert!((sim - 1.0).abs() < 1e-12, "{line}");
        let label: usize = v["label"].as_str().unwrap().parse().unwrap();
        let index = v["best"]["index"].as_u64().unwrap() as usize;
        let ties: Vec<u64> = serde_json::from_value(v["ties"].clone()).unwrap();
        assert!(index == label || ties.contains(&(label as u64)) || index < label);
        n += 1;
    }
    assert_eq!(n, 502);
}

#[test]
fn foreign_protocol_query_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    supervised_db(dir.path());
    let o = mfp(
        dir.path(),
        &[
            "fem-run", "--model", "neo-hooke", "--params", "20,10", "--mesh-level", "1", "--steps", "2",
            "--out-query", "plate.csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mfp(dir.path(), &["match", "--db", "db.mfpd", "--query", "plate.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[ProtocolMismatch]"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["match", "--db", "db.mfpd"][..],
        &["gen-db", "--mode", "sideways", "--out", "x"],
        &["frobnicate"],
        &["benchmark", "--db", "x", "--seeds", "many"],
    ] {
        assert_eq!(mfp(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn pipeline_errors_report_their_category() {
    let dir = tempfile::tempdir().unwrap();
    let o = mfp(dir.path(), &["export", "--db", "missing.mfpd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[IoError]"));

    let o = mfp(dir.path(), &["fem-run", "--model", "neo-hooke", "--params", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[InvalidParameters]"));

    std::fs::write(dir.path().join("junk.mfpd"), b"not a database").unwrap();
    let o = mfp(dir.path(), &["export", "--db", "junk.mfpd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[FormatError]"));
}

#[test]
fn benchmark_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    supervised_db(dir.path());
    let args = ["benchmark", "--db", "db.mfpd", "--seeds", "4", "--format", "csv"];
    let a = mfp(dir.path(), &args);
    let b = mfp(dir.path(), &[&args[..], &["--threads", "1"]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    // header, then 5 cases x (1 + 4 + 4) runs
    assert_eq!(stdout(&a).lines().count(), 1 + 45);
}

#[test]
fn fem_run_dumps_fields() {
    let dir = tempfile::tempdir().unwrap();
    let o = mfp(
        dir.path(),
        &[
            "fem-run", "--model", "mooney-rivlin", "--params", "20,10,40", "--mesh-level", "1",
            "--steps", "3", "--format", "csv", "--dump-fields", "fields",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
    for f in ["nodes.csv", "elements.csv", "displacements.csv"] {
        assert!(dir.path().join("fields").join(f).is_file(), "{f}");
    }
}
