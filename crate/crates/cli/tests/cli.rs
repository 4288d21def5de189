use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cdl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdl")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

const SMALL: &str = "preset = \"desk\"\nseed = 5\n[system]\ntraining_frames = 10\ntest_vectors = 20\n[sweep]\nsparsities = [1, 3]\nksvd_max_iters = 10\n";

#[test]
fn tables_reproduce_accounting_values() {
    let dir = TempDir::new().unwrap();
    let o = cdl(&["tables", "--out", "t"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("257/512") && stdout.contains("126976"));
    let flops = fs::read_to_string(dir.path().join("t/table3_flops.csv")).unwrap();
    assert!(flops.contains("CDL-OP,64,1600,400,5505024,6815744"));
    assert!(flops.contains("46039040000,85852160000"));
    let dict = fs::read_to_string(dir.path().join("t/table4_dictionary_feedback.csv")).unwrap();
    assert!(dict.contains("64,1,4,16384,4096,12288,1/4") && dict.contains("64,1,32,131072,4096,126976,1/32"), "{dict}");
    let csi = fs::read_to_string(dir.path().join("t/table5_csi_feedback.csv")).unwrap();
    assert!(csi.contains("257/512") && csi.contains("129/512"), "{csi}");
}

#[test]
fn accounting_run_writes_tables_and_manifest() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "a.toml", "experiment = \"accounting_tables\"\nout = \"acc\"\n");
    let o = cdl(&["run", "--spec", &spec], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["table3_flops.csv", "table4_dictionary_feedback.csv", "table5_csi_feedback.csv", "memory_savings.csv"] {
        assert!(dir.path().join("acc").join(f).exists(), "{f}");
    }
    let manifest = fs::read_to_string(dir.path().join("acc/manifest.txt")).unwrap();
    for line in manifest.lines() {
        assert!(line.split_once('=').is_some(), "not key=value: {line}");
    }
    assert!(manifest.contains("experiment=accounting_tables\n") && manifest.contains("preset=paper\n"));
}

#[test]
fn recovery_bound_violation_exits_two() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "bad.toml", "experiment = \"exp1_single_ue_compare\"\npreset = \"desk\"\n[system]\nsparsity = 4\n");
    let o = cdl(&["run", "--spec", &spec], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("N_g > 2S"), "{}", stderr(&o));
    assert!(!dir.path().join("cdl-out").exists());
}

#[test]
fn parse_error_reports_line_and_column() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "p.toml", "experiment = \"exp1_single_ue_compare\"\n[system]\ntaps = \"four\"\n");
    let o = cdl(&["run", "--spec", &spec], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p.toml:3:8"), "{}", stderr(&o));
    let spec = write_spec(dir.path(), "q.toml", "seed = 1\nexperimnt = \"exp4_ber\"\n");
    let o = cdl(&["validate", "--spec", &spec], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q.toml:2:1"), "{}", stderr(&o));
}

#[test]
fn validate_lists_every_violation_in_order() {
    let dir = TempDir::new().unwrap();
    let ok = write_spec(dir.path(), "ok.toml", "experiment = \"exp1_single_ue_compare\"\n");
    let o = cdl(&["validate", "--spec", &ok], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let one = write_spec(dir.path(), "one.toml", "experiment = \"exp2_subcarrier_compare\"\n[system]\ntaps = 40\n");
    let o = cdl(&["validate", "--spec", &one], dir.path());
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.contains("taps_le_subcarriers"));
    let two = write_spec(dir.path(), "two.toml", "experiment = \"exp1_single_ue_compare\"\n[system]\ntaps = 40\nsparsity = 16\n");
    let first = cdl(&["validate", "--spec", &two], dir.path());
    let second = cdl(&["validate", "--spec", &two], dir.path());
    let lines: Vec<String> = String::from_utf8_lossy(&first.stdout).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("taps_le_subcarriers") && lines[1].contains("recovery_bound"));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_file_and_runs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "e.toml", &format!("experiment = \"exp1_single_ue_compare\"\n{SMALL}"));
    for out in ["a", "b"] {
        let o = cdl(&["run", "--spec", &spec, "--out", out, "--seed", "11"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let o = cdl(&["run", "--spec", &spec, "--out", "c"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |d: &str| fs::read(dir.path().join(d).join("nmse.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let manifest = fs::read_to_string(dir.path().join("a/manifest.txt")).unwrap();
    assert!(manifest.contains("seed=11\n") && manifest.contains("system.training_frames=10\n"));
}

#[test]
fn dictionaries_round_trip_through_dict_flags() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "e.toml", &format!("experiment = \"exp1_single_ue_compare\"\n{SMALL}"));
    let o = cdl(&["run", "--spec", &spec, "--out", "first", "--dict-out", "dicts"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let saved = dir.path().join("dicts/cdl_op_s3.dict");
    assert!(saved.exists());
    let o = cdl(&["run", "--spec", &spec, "--out", "second", "--dict-in", "dicts/cdl_op_s3.dict"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let nmse = fs::read_to_string(dir.path().join("second/nmse.csv")).unwrap();
    let pick = |text: &str, dict: &str| {
        text.lines().find(|l| l.starts_with(&format!("exp1_single_ue_compare,{dict},3,all,all,"))).unwrap().rsplit(',').next().unwrap().to_string()
    };
    // the external copy of the S=3 CDL-OP dictionary scores exactly like the original
    assert_eq!(pick(&nmse, "external"), pick(&nmse, "cdl-op"));
    let manifest = fs::read_to_string(dir.path().join("second/manifest.txt")).unwrap();
    assert!(manifest.contains("dict_in=dicts/cdl_op_s3.dict\n"));
}

#[test]
fn multi_user_run_writes_protocol_trace() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        dir.path(),
        "m.toml",
        "experiment = \"exp3_multi_ue\"\npreset = \"desk\"\n[system]\ntraining_frames = 8\ntest_vectors = 10\ntotal_frames = 20\n[sweep]\nsparsities = [2]\nksvd_max_iters = 5\n",
    );
    let o = cdl(&["run", "--spec", &spec, "--out", "m"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("m/protocol_trace.csv")).unwrap();
    assert!(trace.starts_with("frame,user,subcarrier,phase,dict_id,nmse_num,nmse_den\n"));
    // 2N + P frames, 3 users, 8 subcarriers
    assert_eq!(trace.lines().count() - 1, (2 * 8 + 10) * 3 * 8);
}

#[test]
fn ber_run_writes_curves() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        dir.path(),
        "b.toml",
        "experiment = \"exp4_ber\"\npreset = \"desk\"\n[system]\ntraining_frames = 10\ntest_vectors = 10\n[ber]\nsnr_db = [0.0, 6.0]\nmin_bits = 4096\ncompression_factors = [2]\n",
    );
    let o = cdl(&["run", "--spec", &spec, "--out", "b", "--dict-out", "d"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let ber = fs::read_to_string(dir.path().join("b/ber.csv")).unwrap();
    assert!(ber.starts_with("precoder_source,g,snr_db,bit_errors,bits,ber\n"));
    assert_eq!(ber.lines().count(), 1 + 2 * 2);
    assert!(dir.path().join("d/cdl_op_g2_s4.dict").exists());
    let bad = write_spec(dir.path(), "bad.toml", "experiment = \"exp4_ber\"\npreset = \"desk\"\n[ber]\ncompression_factors = [3]\n");
    let o = cdl(&["run", "--spec", &bad], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("compression_factor"));
}
