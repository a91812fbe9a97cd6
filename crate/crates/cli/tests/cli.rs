use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MODEL: &str = "[model]\nhT_over_pi = 0.9\nJT_over_pi = 0.16\nMT_over_pi = 0.98\nN0 = 2\n";

fn dtc4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtc4"))
        .args(args)
        .env_remove("DTC4_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run_ok(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = dtc4(&args);
    assert!(
        o.status.success(),
        "{cmd} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn run_err(cmd: &str, config: &Path, out: &Path) -> String {
    let o = dtc4(&[
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success(), "{cmd} unexpectedly succeeded");
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "table"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn evolve_writes_artifacts_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "e.toml", MODEL);
    let out = tmp.path().join("out");
    run_ok("evolve", &cfg, &out, &[]);
    for f in [
        "stroboscopic.csv",
        "spectrum.csv",
        "summary.csv",
        "config.toml",
        "resolved_config.toml",
        "VERSION",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let manifest = fs::read_to_string(out.join("MANIFEST.sha256")).unwrap();
    assert!(manifest
        .lines()
        .any(|l| l.ends_with("  spectrum.csv") && l.len() == 64 + 2 + 12));
    let resolved = fs::read_to_string(out.join("resolved_config.toml")).unwrap();
    assert!(
        resolved.contains("seed = 0") && resolved.contains("command = \"evolve\""),
        "{resolved}"
    );
    assert!(fs::read_to_string(out.join("VERSION"))
        .unwrap()
        .starts_with("dtc4 "));
}

#[test]
fn same_seed_gives_byte_identical_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!("{MODEL}[disorder]\ndh = 0.08\nn_realizations = 3\n");
    let cfg = write_config(tmp.path(), "d.toml", &body);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    run_ok("evolve", &cfg, &a, &["--seed", "5", "--workers", "1"]);
    run_ok("evolve", &cfg, &b, &["--seed", "5"]);
    run_ok("evolve", &cfg, &c, &["--seed", "6"]);
    assert_eq!(csv_bytes(&a), csv_bytes(&b));
    assert_ne!(csv_bytes(&a), csv_bytes(&c));
}

#[test]
fn recompile_and_noisy_pipeline_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = write_config(
        tmp.path(),
        "r.toml",
        &format!("{MODEL}[recompile]\nk_max = 8\nn_layers = 2\n[optimizer]\nn_hops = 2\n"),
    );
    let noisy_body = format!(
        "{MODEL}[noise]\nrates = [1e-3]\nn_shots = 200\nn_periods = 8\ntable = \"r1/parameters.table\"\n"
    );
    let noisy = write_config(tmp.path(), "n.toml", &noisy_body);
    for run in ["1", "2"] {
        run_ok(
            "recompile",
            &rec,
            &tmp.path().join(format!("r{run}")),
            &["--seed", "3"],
        );
        run_ok(
            "noisy",
            &noisy,
            &tmp.path().join(format!("n{run}")),
            &["--seed", "3"],
        );
    }
    assert_eq!(
        csv_bytes(&tmp.path().join("r1")),
        csv_bytes(&tmp.path().join("r2"))
    );
    assert_eq!(
        csv_bytes(&tmp.path().join("n1")),
        csv_bytes(&tmp.path().join("n2"))
    );
    let header = fs::read_to_string(tmp.path().join("n1/threshold.csv")).unwrap();
    assert!(header.starts_with("k,r,Sz_mean,Sz_stderr\n"), "{header}");
    let rec_csv = fs::read_to_string(tmp.path().join("r1/recompile.csv")).unwrap();
    assert_eq!(rec_csv.lines().count(), 1 + 9);
}

#[test]
fn noisy_without_table_is_a_clear_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "n.toml", MODEL);
    let e = run_err("noisy", &cfg, &out);
    assert!(e.contains("noise.table") && e.contains("dtc4 recompile"), "{e}");
    let cfg = write_config(
        tmp.path(),
        "m.toml",
        &format!("{MODEL}[noise]\ntable = \"nowhere.table\"\n"),
    );
    let e = run_err("noisy", &cfg, &out);
    assert!(e.contains("nowhere.table") && e.contains("dtc4 recompile"), "{e}");
}

#[test]
fn validation_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        (
            format!("{MODEL}[evolve]\nn_periods = 10\n"),
            "evolve",
            "evolve.n_periods",
        ),
        (
            format!("{MODEL}[schedule]\ndt_over_T = -1.0\n"),
            "evolve",
            "schedule.dt_over_T",
        ),
        (
            format!("{MODEL}[schedule]\nsampling = \"sideways\"\n"),
            "evolve",
            "schedule.sampling",
        ),
        ("[model]\nhT_over_pi = 0.9\n".to_string(), "evolve", "model"),
        (
            format!("{MODEL}[disorder]\ndh = 2.0\nn_realizations = 2\n"),
            "evolve",
            "disorder",
        ),
        (
            format!("{MODEL}[optimizer]\nseed = 4\n"),
            "recompile",
            "optimizer.seed",
        ),
        (MODEL.to_string(), "phase-diagram", "sweep"),
        (
            format!("{MODEL}[floquet]\ndelta_over_pi = 0.5\n"),
            "floquet",
            "floquet.delta_over_pi",
        ),
        (format!("command = \"floquet\"\n{MODEL}"), "evolve", "command"),
        (
            format!("{MODEL}[noise]\nr1 = 2.0\ntable = \"t\"\n"),
            "noisy",
            "noise",
        ),
    ];
    for (i, (body, cmd, needle)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("c{i}.toml"), body);
        let e = run_err(cmd, &cfg, &out);
        assert!(e.contains(needle), "case {i}: expected `{needle}` in {e}");
    }
    let o = dtc4(&["evolve", "--config", "/nonexistent/x.toml"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/x.toml"));
}

#[test]
fn phase_diagram_resumes_from_partial_results() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!(
        "{MODEL}[sweep]\nJT_over_pi = [0.0, 0.16]\nhT_over_pi = {{ start = 0.8, stop = 1.0, n = 3 }}\n"
    );
    let cfg = write_config(tmp.path(), "p.toml", &body);
    let full = tmp.path().join("full");
    run_ok("phase-diagram", &cfg, &full, &[]);
    let reference = fs::read_to_string(full.join("phase_diagram.csv")).unwrap();
    assert_eq!(reference.lines().count(), 1 + 6);
    assert!(!full.join("phase_diagram.partial.csv").exists());

    // An interrupted run: two finished points, one torn line, and a planted
    // value that must be kept rather than recomputed.
    let resumed = tmp.path().join("resumed");
    fs::create_dir_all(&resumed).unwrap();
    let rows: Vec<&str> = reference.lines().skip(1).collect();
    let first: Vec<&str> = rows[0].split(',').collect();
    let planted = format!(
        "{},{},{:?}",
        first[0].parse::<f64>().unwrap(),
        first[1].parse::<f64>().unwrap(),
        0.123
    );
    let partial = format!("JT_over_pi,hT_over_pi,peak\n{planted}\n0.16,0.9,0.5");
    fs::write(resumed.join("phase_diagram.partial.csv"), partial).unwrap();
    let o = run_ok("phase-diagram", &cfg, &resumed, &[]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("5 of 6"));
    let got = fs::read_to_string(resumed.join("phase_diagram.csv")).unwrap();
    let got_rows: Vec<&str> = got.lines().skip(1).collect();
    assert!(got_rows[0].ends_with(",0.123"), "{}", got_rows[0]);
    assert_eq!(got_rows[1..], rows[1..]);
    assert!(!resumed.join("phase_diagram.partial.csv").exists());
}

#[test]
fn floquet_reports_resource_cap() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "f.toml",
        &format!("{MODEL}[floquet]\nN0_list = [2]\n"),
    );
    run_ok("floquet", &cfg, &out, &[]);
    for f in [
        "quasienergies.csv",
        "quadruplets.csv",
        "scaling.csv",
        "summary.csv",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let big = write_config(tmp.path(), "g.toml", &MODEL.replace("N0 = 2", "N0 = 7"));
    let e = run_err("floquet", &big, &out);
    assert!(e.contains("14"), "{e}");
}
