use std::fs;
use std::path::Path;
use std::process::Command;

use dqpt_cli::config::{SweepAxis, SweepParameter};
use dqpt_cli::runner::{run_single, run_sweep};
use dqpt_cli::RunConfig;
use dqpt_core::models::ModelParams;

fn dqpt(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dqpt")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_table(path: &Path) -> (String, csv::StringRecord, Vec<csv::StringRecord>) {
    let text = fs::read_to_string(path).unwrap();
    let schema = text.lines().next().unwrap().to_string();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let rows = rdr.records().map(|r| r.unwrap()).collect();
    (schema, header, rows)
}

fn column(header: &csv::StringRecord, row: &csv::StringRecord, name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap();
    row[i].parse().unwrap()
}

const LMG_SWEEP: &str = "model = lmg\nn = 60\nz0 = 0.6\nsteps = 300\ndt = 1\n\
                         sweep = m\nsweep_min = 0.5\nsweep_max = 2.5\nsweep_points = 5\n";

#[test]
fn single_run_writes_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "model = lmg\nn = 40\nchi = 3\nz0 = 0.6\nsteps = 200\npbar = true\n");
    let out = dir.path().join("run.csv");
    let (code, _, err) = dqpt(&["single", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (schema, header, rows) = read_table(&out);
    assert_eq!(schema, "# schema: dqpt-sweep-v1");
    assert_eq!(rows.len(), 1);
    let fq = column(&header, &rows[0], "fq_exact");
    assert!(fq > 0.0 && fq <= 4.0 * 20.0 * 20.0);
    let (schema, _, rows) = read_table(&dir.path().join("run_pbar.csv"));
    assert_eq!(schema, "# schema: dqpt-distribution-v1");
    assert_eq!(rows.len(), 41);
}

#[test]
fn sweep_output_is_bit_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.cfg", LMG_SWEEP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(dqpt(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap(), "--jobs", "1"]).0, 0);
    assert_eq!(dqpt(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "3"]).0, 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let (_, header, rows) = read_table(&a);
    let ms: Vec<f64> = rows.iter().map(|r| column(&header, r, "control")).collect();
    for (m, want) in ms.iter().zip([0.5, 1.0, 1.5, 2.0, 2.5]) {
        assert!((m - want).abs() < 1e-12);
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.cfg", LMG_SWEEP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(dqpt(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()]).0, 0);
    let (code, _, err) = dqpt(&[
        "sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--steps", "50", "--estimator", "diagonal",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "model = static\nn = 7\nrho0 = 0.6\n");
    assert_eq!(dqpt(&["single", "--config", &bad]).0, 2);
    assert_eq!(dqpt(&["single"]).0, 2);
    let no_axis = write(dir.path(), "single.cfg", "model = lmg\nn = 10\nz0 = 0.5\n");
    assert_eq!(dqpt(&["sweep", "--config", &no_axis]).0, 2);
    assert_eq!(dqpt(&["figure", "7"]).0, 2);
    assert_eq!(dqpt(&["error-scaling", "--sizes", "100,200", "--steps", "10"]).0, 2);
}

#[test]
fn single_point_sweep_equals_single_run() {
    let params = ModelParams::StaticBec { c: 1.0, q: 0.0, rho0: 0.6, theta: 0.0 };
    let axis = SweepAxis { parameter: SweepParameter::Q, min: 0.3, max: 0.3, points: 1 };
    let sweep = RunConfig::new(params, 80).unwrap().with_grid(400, 1.0).unwrap().with_sweep(axis).unwrap();
    let rows = run_sweep(&sweep, 1).unwrap();
    let mut single = sweep.clone();
    single.sweep = None;
    single.params = ModelParams::StaticBec { c: 1.0, q: 0.3, rho0: 0.6, theta: 0.0 };
    let one = run_single(&single).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].fq_exact, one.fq_exact);
    assert_eq!(rows[0].fq_factorized, one.fq_factorized);
    assert_eq!(rows[0].scaled_semiclassical, one.scaled_semiclassical);
}

#[test]
fn semiclassical_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sc.csv");
    let (code, _, err) = dqpt(&["semiclassical", "--points", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (schema, header, rows) = read_table(&out);
    assert_eq!(schema, "# schema: dqpt-semiclassical-v1");
    assert_eq!(rows.len(), 22);
    // q / q_c = 1 sits on the grid: both one-sided limits equal 2 rho0^2.
    let kink = rows.iter().find(|r| &r[0] == "type_a" && (column(&header, r, "control") - 1.0).abs() < 1e-12).unwrap();
    assert!((column(&header, kink, "scaled_below") - 0.72).abs() < 1e-12);
    assert!((column(&header, kink, "scaled_above") - 0.72).abs() < 1e-12);
}

#[test]
fn figure_recipe_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = dqpt(&["figure", "2", "--out", dir.path().to_str().unwrap(), "--estimator", "diagonal", "--steps", "10"]);
    assert_eq!(code, 0, "{err}");
    let (_, header, rows) = read_table(&dir.path().join("figure2_distribution.csv"));
    assert_eq!(rows.len(), 2 * 501);
    let total: f64 = rows.iter().filter(|r| &r[0] == "2c").map(|r| column(&header, r, "pbar_quantum")).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(dir.path().join("figure2_potential.csv").exists());
    assert!(dir.path().join("figure2_roots.csv").exists());
}

#[test]
fn error_scaling_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scaling.csv");
    let (code, _, err) = dqpt(&["error-scaling", "--sizes", "40,60,80", "--steps", "500", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (schema, _, rows) = read_table(&out);
    assert_eq!(schema, "# schema: dqpt-error-scaling-v1");
    assert_eq!(rows.len(), 3);
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("scaling.json")).unwrap()).unwrap();
    assert!(fit["slope"].as_f64().unwrap().is_finite());
}
