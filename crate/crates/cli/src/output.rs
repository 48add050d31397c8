//! Versioned CSV tables and JSON side files.
//!
//! Every CSV starts with a `# schema: <name>` line followed by a header row.
//! Floats are written with 17 significant digits so that values round-trip.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use dqpt_core::qfi::Normalization;
use dqpt_core::semiclassics::Prediction;

use crate::error::CliResult;
use crate::runner::{ErrorScaling, SweepRecord};

pub const SWEEP_SCHEMA: &str = "dqpt-sweep-v1";
pub const DISTRIBUTION_SCHEMA: &str = "dqpt-distribution-v1";
pub const POTENTIAL_SCHEMA: &str = "dqpt-potential-v1";
pub const ROOTS_SCHEMA: &str = "dqpt-roots-v1";
pub const SCALING_SCHEMA: &str = "dqpt-error-scaling-v1";
pub const MATRIX_SCHEMA: &str = "dqpt-error-matrix-v1";
pub const SEMICLASSICAL_SCHEMA: &str = "dqpt-semiclassical-v1";

pub const SWEEP_COLUMNS: &[&str] = &[
    "model",
    "n",
    "parameter",
    "control",
    "delta_d",
    "fq_exact",
    "fq_factorized",
    "fq_semiclassical",
    "normalization",
    "scaled_exact",
    "scaled_factorized",
    "scaled_semiclassical",
    "qfi_min",
    "qfi_max",
    "max_norm_deviation",
    "energy_drift",
    "status",
];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Stdout when `path` is `None`.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// `dir/name.csv` becomes `dir/name_suffix.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn table<W: Write>(mut w: W, schema: &str, header: &[&str]) -> CliResult<csv::Writer<W>> {
    writeln!(w, "# schema: {schema}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

fn normalization_name(n: Option<Normalization>) -> &'static str {
    match n {
        None => "none",
        Some(Normalization::Raw) => "raw",
        Some(Normalization::PerHalfSpan) => "per_delta_d_sq",
        Some(Normalization::PerHalfSpanAndPosition { .. }) => "per_delta_d_x0_sq",
    }
}

pub fn write_records<W: Write>(w: W, records: &[SweepRecord]) -> CliResult<()> {
    let mut out = table(w, SWEEP_SCHEMA, SWEEP_COLUMNS)?;
    for r in records {
        let d = &r.diagnostics;
        out.write_record([
            r.model.name().to_string(),
            r.particles.to_string(),
            num(r.parameter),
            num(r.control),
            num(r.delta_d),
            num(r.fq_exact),
            num(r.fq_factorized),
            num(r.fq_semiclassical),
            normalization_name(r.normalization).to_string(),
            num(r.scaled_exact),
            num(r.scaled_factorized),
            num(r.scaled_semiclassical),
            num(d.qfi_min),
            num(d.qfi_max),
            num(d.max_norm_deviation),
            num(d.energy_drift),
            r.status.label(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Long-time averaged distribution of one record, one row per basis state.
pub fn write_pbar<W: Write>(w: W, labels: &[f64], pbar: &[f64], delta_ave: f64, delta_d: f64) -> CliResult<()> {
    let mut out = table(w, DISTRIBUTION_SCHEMA, &["label", "x", "pbar"])?;
    for (l, p) in labels.iter().zip(pbar) {
        out.write_record([num(*l), num((l - delta_ave) / delta_d), num(*p)])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a quantum-vs-semiclassical distribution table.
pub struct DistributionRow {
    pub panel: String,
    pub label: f64,
    pub coordinate: f64,
    pub quantum: f64,
    pub semiclassical: f64,
}

pub fn write_distributions<W: Write>(w: W, rows: &[DistributionRow]) -> CliResult<()> {
    let mut out = table(
        w,
        DISTRIBUTION_SCHEMA,
        &["panel", "label", "coordinate", "pbar_quantum", "pbar_semiclassical"],
    )?;
    for r in rows {
        out.write_record([
            r.panel.clone(),
            num(r.label),
            num(r.coordinate),
            num(r.quantum),
            num(r.semiclassical),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_potential<W: Write>(w: W, rows: &[(String, f64, f64)]) -> CliResult<()> {
    let mut out = table(w, POTENTIAL_SCHEMA, &["panel", "coordinate", "v_eff"])?;
    for (panel, x, v) in rows {
        out.write_record([panel.clone(), num(*x), num(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_roots<W: Write>(w: W, rows: &[(String, f64, f64, bool)]) -> CliResult<()> {
    let mut out = table(w, ROOTS_SCHEMA, &["panel", "root_re", "root_im", "active"])?;
    for (panel, re, im, active) in rows {
        out.write_record([panel.clone(), num(*re), num(*im), active.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_scaling<W: Write>(w: W, scaling: &ErrorScaling) -> CliResult<()> {
    let mut out = table(
        w,
        SCALING_SCHEMA,
        &["n", "eps_ave", "excluded", "diagonal_mean", "offdiagonal_mean", "residual"],
    )?;
    for (row, res) in scaling.rows.iter().zip(&scaling.fit.residuals) {
        out.write_record([
            row.particles.to_string(),
            num(row.eps_ave),
            row.excluded.to_string(),
            num(row.diagonal_mean),
            num(row.offdiagonal_mean),
            num(*res),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub slope_without_largest: f64,
    pub slope_shift: f64,
    pub sizes: Vec<usize>,
}

impl FitSummary {
    pub fn new(s: &ErrorScaling) -> Self {
        Self {
            slope: s.fit.slope,
            intercept: s.fit.intercept,
            slope_without_largest: s.slope_without_largest,
            slope_shift: s.slope_without_largest - s.fit.slope,
            sizes: s.rows.iter().map(|r| r.particles).collect(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Row-major error matrix; undefined entries are left empty.
pub fn write_matrix<W: Write>(w: W, errors: &dqpt_core::dynamics::FactorizationErrors) -> CliResult<()> {
    let mut out = table(w, MATRIX_SCHEMA, &["n", "nprime", "eps"])?;
    let k = errors.labels.len();
    for i in 0..k {
        for j in 0..k {
            let eps = errors.get(i, j).map(num).unwrap_or_default();
            out.write_record([num(errors.labels[i]), num(errors.labels[j]), eps])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub struct SemiclassicalRow {
    pub curve: String,
    pub parameter: f64,
    pub control: f64,
    pub prediction: Prediction,
    /// Divides the raw prediction to give the scaled value.
    pub norm: f64,
}

pub fn write_semiclassical<W: Write>(w: W, rows: &[SemiclassicalRow]) -> CliResult<()> {
    let mut out = table(
        w,
        SEMICLASSICAL_SCHEMA,
        &["curve", "parameter", "control", "fq_semiclassical", "scaled_below", "scaled_above", "scaled"],
    )?;
    for r in rows {
        let (below, above) = match r.prediction {
            Prediction::Value(v) => (v, v),
            Prediction::Critical { below, above } => (below, above),
        };
        out.write_record([
            r.curve.clone(),
            num(r.parameter),
            num(r.control),
            num(r.prediction.central()),
            num(below / r.norm),
            num(above / r.norm),
            num(r.prediction.central() / r.norm),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct Timing {
    pub model: String,
    pub parameter: f64,
    pub wall_time_s: f64,
}

pub fn timings(records: &[SweepRecord]) -> Vec<Timing> {
    records
        .iter()
        .map(|r| Timing { model: r.model.name().into(), parameter: r.parameter, wall_time_s: r.wall_time })
        .collect()
}
