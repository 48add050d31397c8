//! Single runs, parameter sweeps and the factorization-error scaling study.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use dqpt_core::dynamics::{
    avg_factorization_error, lta_distribution_diagonal, time_series, Estimator, FactorizationErrors,
    TimeGrid,
};
use dqpt_core::hilbert::{lmg_basis, spinor_sector_basis, SectorBasis};
use dqpt_core::models::ModelParams;
use dqpt_core::numerics::eigh_tridiagonal;
use dqpt_core::qfi::{qfi_lta_factorized, Normalization};
use dqpt_core::semiclassics::{
    chi_for_m, eta_for_m, semiclassical_qfi, PotentialKind, PotentialModel, Prediction,
};
use dqpt_core::Error as CoreError;

use crate::config::{ModelKind, RunConfig, SweepParameter};
use crate::error::{CliError, CliResult, StageExt};

#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Ok,
    /// Exactly at the critical value; the semiclassical column holds the mean of
    /// the two one-sided limits.
    Critical,
    /// Driven condensate at `rho0 = 1/2`: `x0 = 0`, scaled values undefined.
    Degenerate,
    Failed(String),
}

impl RecordStatus {
    pub fn label(&self) -> String {
        match self {
            RecordStatus::Ok => "ok".into(),
            RecordStatus::Critical => "critical".into(),
            RecordStatus::Degenerate => "degenerate".into(),
            RecordStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

/// Stability diagnostics collected along the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub qfi_min: f64,
    pub qfi_max: f64,
    pub max_norm_deviation: f64,
    pub energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: ModelKind,
    pub particles: usize,
    /// Sweep parameter value (the control parameter for single runs).
    pub parameter: f64,
    /// `q / q_c` for the static condensate, `m` for the double wells.
    pub control: f64,
    pub params: ModelParams,
    pub delta_d: f64,
    pub fq_exact: f64,
    pub fq_factorized: f64,
    pub fq_semiclassical: f64,
    pub normalization: Option<Normalization>,
    pub scaled_exact: f64,
    pub scaled_factorized: f64,
    pub scaled_semiclassical: f64,
    pub diagnostics: Diagnostics,
    pub status: RecordStatus,
    pub labels: Option<Vec<f64>>,
    pub pbar: Option<Vec<f64>>,
    pub wall_time: f64,
}

impl SweepRecord {
    fn failed(config: &RunConfig, parameter: f64, err: &CliError) -> Self {
        Self {
            model: config.model,
            particles: config.particles,
            parameter,
            control: f64::NAN,
            params: config.params,
            delta_d: f64::NAN,
            fq_exact: f64::NAN,
            fq_factorized: f64::NAN,
            fq_semiclassical: f64::NAN,
            normalization: None,
            scaled_exact: f64::NAN,
            scaled_factorized: f64::NAN,
            scaled_semiclassical: f64::NAN,
            diagnostics: Diagnostics {
                qfi_min: f64::NAN,
                qfi_max: f64::NAN,
                max_norm_deviation: f64::NAN,
                energy_drift: f64::NAN,
            },
            status: RecordStatus::Failed(err.to_string()),
            labels: None,
            pbar: None,
            wall_time: 0.0,
        }
    }
}

pub fn build_basis(model: ModelKind, particles: usize) -> dqpt_core::Result<Arc<SectorBasis>> {
    match model {
        ModelKind::Lmg => lmg_basis(particles),
        _ => spinor_sector_basis(particles),
    }
}

/// Value of the model's own control parameter.
fn primary_parameter(params: &ModelParams) -> f64 {
    match *params {
        ModelParams::StaticBec { q, .. } => q,
        ModelParams::DrivenBec { g0, gj, .. } => gj / g0,
        ModelParams::Lmg { chi, omega, .. } => chi / omega,
    }
}

/// basis -> Hamiltonian -> eigensystem -> coherent state -> LTA -> QFI -> semiclassics.
pub fn run_single(config: &RunConfig) -> CliResult<SweepRecord> {
    config.validate()?;
    let start = Instant::now();
    let basis = build_basis(config.model, config.particles).stage("basis")?;
    let h = config.params.hamiltonian(&basis).stage("hamiltonian")?;
    let eig = eigh_tridiagonal(&h).stage("eigensolver")?;
    let psi0 = config.params.initial_state(&basis).stage("initial state")?;
    let x = basis.labels();
    let series = time_series(&eig, &psi0, x, &config.grid, Some(&h)).stage("time series")?;
    let lta = match config.estimator {
        Estimator::TimeAverage => series.lta.clone(),
        Estimator::DiagonalEnsemble => lta_distribution_diagonal(&eig, &psi0).stage("diagonal ensemble")?,
    };
    let fq_factorized = qfi_lta_factorized(&lta, x).stage("factorized QFI")?;
    let delta_d = basis.delta_d();

    let mut status = RecordStatus::Ok;
    let mut control = f64::NAN;
    let mut fq_semiclassical = f64::NAN;
    let mut normalization = None;
    // Nonzero initial momenta have no closed-form prediction; quantum columns are still filled.
    if let Ok(model) = PotentialModel::from_params(&config.params) {
        let prediction = semiclassical_qfi(&model, delta_d).stage("semiclassics")?;
        if prediction.is_critical() {
            status = RecordStatus::Critical;
        }
        fq_semiclassical = prediction.central();
        match model.kind() {
            PotentialKind::StaticBec => {
                control = primary_parameter(&config.params) / model.critical_value();
                normalization = Some(Normalization::PerHalfSpan);
            }
            _ => {
                control = model.m().unwrap_or(f64::NAN);
                if model.is_degenerate() {
                    status = RecordStatus::Degenerate;
                } else {
                    normalization = Some(Normalization::PerHalfSpanAndPosition { x0: model.scaled_x0() });
                }
            }
        }
    }
    let scale = |v: f64| normalization.map_or(f64::NAN, |n| n.apply(v, delta_d));

    Ok(SweepRecord {
        model: config.model,
        particles: config.particles,
        parameter: primary_parameter(&config.params),
        control,
        params: config.params,
        delta_d,
        fq_exact: series.qfi_mean,
        fq_factorized,
        fq_semiclassical,
        normalization,
        scaled_exact: scale(series.qfi_mean),
        scaled_factorized: scale(fq_factorized),
        scaled_semiclassical: scale(fq_semiclassical),
        diagnostics: Diagnostics {
            qfi_min: series.qfi_min,
            qfi_max: series.qfi_max,
            max_norm_deviation: series.max_norm_deviation,
            energy_drift: series.energy_drift.unwrap_or(f64::NAN),
        },
        status,
        labels: config.include_pbar.then(|| x.to_vec()),
        pbar: config.include_pbar.then(|| lta.pbar().to_vec()),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Parameters with the sweep value substituted.
pub fn params_at(config: &RunConfig, parameter: SweepParameter, value: f64) -> CliResult<ModelParams> {
    let mut p = config.params;
    match (&mut p, parameter) {
        (ModelParams::StaticBec { q, .. }, SweepParameter::Q) => *q = value,
        (ModelParams::StaticBec { c, q, rho0, .. }, SweepParameter::QOverQc) => {
            *q = value * 2.0 * *c * (1.0 - *rho0)
        }
        (ModelParams::DrivenBec { g0, gj, .. }, SweepParameter::Eta) => *gj = value * *g0,
        (ModelParams::DrivenBec { g0, gj, rho0, .. }, SweepParameter::M) => {
            *gj = *g0 * eta_for_m(value, *rho0).stage("m inversion")?
        }
        (ModelParams::Lmg { chi, .. }, SweepParameter::Chi) => *chi = value,
        (ModelParams::Lmg { chi, omega, z0, .. }, SweepParameter::M) => {
            *chi = *omega * chi_for_m(value, *z0).stage("m inversion")?
        }
        _ => {
            return Err(CliError::Config(format!(
                "sweep parameter '{}' does not apply to model '{}'",
                parameter.name(),
                config.model
            )))
        }
    }
    Ok(p)
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// One record per sweep value, in parameter order; failed points are kept as rows.
pub fn run_sweep(config: &RunConfig, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    config.validate()?;
    let axis = config
        .sweep
        .ok_or_else(|| CliError::Config("sweep requires 'sweep', 'sweep_min', 'sweep_max' and 'sweep_points'".into()))?;
    let values = axis.values();
    let run_point = |value: f64| -> SweepRecord {
        let point = params_at(config, axis.parameter, value).and_then(|params| {
            let mut c = config.clone();
            c.params = params;
            c.sweep = None;
            run_single(&c)
        });
        match point {
            Ok(mut rec) => {
                rec.parameter = value;
                rec
            }
            Err(e) => SweepRecord::failed(config, value, &e),
        }
    };
    Ok(pool(jobs)?.install(|| values.par_iter().map(|&v| run_point(v)).collect()))
}

/// Semiclassical-only counterpart of [`run_sweep`].
pub fn semiclassical_sweep(config: &RunConfig) -> CliResult<Vec<(f64, f64, Prediction, f64)>> {
    let axis = config
        .sweep
        .ok_or_else(|| CliError::Config("a sweep axis is required".into()))?;
    let basis = build_basis(config.model, config.particles).stage("basis")?;
    axis.values()
        .into_iter()
        .map(|v| {
            let params = params_at(config, axis.parameter, v)?;
            let model = PotentialModel::from_params(&params).stage("semiclassics")?;
            let prediction = semiclassical_qfi(&model, basis.delta_d()).stage("semiclassics")?;
            let control = match model.kind() {
                PotentialKind::StaticBec => primary_parameter(&params) / model.critical_value(),
                _ => model.m().unwrap_or(f64::NAN),
            };
            let norm = match model.kind() {
                PotentialKind::StaticBec => basis.delta_d().powi(2),
                _ => (basis.delta_d() * model.scaled_x0()).powi(2),
            };
            Ok((v, control, prediction, norm))
        })
        .collect()
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> CliResult<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(CliError::Config("a line fit needs at least two matching points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(CliError::Config("a line fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    Ok(LinearFit { slope, intercept, residuals })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub particles: usize,
    pub eps_ave: f64,
    pub excluded: usize,
    pub diagonal_mean: f64,
    pub offdiagonal_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorScaling {
    pub rows: Vec<ScalingRow>,
    /// Fit of `ln eps_ave` against `ln N`.
    pub fit: LinearFit,
    /// Slope with the largest `N` removed.
    pub slope_without_largest: f64,
    /// Full error matrix for the largest `N`.
    pub largest: FactorizationErrors,
}

/// `eps_ave(N)` for an LMG quench at each `N` and the log-log slope.
pub fn run_error_scaling(
    sizes: &[usize],
    chi: f64,
    z0: f64,
    grid: &TimeGrid,
    jobs: usize,
) -> CliResult<ErrorScaling> {
    if sizes.len() < 3 {
        return Err(CliError::Stage {
            stage: "error scaling",
            source: CoreError::InvalidArgument("at least three N values are needed".into()),
        });
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("N values must be strictly ascending".into()));
    }
    let params = ModelParams::Lmg { chi, omega: 1.0, z0, phi: 0.0 };
    params.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let one = |n: usize| -> CliResult<(ScalingRow, FactorizationErrors)> {
        let basis = lmg_basis(n).stage("basis")?;
        let h = params.hamiltonian(&basis).stage("hamiltonian")?;
        let eig = eigh_tridiagonal(&h).stage("eigensolver")?;
        let psi0 = params.initial_state(&basis).stage("initial state")?;
        let avg = avg_factorization_error(&eig, &psi0, grid, z0).stage("factorization error")?;
        let row = ScalingRow {
            particles: n,
            eps_ave: avg.average,
            excluded: avg.excluded,
            diagonal_mean: avg.errors.diagonal_mean(),
            offdiagonal_mean: avg.errors.offdiagonal_mean(),
        };
        Ok((row, avg.errors))
    };
    let results: Vec<_> = pool(jobs)?.install(|| sizes.par_iter().map(|&n| one(n)).collect());
    let mut rows = Vec::with_capacity(sizes.len());
    let mut largest = None;
    for r in results {
        let (row, errors) = r?;
        rows.push(row);
        largest = Some(errors);
    }
    let lx: Vec<f64> = rows.iter().map(|r| (r.particles as f64).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.eps_ave.ln()).collect();
    let fit = fit_line(&lx, &ly)?;
    let k = lx.len() - 1;
    let slope_without_largest = fit_line(&lx[..k], &ly[..k])?.slope;
    Ok(ErrorScaling {
        rows,
        fit,
        slope_without_largest,
        largest: largest.expect("at least three sizes"),
    })
}
