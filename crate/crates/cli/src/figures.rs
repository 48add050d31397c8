//! Recipes reproducing the published figures.
//!
//! Figures 1 and 2 fix `rho0` and the quench strength by choice:
//! `rho0 = 0.6`, `q = 0.5 q_c` and `1.5 q_c` for the static condensate and
//! `rho0 = 0.8`, `eta = 0.5 eta_c` (trapped) and `1.5 eta_c` (untrapped) for the
//! driven one.

use std::path::Path;

use dqpt_core::dynamics::{lta_distribution_diagonal, time_series, Estimator, TimeGrid};
use dqpt_core::models::ModelParams;
use dqpt_core::numerics::eigh_tridiagonal;
use dqpt_core::semiclassics::{
    discretized_density, driven_critical_eta, potential_eval, PotentialModel,
};

use crate::config::{RunConfig, SweepAxis, SweepParameter};
use crate::error::{CliError, CliResult, StageExt};
use crate::output::{self, DistributionRow, FitSummary};
use crate::runner::{build_basis, run_error_scaling, run_sweep, ErrorScaling, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    One,
    Two,
    ThreeA,
    ThreeB,
    Four,
}

impl std::str::FromStr for Figure {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "1" => Ok(Figure::One),
            "2" => Ok(Figure::Two),
            "3a" => Ok(Figure::ThreeA),
            "3b" => Ok(Figure::ThreeB),
            "4" => Ok(Figure::Four),
            _ => Err(CliError::Config(format!("unknown figure '{s}' (1, 2, 3a, 3b, 4)"))),
        }
    }
}

/// Grid and estimator overrides shared by all recipes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub estimator: Option<Estimator>,
}

impl Overrides {
    pub fn grid(&self, steps: usize, dt: f64) -> CliResult<TimeGrid> {
        TimeGrid::new(self.steps.unwrap_or(steps), self.dt.unwrap_or(dt))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&self, mut config: RunConfig) -> CliResult<RunConfig> {
        config.grid = self.grid(config.grid.steps(), config.grid.dt())?;
        if let Some(e) = self.estimator {
            config.estimator = e;
        }
        Ok(config)
    }
}

/// One distribution panel of Figs. 1 and 2.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub config: RunConfig,
}

pub fn distribution_panels(figure: Figure, o: &Overrides) -> CliResult<Vec<Panel>> {
    let static_q = |ratio: f64| ModelParams::StaticBec { c: 1.0, q: ratio * 0.8, rho0: 0.6, theta: 0.0 };
    let eta_c = driven_critical_eta(0.8);
    let driven = |ratio: f64| ModelParams::DrivenBec { g0: 1.0, gj: ratio * eta_c, rho0: 0.8, theta: 0.0 };
    let sets = match figure {
        Figure::One => [("1c", static_q(0.5)), ("1d", static_q(1.5))],
        Figure::Two => [("2c", driven(0.5)), ("2d", driven(1.5))],
        _ => return Err(CliError::Config("only figures 1 and 2 have distribution panels".into())),
    };
    sets.into_iter()
        .map(|(name, params)| {
            let config = o.apply(RunConfig::new(params, 1000)?.with_grid(20_000, 1.0)?)?;
            Ok(Panel { name: name.into(), config })
        })
        .collect()
}

/// Quantum and semiclassical `Pbar` of one panel.
#[derive(Debug, Clone)]
pub struct PanelData {
    pub name: String,
    pub labels: Vec<f64>,
    /// `rho0 = n0 / N`.
    pub coordinate: Vec<f64>,
    pub quantum: Vec<f64>,
    pub semiclassical: Vec<f64>,
    /// Active turning points in the same coordinate.
    pub turning_points: (f64, f64),
    pub potential: PotentialModel,
}

pub fn panel_data(panel: &Panel) -> CliResult<PanelData> {
    let c = &panel.config;
    let basis = build_basis(c.model, c.particles).stage("basis")?;
    let h = c.params.hamiltonian(&basis).stage("hamiltonian")?;
    let eig = eigh_tridiagonal(&h).stage("eigensolver")?;
    let psi0 = c.params.initial_state(&basis).stage("initial state")?;
    let quantum = match c.estimator {
        Estimator::TimeAverage => time_series(&eig, &psi0, basis.labels(), &c.grid, None)
            .stage("time series")?
            .lta
            .pbar()
            .to_vec(),
        Estimator::DiagonalEnsemble => lta_distribution_diagonal(&eig, &psi0)
            .stage("diagonal ensemble")?
            .pbar()
            .to_vec(),
    };
    let potential = PotentialModel::from_params(&c.params).stage("semiclassics")?;
    let semiclassical = discretized_density(&potential, &basis).stage("semiclassics")?;
    let n = c.particles as f64;
    let (a, b) = potential.scaled_turning_points();
    let to_rho = |x: f64| (x + 1.0) / 2.0;
    Ok(PanelData {
        name: panel.name.clone(),
        labels: basis.labels().to_vec(),
        coordinate: basis.labels().iter().map(|l| l / n).collect(),
        quantum,
        semiclassical,
        turning_points: (to_rho(a), to_rho(b)),
        potential,
    })
}

pub fn figure3a_config(o: &Overrides) -> CliResult<RunConfig> {
    let params = ModelParams::StaticBec { c: 1.0, q: 0.0, rho0: 0.6, theta: 0.0 };
    let axis = SweepAxis { parameter: SweepParameter::QOverQc, min: 0.2, max: 2.2, points: 41 };
    o.apply(RunConfig::new(params, 1000)?.with_grid(10_000, 10.0)?.with_sweep(axis)?)
}

pub fn figure3b_configs(o: &Overrides) -> CliResult<[RunConfig; 2]> {
    let axis = SweepAxis { parameter: SweepParameter::M, min: 0.2, max: 3.0, points: 29 };
    let driven = ModelParams::DrivenBec { g0: 1.0, gj: 0.0, rho0: 0.8, theta: 0.0 };
    let lmg = ModelParams::Lmg { chi: 0.0, omega: 1.0, z0: 0.6, phi: 0.0 };
    Ok([
        o.apply(RunConfig::new(driven, 1000)?.with_grid(10_000, 10.0)?.with_sweep(axis)?)?,
        o.apply(RunConfig::new(lmg, 500)?.with_grid(10_000, 10.0)?.with_sweep(axis)?)?,
    ])
}

pub const FIGURE4_SIZES: [usize; 7] = [100, 150, 200, 250, 300, 350, 400];

pub fn figure4(o: &Overrides, jobs: usize) -> CliResult<ErrorScaling> {
    run_error_scaling(&FIGURE4_SIZES, 5.0, 0.6, &o.grid(20_000, 1.0)?, jobs)
}

fn write_panels(figure: Figure, dir: &Path, o: &Overrides, jobs: usize) -> CliResult<()> {
    let panels = distribution_panels(figure, o)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let data: Vec<CliResult<PanelData>> = pool.install(|| {
        use rayon::prelude::*;
        panels.par_iter().map(panel_data).collect()
    });
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut roots = Vec::new();
    for d in data {
        let d = d?;
        for i in 0..d.labels.len() {
            rows.push(DistributionRow {
                panel: d.name.clone(),
                label: d.labels[i],
                coordinate: d.coordinate[i],
                quantum: d.quantum[i],
                semiclassical: d.semiclassical[i],
            });
        }
        let (lo, hi) = d.potential.domain();
        for k in 0..=400 {
            let x = lo + (hi - lo) * k as f64 / 400.0;
            let v = potential_eval(&d.potential, x).stage("semiclassics")?;
            curve.push((d.name.clone(), (d.potential.to_scaled(x) + 1.0) / 2.0, v));
        }
        let active = d.potential.active_pair();
        for r in d.potential.roots() {
            let is_active = r.im == 0.0 && (r.re == active.0 || r.re == active.1);
            let re = if r.im == 0.0 { (d.potential.to_scaled(r.re) + 1.0) / 2.0 } else { r.re };
            roots.push((d.name.clone(), re, r.im, is_active));
        }
    }
    let tag = match figure {
        Figure::One => "figure1",
        _ => "figure2",
    };
    output::write_distributions(output::sink(Some(&dir.join(format!("{tag}_distribution.csv"))))?, &rows)?;
    output::write_potential(output::sink(Some(&dir.join(format!("{tag}_potential.csv"))))?, &curve)?;
    output::write_roots(output::sink(Some(&dir.join(format!("{tag}_roots.csv"))))?, &roots)?;
    Ok(())
}

/// Runs a recipe and writes its tables into `dir`; returns the sweep records, if any.
pub fn run_figure(figure: Figure, dir: &Path, o: &Overrides, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    std::fs::create_dir_all(dir)?;
    match figure {
        Figure::One | Figure::Two => {
            write_panels(figure, dir, o, jobs)?;
            Ok(Vec::new())
        }
        Figure::ThreeA => {
            let records = run_sweep(&figure3a_config(o)?, jobs)?;
            output::write_records(output::sink(Some(&dir.join("figure3a.csv")))?, &records)?;
            Ok(records)
        }
        Figure::ThreeB => {
            let mut records = Vec::new();
            for config in figure3b_configs(o)? {
                records.extend(run_sweep(&config, jobs)?);
            }
            output::write_records(output::sink(Some(&dir.join("figure3b.csv")))?, &records)?;
            Ok(records)
        }
        Figure::Four => {
            let scaling = figure4(o, jobs)?;
            output::write_scaling(output::sink(Some(&dir.join("figure4_scaling.csv")))?, &scaling)?;
            output::write_matrix(output::sink(Some(&dir.join("figure4_matrix.csv")))?, &scaling.largest)?;
            output::write_json(output::sink(Some(&dir.join("figure4_fit.json")))?, &FitSummary::new(&scaling))?;
            Ok(Vec::new())
        }
    }
}
