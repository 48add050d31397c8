//! Flat `key = value` run configuration.
//!
//! ```text
//! # static condensate, sweep across q_c
//! model = static
//! n = 1000
//! c = 1
//! rho0 = 0.6
//! steps = 10000
//! dt = 10
//! sweep = q_over_qc
//! sweep_min = 0.2
//! sweep_max = 2.2
//! sweep_points = 41
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dqpt_core::dynamics::{Estimator, TimeGrid};
use dqpt_core::models::ModelParams;

use crate::error::{CliError, CliResult};

pub const DEFAULT_STEPS: usize = 20_000;
pub const DEFAULT_DT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    StaticBec,
    DrivenBec,
    Lmg,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::StaticBec => "static",
            ModelKind::DrivenBec => "driven",
            ModelKind::Lmg => "lmg",
        }
    }
}

impl FromStr for ModelKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "static" | "static_bec" => Ok(ModelKind::StaticBec),
            "driven" | "driven_bec" => Ok(ModelKind::DrivenBec),
            "lmg" => Ok(ModelKind::Lmg),
            _ => Err(CliError::Config(format!("unknown model '{s}' (static, driven, lmg)"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Q,
    /// `q` in units of the critical value.
    QOverQc,
    /// `Gj / G0`.
    Eta,
    Chi,
    /// Elliptic parameter, converted to `eta` or `chi` by closed-form inversion.
    M,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Q => "q",
            SweepParameter::QOverQc => "q_over_qc",
            SweepParameter::Eta => "eta",
            SweepParameter::Chi => "chi",
            SweepParameter::M => "m",
        }
    }

    fn applies_to(&self, model: ModelKind) -> bool {
        matches!(
            (self, model),
            (SweepParameter::Q | SweepParameter::QOverQc, ModelKind::StaticBec)
                | (SweepParameter::Eta | SweepParameter::M, ModelKind::DrivenBec)
                | (SweepParameter::Chi | SweepParameter::M, ModelKind::Lmg)
        )
    }
}

impl FromStr for SweepParameter {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "q" => Ok(SweepParameter::Q),
            "q_over_qc" => Ok(SweepParameter::QOverQc),
            "eta" => Ok(SweepParameter::Eta),
            "chi" => Ok(SweepParameter::Chi),
            "m" => Ok(SweepParameter::M),
            _ => Err(CliError::Config(format!(
                "unknown sweep parameter '{s}' (q, q_over_qc, eta, chi, m)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepAxis {
    /// Evenly spaced values, endpoints included; a single point sits at `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub particles: usize,
    pub grid: TimeGrid,
    pub estimator: Estimator,
    pub sweep: Option<SweepAxis>,
    pub output: Option<PathBuf>,
    /// Append the long-time averaged distribution to single-run output.
    pub include_pbar: bool,
}

impl RunConfig {
    /// Minimal configuration with the default time grid.
    pub fn new(params: ModelParams, particles: usize) -> CliResult<Self> {
        let model = match params {
            ModelParams::StaticBec { .. } => ModelKind::StaticBec,
            ModelParams::DrivenBec { .. } => ModelKind::DrivenBec,
            ModelParams::Lmg { .. } => ModelKind::Lmg,
        };
        let config = Self {
            model,
            params,
            particles,
            grid: TimeGrid::new(DEFAULT_STEPS, DEFAULT_DT).map_err(config_err)?,
            estimator: Estimator::TimeAverage,
            sweep: None,
            output: None,
            include_pbar: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_grid(mut self, steps: usize, dt: f64) -> CliResult<Self> {
        self.grid = TimeGrid::new(steps, dt).map_err(config_err)?;
        Ok(self)
    }

    pub fn with_sweep(mut self, axis: SweepAxis) -> CliResult<Self> {
        self.sweep = Some(axis);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params.validate().map_err(config_err)?;
        match self.model {
            ModelKind::Lmg if self.particles == 0 => {
                return Err(CliError::Config("n must be positive".into()))
            }
            ModelKind::StaticBec | ModelKind::DrivenBec
                if self.particles < 2 || !self.particles.is_multiple_of(2) =>
            {
                return Err(CliError::Config("spinor models need an even n >= 2".into()))
            }
            _ => {}
        }
        if let Some(axis) = &self.sweep {
            if axis.points == 0 {
                return Err(CliError::Config("sweep_points must be at least 1".into()));
            }
            if !axis.min.is_finite() || !axis.max.is_finite() || axis.max < axis.min {
                return Err(CliError::Config("sweep range must satisfy min <= max".into()));
            }
            if !axis.parameter.applies_to(self.model) {
                return Err(CliError::Config(format!(
                    "sweep parameter '{}' does not apply to model '{}'",
                    axis.parameter.name(),
                    self.model
                )));
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }
}

fn config_err(e: dqpt_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

const KNOWN_KEYS: &[&str] = &[
    "model", "n", "c", "q", "g0", "gj", "eta", "chi", "omega", "rho0", "theta", "z0", "phi",
    "steps", "dt", "estimator", "sweep", "sweep_min", "sweep_max", "sweep_points", "output", "pbar",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", i + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key '{key}'", i + 1)));
            }
            if map.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(Self(map))
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| {
                CliError::Config(format!("line {line}: invalid value '{v}' for '{key}'"))
            }),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    }
}

pub fn parse_estimator(s: &str) -> CliResult<Estimator> {
    match s {
        "time" => Ok(Estimator::TimeAverage),
        "diagonal" => Ok(Estimator::DiagonalEnsemble),
        _ => Err(CliError::Config(format!("unknown estimator '{s}' (time, diagonal)"))),
    }
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let e = Entries::parse(text)?;
        let model: ModelKind = e.required::<String>("model")?.parse()?;
        let particles: usize = e.required("n")?;
        let params = match model {
            ModelKind::StaticBec => ModelParams::StaticBec {
                c: e.or("c", 1.0)?,
                q: e.or("q", 0.0)?,
                rho0: e.required("rho0")?,
                theta: e.or("theta", 0.0)?,
            },
            ModelKind::DrivenBec => {
                let g0 = e.or("g0", 1.0)?;
                let gj = match (e.get::<f64>("gj")?, e.get::<f64>("eta")?) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config("give either 'gj' or 'eta', not both".into()))
                    }
                    (Some(gj), None) => gj,
                    (None, Some(eta)) => eta * g0,
                    (None, None) => 0.0,
                };
                ModelParams::DrivenBec { g0, gj, rho0: e.required("rho0")?, theta: e.or("theta", 0.0)? }
            }
            ModelKind::Lmg => ModelParams::Lmg {
                chi: e.or("chi", 0.0)?,
                omega: e.or("omega", 1.0)?,
                z0: e.required("z0")?,
                phi: e.or("phi", 0.0)?,
            },
        };
        let steps = e.or("steps", DEFAULT_STEPS)?;
        let dt = e.or("dt", DEFAULT_DT)?;
        let grid = TimeGrid::new(steps, dt).map_err(config_err)?;
        let estimator = parse_estimator(&e.or("estimator", "time".to_string())?)?;
        let sweep = match e.get::<String>("sweep")? {
            None => None,
            Some(name) => Some(SweepAxis {
                parameter: name.parse()?,
                min: e.required("sweep_min")?,
                max: e.required("sweep_max")?,
                points: e.required("sweep_points")?,
            }),
        };
        let config = RunConfig {
            model,
            params,
            particles,
            grid,
            estimator,
            sweep,
            output: e.get::<String>("output")?.map(PathBuf::from),
            include_pbar: e.or("pbar", false)?,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "# comment\nmodel = lmg\nn = 500\nchi = 5 # trailing\nz0 = 0.6\nsteps = 100\ndt = 10\n\
                    estimator = diagonal\nsweep = m\nsweep_min = 0.2\nsweep_max = 3\nsweep_points = 29\n";
        let c: RunConfig = text.parse().unwrap();
        assert_eq!(c.model, ModelKind::Lmg);
        assert_eq!(c.params, ModelParams::Lmg { chi: 5.0, omega: 1.0, z0: 0.6, phi: 0.0 });
        assert_eq!(c.grid.steps(), 100);
        assert_eq!(c.estimator, Estimator::DiagonalEnsemble);
        let axis = c.sweep.unwrap();
        assert_eq!(axis.values().len(), 29);
        assert!((axis.values()[28] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn driven_accepts_eta() {
        let c: RunConfig = "model = driven\nn = 10\ng0 = 2\neta = 0.5\nrho0 = 0.8".parse().unwrap();
        assert_eq!(c.params, ModelParams::DrivenBec { g0: 2.0, gj: 1.0, rho0: 0.8, theta: 0.0 });
        assert!("model = driven\nn = 10\ngj = 1\neta = 0.5\nrho0 = 0.8".parse::<RunConfig>().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "model = static\nn = 11\nrho0 = 0.6",
            "model = static\nn = 10",
            "model = foo\nn = 10",
            "model = static\nn = 10\nrho0 = 0.6\nbogus = 1",
            "model = static\nn = 10\nrho0 = abc",
            "model = static\nn = 10\nrho0 = 0.6\nrho0 = 0.5",
            "model = static\nn = 10\nrho0 = 0.6\nsweep = chi\nsweep_min = 0\nsweep_max = 1\nsweep_points = 3",
            "model = static\nn = 10\nrho0 = 0.6\nsweep = q\nsweep_min = 0\nsweep_max = 1\nsweep_points = 0",
            "model = lmg\nn = 10\nz0 = 0.6\ndt = -1",
            "model = lmg\nn = 10\nz0 = 1.5",
            "just text",
        ] {
            let err = bad.parse::<RunConfig>().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn single_point_axis() {
        let axis = SweepAxis { parameter: SweepParameter::Q, min: 0.3, max: 0.9, points: 1 };
        assert_eq!(axis.values(), vec![0.3]);
    }
}
