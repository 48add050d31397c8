use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dqpt_cli::config::{parse_estimator, ModelKind, RunConfig, SweepAxis, SweepParameter};
use dqpt_cli::figures::{run_figure, Figure, Overrides};
use dqpt_cli::output::{self, FitSummary, SemiclassicalRow};
use dqpt_cli::runner::{build_basis, run_error_scaling, run_single, run_sweep, semiclassical_sweep, RecordStatus};
use dqpt_cli::{CliError, CliResult};
use dqpt_core::dynamics::TimeGrid;
use dqpt_core::models::ModelParams;

#[derive(Parser)]
#[command(name = "dqpt", version, about = "Long-time averaged QFI of spinor-BEC and LMG quenches")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (flat `key = value` file)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (single, sweep, error-scaling, semiclassical) or directory (figure)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Estimator of the long-time averaged distribution
    #[arg(long, global = true, value_enum)]
    estimator: Option<EstimatorArg>,

    /// Number of time steps
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Time step
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Write per-point wall times as JSON
    #[arg(long, global = true)]
    timings: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Time,
    Diagonal,
}

#[derive(Subcommand)]
enum Command {
    /// One quench from --config
    Single,
    /// Parameter sweep from --config
    Sweep,
    /// Reproduce a figure's data (1, 2, 3a, 3b, 4)
    Figure { which: String },
    /// Factorization-error scaling for LMG
    ErrorScaling {
        #[arg(long, value_delimiter = ',', default_value = "100,150,200,250,300,350,400")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5.0)]
        chi: f64,
        #[arg(long, default_value_t = 0.6)]
        z0: f64,
    },
    /// Analytic curves only, no quantum run
    Semiclassical {
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
}

fn overrides(cli: &Cli) -> CliResult<Overrides> {
    Ok(Overrides {
        steps: cli.steps,
        dt: cli.dt,
        estimator: cli
            .estimator
            .map(|e| parse_estimator(match e {
                EstimatorArg::Time => "time",
                EstimatorArg::Diagonal => "diagonal",
            }))
            .transpose()?,
    })
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    overrides(cli)?.apply(RunConfig::from_file(path)?)
}

fn out_path<'a>(cli: &'a Cli, config: Option<&'a RunConfig>) -> Option<&'a Path> {
    cli.out.as_deref().or_else(|| config.and_then(|c| c.output.as_deref()))
}

fn write_timings(cli: &Cli, records: &[dqpt_cli::runner::SweepRecord]) -> CliResult<()> {
    for r in records {
        eprintln!("{} {:.6e}: {:.3} s", r.model, r.parameter, r.wall_time);
    }
    if let Some(path) = &cli.timings {
        output::write_json(output::sink(Some(path))?, &output::timings(records))?;
    }
    Ok(())
}

/// Exit code 3 when any sweep row failed numerically.
fn check_rows(records: &[dqpt_cli::runner::SweepRecord]) -> CliResult<()> {
    let failed: Vec<_> = records
        .iter()
        .filter_map(|r| match &r.status {
            RecordStatus::Failed(msg) => Some(format!("{}: {msg}", r.parameter)),
            _ => None,
        })
        .collect();
    if failed.is_empty() {
        return Ok(());
    }
    for f in &failed {
        eprintln!("failed point {f}");
    }
    Err(CliError::Stage {
        stage: "sweep",
        source: dqpt_core::Error::NumericalFailure {
            index: failed.len(),
            reason: "some sweep points failed".into(),
        },
    })
}

fn default_semiclassical_curves(points: usize) -> CliResult<Vec<SemiclassicalRow>> {
    let points = points.max(2);
    let mut rows = Vec::new();
    let curves = [
        (
            "type_a",
            RunConfig::new(ModelParams::StaticBec { c: 1.0, q: 0.0, rho0: 0.6, theta: 0.0 }, 1000)?,
            SweepParameter::QOverQc,
            (0.2, 2.2),
        ),
        (
            "type_b",
            RunConfig::new(ModelParams::Lmg { chi: 1.0, omega: 1.0, z0: 0.6, phi: 0.0 }, 500)?,
            SweepParameter::M,
            (0.2, 3.0),
        ),
    ];
    for (name, config, parameter, (min, max)) in curves {
        let config = config.with_sweep(SweepAxis { parameter, min, max, points })?;
        for (parameter, control, prediction, norm) in semiclassical_sweep(&config)? {
            rows.push(SemiclassicalRow { curve: name.into(), parameter, control, prediction, norm });
        }
    }
    Ok(rows)
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Single => {
            let config = load_config(cli)?;
            let record = run_single(&config)?;
            let out = out_path(cli, Some(&config));
            output::write_records(output::sink(out)?, std::slice::from_ref(&record))?;
            if let (Some(labels), Some(pbar)) = (&record.labels, &record.pbar) {
                match out {
                    Some(path) => {
                        let basis = build_basis(config.model, config.particles).map_err(|e| CliError::Config(e.to_string()))?;
                        output::write_pbar(
                            output::sink(Some(&output::sibling(path, "pbar")))?,
                            labels,
                            pbar,
                            basis.delta_ave(),
                            basis.delta_d(),
                        )?;
                    }
                    None => eprintln!("pbar requested; give --out to write the distribution table"),
                }
            }
            write_timings(cli, std::slice::from_ref(&record))
        }
        Command::Sweep => {
            let config = load_config(cli)?;
            let records = run_sweep(&config, cli.jobs)?;
            output::write_records(output::sink(out_path(cli, Some(&config)))?, &records)?;
            write_timings(cli, &records)?;
            check_rows(&records)
        }
        Command::Figure { which } => {
            let figure: Figure = which.parse()?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let records = run_figure(figure, &dir, &overrides(cli)?, cli.jobs)?;
            write_timings(cli, &records)?;
            check_rows(&records)
        }
        Command::ErrorScaling { sizes, chi, z0 } => {
            let grid = TimeGrid::new(cli.steps.unwrap_or(20_000), cli.dt.unwrap_or(1.0))
                .map_err(|e| CliError::Config(e.to_string()))?;
            let scaling = run_error_scaling(sizes, *chi, *z0, &grid, cli.jobs)?;
            let out = cli.out.as_deref();
            output::write_scaling(output::sink(out)?, &scaling)?;
            let summary = FitSummary::new(&scaling);
            match out {
                Some(path) => {
                    let json = path.with_extension("json");
                    output::write_json(output::sink(Some(&json))?, &summary)?;
                }
                None => eprintln!(
                    "slope {:.6} (without largest N: {:.6})",
                    summary.slope, summary.slope_without_largest
                ),
            }
            Ok(())
        }
        Command::Semiclassical { points } => {
            let rows = match &cli.config {
                None => default_semiclassical_curves(*points)?,
                Some(_) => {
                    let config = load_config(cli)?;
                    semiclassical_sweep(&config)?
                        .into_iter()
                        .map(|(parameter, control, prediction, norm)| SemiclassicalRow {
                            curve: match config.model {
                                ModelKind::StaticBec => "type_a".into(),
                                _ => "type_b".into(),
                            },
                            parameter,
                            control,
                            prediction,
                            norm,
                        })
                        .collect()
                }
            };
            output::write_semiclassical(output::sink(cli.out.as_deref())?, &rows)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
