//! Command-line front end.
//!
//! Exit codes: 0 biconcave / all checks pass, 1 runtime error, 2 other
//! classification, 3 anomaly in a sweep, 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use helfrich::analysis::ClassKind;
use helfrich::bounds::phase_sweep;
use helfrich::export::config::{ConfigLayer, Format, RunConfig};
use helfrich::export::{self, csv, report};
use helfrich::ode::integrate;
use helfrich::{Error, HelfrichParams};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NOT_BICONCAVE: u8 = 2;
const EXIT_ANOMALY: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Rows in profile.csv.
const CSV_SAMPLES: usize = 1000;

#[derive(Parser, Debug)]
#[command(name = "helfrich", version, about = "Axisymmetric Helfrich shape solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate one profile and write profile.csv and report.json.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Output formats (comma separated).
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<Format>>,
    },
    /// Check the bounds over a sweep of initial slopes.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sweep_min: Option<f64>,
        #[arg(long)]
        sweep_max: Option<f64>,
        #[arg(long)]
        sweep_points: Option<usize>,
    },
    /// Classify a parameter grid and write phase.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        c0_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w0p_range: Option<String>,
    },
    /// Write profile.svg, from a profile.csv or from solve flags.
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Write mesh.obj of the closed surface.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        segments_theta: Option<usize>,
        #[arg(long)]
        segments_profile: Option<usize>,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON file keyed by flag names; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    c0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    w0p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rel_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    abs_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    w_switch: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
    /// Output directory (default: $OUTPUT_DIR or the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            c0: self.c0,
            lambda: self.lambda,
            p: self.p,
            w0p: self.w0p,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            eps_start: self.eps_start,
            w_switch: self.w_switch,
            r_max: self.r_max,
            out: self.out.clone(),
            ..Default::default()
        }
    }

    fn resolve(&self, extra: ConfigLayer) -> helfrich::Result<RunConfig> {
        let file = self.config.as_deref().map(ConfigLayer::from_file).transpose()?;
        RunConfig::layered(extra.over(self.layer()), file, ConfigLayer::env_defaults())
    }
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn class_exit(kind: ClassKind) -> u8 {
    if kind == ClassKind::Biconcave {
        EXIT_OK
    } else {
        EXIT_NOT_BICONCAVE
    }
}

fn solve(cfg: &RunConfig) -> Result<u8, Failure> {
    let traj = integrate(&cfg.params, cfg.w0p, &cfg.solver).context("integration failed")?;
    let rep = report::solve_report(&traj).context("analysis failed")?;
    let kind = rep.kind();
    for fmt in &cfg.formats {
        let path = match fmt {
            Format::Csv => {
                let samples = csv::profile_samples(&traj, CSV_SAMPLES).context("sampling profile")?;
                write_file(&cfg.out, "profile.csv", &csv::profile_to_string(&samples))?
            }
            Format::Json => {
                let json = serde_json::to_string_pretty(&rep).context("serializing report")?;
                write_file(&cfg.out, "report.json", &(json + "\n"))?
            }
            Format::Svg | Format::Obj if kind != ClassKind::Biconcave => {
                eprintln!("skipping {fmt:?} output: classification is {kind}");
                continue;
            }
            Format::Svg => write_file(&cfg.out, "profile.svg", &export::plot_svg(&traj)?)?,
            Format::Obj => {
                let mesh = export::mesh(&traj, cfg.segments_theta, cfg.segments_profile)?;
                write_file(&cfg.out, "mesh.obj", &mesh.to_obj())?
            }
        };
        eprintln!("wrote {}", path.display());
    }
    println!("{kind}");
    Ok(class_exit(kind))
}

fn verify(cfg: &RunConfig) -> Result<u8, Failure> {
    let rep = report::verify(&cfg.params, &cfg.sweep_grid(), &cfg.solver);
    let json = serde_json::to_string_pretty(&rep).context("serializing report")?;
    let path = write_file(&cfg.out, "bounds_report.json", &(json + "\n"))?;
    eprintln!("wrote {}", path.display());
    for x in &rep.excluded {
        eprintln!("excluded w0'={:e}: {}", x.w0p, x.reason);
    }
    for f in &rep.failures {
        eprintln!("FAIL {f}");
    }
    println!("{} points checked, {} excluded, {} failures", rep.points.len(), rep.excluded.len(), rep.failures.len());
    Ok(if rep.all_pass { EXIT_OK } else { EXIT_ERROR })
}

fn sweep(cfg: &RunConfig) -> Result<u8, Failure> {
    let mut cells = Vec::new();
    for &c0 in &cfg.c0_range {
        for &lambda in &cfg.lambda_range {
            for &p in &cfg.p_range {
                for &w in &cfg.w0p_range {
                    cells.push((HelfrichParams::new(c0, lambda, p), w));
                }
            }
        }
    }
    let out = phase_sweep(&cells, &cfg.solver);
    let path = write_file(&cfg.out, "phase.csv", &report::phase_csv(&out))?;
    eprintln!("wrote {}", path.display());
    let anomalies: Vec<_> = out.iter().filter(|c| c.anomaly).collect();
    for c in &anomalies {
        eprintln!(
            "ANOMALY c0={} lambda={} p={} w0'={}: {}",
            c.params.c0, c.params.lambda, c.params.p, c.w0p, c.classification
        );
    }
    println!("{} cells, {} anomalies", out.len(), anomalies.len());
    Ok(if anomalies.is_empty() { EXIT_OK } else { EXIT_ANOMALY })
}

/// Half profile `(r, height)` from a profile table that runs from the axis
/// to the equator. `None` if the table does not describe a two-dimpled
/// closed profile.
fn half_from_table(rows: &[[f64; 7]]) -> Option<Vec<(f64, f64)>> {
    let last = rows.last()?;
    // the equator row has a vertical tangent
    if rows.len() < 3 || rows[0][0] != 0.0 || last[2] > -1e6 {
        return None;
    }
    let z_inf = last[1];
    let half: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1] - z_inf)).collect();
    let top = half.iter().map(|h| h.1).fold(f64::NEG_INFINITY, f64::max);
    (half[0].1 < top && z_inf < 0.0).then_some(half)
}

fn plot(cfg: &RunConfig, input: Option<&Path>) -> Result<u8, Failure> {
    let svg = match input {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let rows = csv::parse_profile(&text).map_err(|m| anyhow::anyhow!("{}: {m}", path.display()))?;
            match half_from_table(&rows) {
                Some(half) => export::plot_half(&half, &cfg.params, cfg.w0p),
                None => {
                    eprintln!("{} does not describe a biconcave profile", path.display());
                    return Ok(EXIT_NOT_BICONCAVE);
                }
            }
        }
        None => {
            let traj = integrate(&cfg.params, cfg.w0p, &cfg.solver).context("integration failed")?;
            match export::plot_svg(&traj) {
                Ok(svg) => svg,
                Err(Error::NotBiconcave(kind)) => {
                    eprintln!("not biconcave: {kind}");
                    return Ok(EXIT_NOT_BICONCAVE);
                }
                Err(e) => return Err(Failure::Runtime(e.into())),
            }
        }
    };
    let path = write_file(&cfg.out, "profile.svg", &svg)?;
    eprintln!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn mesh(cfg: &RunConfig) -> Result<u8, Failure> {
    let traj = integrate(&cfg.params, cfg.w0p, &cfg.solver).context("integration failed")?;
    let mesh = match export::mesh(&traj, cfg.segments_theta, cfg.segments_profile) {
        Ok(m) => m,
        Err(Error::NotBiconcave(kind)) => {
            eprintln!("not biconcave: {kind}");
            return Ok(EXIT_NOT_BICONCAVE);
        }
        Err(e) => return Err(Failure::Runtime(e.into())),
    };
    let path = write_file(&cfg.out, "mesh.obj", &mesh.to_obj())?;
    eprintln!("wrote {}", path.display());
    let totals = helfrich::analysis::surface_totals(&traj).context("surface totals")?;
    println!(
        "vertices {} faces {} area {:.6e} (surface {:.6e}) volume {:.6e} (surface {:.6e})",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.area(),
        totals.area,
        mesh.volume(),
        totals.volume
    );
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Solve { common, format } => {
            let cfg = common.resolve(ConfigLayer { format, ..Default::default() }).map_err(usage)?;
            solve(&cfg)
        }
        Cmd::Verify { common, sweep_min, sweep_max, sweep_points } => {
            let extra = ConfigLayer { sweep_min, sweep_max, sweep_points, ..Default::default() };
            verify(&common.resolve(extra).map_err(usage)?)
        }
        Cmd::Sweep { common, c0_range, lambda_range, p_range, w0p_range } => {
            let extra = ConfigLayer { c0_range, lambda_range, p_range, w0p_range, ..Default::default() };
            sweep(&common.resolve(extra).map_err(usage)?)
        }
        Cmd::Plot { common, input } => plot(&common.resolve(ConfigLayer::default()).map_err(usage)?, input.as_deref()),
        Cmd::Mesh { common, segments_theta, segments_profile } => {
            let extra = ConfigLayer { segments_theta, segments_profile, ..Default::default() };
            mesh(&common.resolve(extra).map_err(usage)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
