//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration or validation error,
//! 3 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::channel::{venturi_reduction_curve, AnalyticalCir};
use crate::config::{load_config, ConfigFile, FlowKind, RunManifest};
use crate::defaults;
use crate::error::Error;
use crate::geometry::VesselGeometry;
use crate::rheology::FluidModel;
use crate::table::{Cell, Table};
use crate::transport::run_with_threads;

pub const THREADS_ENV: &str = "MC_PLAQUE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "plaque-channel", version, about = "Channel models for plaque-obstructed blood vessels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Velocity profiles of the three fluid models across the vessel.
    Profile(ProfileArgs),
    /// Impulse responses.
    Cir {
        #[command(subcommand)]
        kind: CirKind,
    },
    /// Traversal-time reduction against plaque size.
    Venturi(VenturiArgs),
    /// The active inlet waveform.
    Waveform(WaveformArgs),
    /// Monte-Carlo particle transport.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum CirKind {
    /// Closed-form straight-channel responses.
    Analytic(CirArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write the table here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = defaults::MEAN_SPEED)]
    u_avg: f64,
    #[arg(long, default_value_t = defaults::CHANNEL_RADIUS)]
    r_c: f64,
    /// Yield-surface position of the Herschel-Bulkley fluid.
    #[arg(long, default_value_t = defaults::YIELD_SURFACE)]
    zeta: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CirArgs {
    #[arg(long, default_value_t = defaults::MEAN_SPEED)]
    u_avg: f64,
    #[arg(long, default_value_t = defaults::CHANNEL_LENGTH)]
    l_c: f64,
    #[arg(long, default_value_t = defaults::YIELD_SURFACE)]
    zeta: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.5)]
    t_end: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct VenturiArgs {
    /// Channel lengths [m].
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [25e-3, 50e-3, 75e-3, 100e-3])]
    lc: Vec<f64>,
    /// Plaque sizes per length, `r_p / r_c = i / samples`.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct WaveformArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sampling interval [s].
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `ps`, `ed`, `ld` or `t=<seconds>`; implies pulsatile flow.
    #[arg(long)]
    release: Option<String>,
    #[arg(long)]
    rp_rel: Option<f64>,
    #[arg(long)]
    particles: Option<usize>,
    /// Directory receiving `cir.csv` and `manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the environment.
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Validation(_) | Error::Waveform(_) | Error::Unyielded { .. } => {
                Failure::Config(e)
            }
            Error::Domain(_) | Error::Io(_) => Failure::Runtime(e),
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Profile(a) => emit(&profile_table(&a)?, &a.output),
        Command::Cir {
            kind: CirKind::Analytic(a),
        } => emit(&cir_table(&a)?, &a.output),
        Command::Venturi(a) => emit(&venturi_table(&a)?, &a.output),
        Command::Waveform(a) => emit(&waveform_table(&a)?, &a.output),
        Command::Simulate(a) => simulate(&a),
    }
}

fn emit(table: &Table, output: &Output) -> Result<(), Failure> {
    match &output.out {
        Some(path) => table.write_csv(path)?,
        None => std::io::stdout()
            .write_all(table.to_csv().as_bytes())
            .map_err(Error::from)?,
    }
    Ok(())
}

fn reference_fluids(zeta: f64) -> [FluidModel; 3] {
    [
        FluidModel::blood_newtonian(),
        FluidModel::blood_power_law(),
        FluidModel {
            yield_surface: zeta,
            ..FluidModel::blood_herschel_bulkley()
        },
    ]
}

fn check_fluids(fluids: &[FluidModel]) -> Result<(), Failure> {
    let errors: Vec<String> = fluids.iter().filter_map(|f| f.validate().err()).flatten().collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(errors).into())
    }
}

fn profile_table(a: &ProfileArgs) -> Result<Table, Failure> {
    if a.points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    if !(a.u_avg > 0.0 && a.r_c > 0.0) {
        return Err(Error::Validation(vec!["--u-avg and --r-c must be positive".into()]).into());
    }
    let fluids = reference_fluids(a.zeta);
    check_fluids(&fluids)?;
    let mut t = Table::new(["rho_m", "u_newtonian_m_s", "u_power_law_m_s", "u_herschel_bulkley_m_s"]);
    for i in 0..a.points {
        let rho = -a.r_c + 2.0 * a.r_c * i as f64 / (a.points - 1) as f64;
        let mut row = vec![Cell::Float(rho)];
        for f in &fluids {
            let u0 = f.centerline_ratio() * a.u_avg;
            row.push(f.axial_velocity(u0, a.r_c, rho.abs().min(a.r_c))?.into());
        }
        t.push(row)?;
    }
    Ok(t)
}

fn cir_table(a: &CirArgs) -> Result<Table, Failure> {
    if !(a.dt > 0.0 && a.t_end > 0.0) {
        return Err(Error::Validation(vec!["--dt and --t-end must be positive".into()]).into());
    }
    let fluids = reference_fluids(a.zeta);
    check_fluids(&fluids)?;
    let cirs = fluids
        .iter()
        .map(|&f| AnalyticalCir::from_mean_speed(f, a.u_avg, a.l_c))
        .collect::<Result<Vec<_>, _>>()?;
    let steps = (a.t_end / a.dt * (1.0 - 1e-12)).ceil() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * a.dt).collect();
    grid.extend(cirs.iter().map(|c| c.first_arrival()).filter(|&t| t <= a.t_end));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut t = Table::new(["t_s", "h_newtonian", "h_power_law", "h_herschel_bulkley"]);
    for time in grid {
        let mut row = vec![Cell::Float(time)];
        row.extend(cirs.iter().map(|c| Cell::Float(c.eval(time))));
        t.push(row)?;
    }
    Ok(t)
}

fn venturi_table(a: &VenturiArgs) -> Result<Table, Failure> {
    if a.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let template = VesselGeometry::default();
    let points = venturi_reduction_curve(&template, &a.lc, a.samples)
        .map_err(|e| Failure::Config(Error::Validation(vec![e.to_string()])))?;
    let mut t = Table::new(["l_c_m", "r_p_rel", "reduction", "speed_increase"]);
    for p in points {
        t.push(vec![
            p.l_c.into(),
            p.plaque_rel.into(),
            p.reduction.into(),
            p.speed_increase.into(),
        ])?;
    }
    Ok(t)
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ConfigFile::default()),
    }
}

fn waveform_table(a: &WaveformArgs) -> Result<Table, Failure> {
    if !(a.resolution > 0.0 && a.resolution.is_finite()) {
        return Err(Error::Validation(vec!["--resolution must be positive".into()]).into());
    }
    let cfg = read_config(a.config.as_deref())?;
    let r_c = cfg.channel.r_c;
    let mut waveform = cfg.waveform()?;
    if cfg.flow.normalize {
        waveform = waveform.normalize_mean(cfg.flow.u_avg, r_c)?;
    }
    let steps = (waveform.period() / a.resolution * (1.0 - 1e-12)).ceil() as usize;
    let mut t = Table::new(["t_s", "flow_rate_ml_per_s", "u_avg_m_s"]);
    for k in 0..=steps {
        let time = (k as f64 * a.resolution).min(waveform.period());
        t.push(vec![
            time.into(),
            waveform.flow_rate_at(time).into(),
            waveform.mean_velocity_at(time, r_c).into(),
        ])?;
    }
    Ok(t)
}

/// Worker count from the flag, else the environment, else all cores.
fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let mut cfg = read_config(a.config.as_deref())?;
    if let Some(seed) = a.seed {
        cfg.sim.seed = seed;
    }
    if let Some(rel) = a.rp_rel {
        cfg.channel.r_p = None;
        cfg.channel.r_p_rel = Some(rel);
    }
    if let Some(n) = a.particles {
        cfg.particles.count = n;
    }
    if let Some(release) = &a.release {
        cfg.flow.mode = FlowKind::Pulsatile;
        cfg.flow.release = release.clone();
    }
    let threads = thread_count(a.threads)?;
    let sim = cfg.to_simulation()?;
    let hash = cfg.hash()?;

    let started = Instant::now();
    let mut output = run_with_threads(&sim, threads)?;
    let elapsed = started.elapsed().as_secs_f64();
    output.cir.config_hash = Some(hash);

    let mut table = Table::new(["t_release_s", "n_received"]);
    for (&t, &n) in output.cir.times.iter().zip(&output.cir.counts) {
        table.push(vec![t.into(), n.into()])?;
    }
    match &a.out {
        None => emit(&table, &Output { out: None }),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            let csv = dir.join("cir.csv");
            table.write_csv(&csv)?;
            let manifest = RunManifest::new(&cfg, vec![csv], elapsed)?;
            std::fs::write(dir.join("manifest.json"), manifest.to_json()).map_err(Error::from)?;
            Ok(())
        }
    }
}
