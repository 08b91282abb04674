//! Command-line front end: `evolve`, `sweep`, `recover` and `energy`.
//!
//! Exit codes: 0 on success, 2 for configuration, usage and input errors,
//! 3 when the flow blows up.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{gamma_sweep, GridPolicy};
use crate::error::{Error, Result};
use crate::flow::{run_flow, Snapshot, StopReason};
use crate::io::{
    config_help, format_energy, read_sharp, read_snapshot, render_svg, write_energy_log, write_snapshot, write_sweep,
    ExperimentConfig, InitialCurve, InitialPhase, SnapshotRecord,
};
use crate::model::{energy_eps, FieldState, Grid, ModelParams};
use crate::recovery::build_recovery;
use crate::setup::two_interface_phase;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;

/// Caps the worker threads of `sweep`.
pub const THREADS_ENV: &str = "KINKFLOW_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "kinkflow",
    version,
    about = "Phase-field flows and sharp-interface limits of two-phase elastic curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Experiment file (see `kinkflow help evolve` for the keys).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the gradient flow; writes energy_log.csv and snapshots.
    #[command(after_help = config_help())]
    Evolve {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory (overrides output.directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recovery energies over a decreasing list of ε; writes sweep.csv.
    #[command(after_help = config_help())]
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated decreasing ε values (overrides sweep.eps).
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Sharp state file (overrides sweep.sharp_file).
        #[arg(long)]
        sharp: Option<PathBuf>,
        /// Relax every recovery with the flow.
        #[arg(long)]
        relax: bool,
        /// Worker threads; KINKFLOW_THREADS caps this.
        #[arg(long)]
        threads: Option<usize>,
        /// Output CSV (default: <output.directory>/sweep.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the recovery state of a sharp state; writes a snapshot CSV.
    #[command(after_help = config_help())]
    Recover {
        #[command(flatten)]
        config: ConfigArg,
        /// Sharp state file (default: initial.sharp_file or sweep.sharp_file).
        #[arg(long)]
        sharp: Option<PathBuf>,
        /// ε of the recovery (default: model.eps).
        #[arg(long)]
        eps: Option<f64>,
        /// Grid points (default: grid.n_points).
        #[arg(long)]
        n_points: Option<usize>,
        /// Output CSV (default: <output.directory>/recovery.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the energy of a snapshot as key=value lines.
    #[command(after_help = config_help())]
    Energy {
        #[command(flatten)]
        config: ConfigArg,
        /// Snapshot CSV.
        #[arg(long)]
        state: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Evolve { config, out } => cmd_evolve(&config.config, out.as_deref()),
        Command::Sweep {
            config,
            eps,
            sharp,
            relax,
            threads,
            out,
        } => cmd_sweep(&config.config, eps, sharp, relax, threads, out),
        Command::Recover {
            config,
            sharp,
            eps,
            n_points,
            out,
        } => cmd_recover(&config.config, sharp, eps, n_points, out),
        Command::Energy { config, state } => cmd_energy(&config.config, &state),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn check_length(cfg: &ExperimentConfig, actual: f64) -> Result<()> {
    if cfg.length.is_finite() && (cfg.length - actual).abs() > 1e-12 * actual {
        return Err(Error::Config(format!(
            "grid.length {} differs from the input's length {actual}",
            cfg.length
        )));
    }
    Ok(())
}

/// The initial field state described by a config.
pub fn build_initial(cfg: &ExperimentConfig) -> Result<FieldState> {
    let mut state = match &cfg.initial {
        InitialCurve::Circle { .. } => {
            let grid = Grid::new(cfg.n_points, cfg.length)?;
            FieldState::circle(grid, vec![1.0; cfg.n_points])?
        }
        InitialCurve::FromFile { path } => {
            let rec = read_snapshot(&read_file(path)?)?;
            check_length(cfg, rec.state.grid.length())?;
            rec.state
        }
        InitialCurve::SharpRecovery { sharp_file, eps } => {
            let sharp = read_sharp(&read_file(sharp_file)?)?;
            check_length(cfg, sharp.length())?;
            let grid = Grid::new(cfg.n_points, sharp.length())?;
            let params = cfg.params_for_sharp(&sharp)?;
            build_recovery(&sharp, grid, &params.with_eps(*eps))?.state
        }
    };
    let grid = state.grid;
    match &cfg.initial_phase {
        InitialPhase::Inherit => {}
        InitialPhase::TwoInterface { mean, positions, width } => {
            state.v = two_interface_phase(&grid, *mean, *positions, *width)?;
        }
        InitialPhase::Constant { value } => state.v = vec![*value; grid.n_points()],
        InitialPhase::FromFile { path } => {
            let rec = read_snapshot(&read_file(path)?)?;
            if rec.state.n_points() != grid.n_points() {
                return Err(Error::Config(format!(
                    "phase file has {} points, the initial curve {}",
                    rec.state.n_points(),
                    grid.n_points()
                )));
            }
            state.v = rec.state.v;
        }
    }
    Ok(state)
}

fn write_snapshot_files(dir: &Path, name: &str, rec: &SnapshotRecord, svg: bool) -> Result<()> {
    write_file(&dir.join(format!("{name}.csv")), &write_snapshot(rec))?;
    if svg {
        write_file(&dir.join(format!("{name}.svg")), &render_svg(&rec.state))?;
    }
    Ok(())
}

pub fn cmd_evolve(config: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg = ExperimentConfig::load(config)?;
    let start = build_initial(&cfg)?;
    let params = cfg.params_for(&start)?;
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.directory.clone());
    std::fs::create_dir_all(&dir)?;

    let mut write_error = None;
    let res = run_flow(&start, &params, &cfg.flow, |snap: &Snapshot<'_>| {
        let rec = SnapshotRecord {
            step: snap.step,
            time: snap.time,
            energy: *snap.energy,
            state: snap.state.clone(),
        };
        if let Err(e) = write_snapshot_files(&dir, &format!("snapshot_{:06}", snap.step), &rec, cfg.output.svg) {
            write_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    write_file(&dir.join("energy_log.csv"), &write_energy_log(&res.energy_log))?;
    if res.stop_reason == StopReason::BlowUp {
        eprintln!(
            "blow_up after {} steps (t = {}): {}",
            res.steps,
            res.time,
            res.diagnostic.as_deref().unwrap_or("non-finite state")
        );
        return Ok(EXIT_BLOW_UP);
    }
    let last = res.energy_log.last().expect("the log always holds the final step");
    let final_rec = SnapshotRecord {
        step: res.steps,
        time: res.time,
        energy: last.energy,
        state: res.final_state,
    };
    write_snapshot_files(&dir, "final", &final_rec, cfg.output.svg)?;
    println!(
        "{} after {} steps, t = {}, energy {} (increases: {}, max mass defect {:e}, max closure defect {:e})",
        res.stop_reason.name(),
        res.steps,
        res.time,
        last.energy.total,
        res.energy_increases,
        res.max_mass_defect,
        res.max_closure_defect
    );
    Ok(EXIT_OK)
}

/// Worker count from the flag, capped by `KINKFLOW_THREADS`.
pub fn sweep_threads(flag: Option<usize>) -> Result<Option<usize>> {
    let cap = match std::env::var(THREADS_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}")))?,
        ),
        Err(_) => None,
    };
    if flag == Some(0) {
        return Err(Error::Config("--threads must be positive".into()));
    }
    Ok(match (flag, cap) {
        (Some(f), Some(c)) => Some(f.min(c)),
        (f, c) => f.or(c),
    })
}

pub fn cmd_sweep(
    config: &Path,
    eps: Option<Vec<f64>>,
    sharp: Option<PathBuf>,
    relax: bool,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> Result<i32> {
    let cfg = ExperimentConfig::load(config)?;
    let eps = eps.unwrap_or_else(|| cfg.sweep.eps.clone());
    if eps.is_empty() {
        return Err(Error::Config("no eps values: pass --eps or set sweep.eps".into()));
    }
    let sharp_path = sharp
        .or_else(|| cfg.sweep.sharp_file.clone())
        .ok_or_else(|| Error::Config("no sharp state: pass --sharp or set sweep.sharp_file".into()))?;
    let sharp = read_sharp(&read_file(&sharp_path)?)?;
    let params = cfg.params_for_sharp(&sharp)?;
    let policy = GridPolicy {
        points_per_eps: cfg.sweep.points_per_eps,
        min_points_per_width: cfg.sweep.min_points_per_width,
    };
    let relax = (relax || cfg.sweep.relax).then_some(&cfg.flow);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads(threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let table = pool.install(|| gamma_sweep(&sharp, &eps, &params, &policy, relax))?;
    let csv = write_sweep(&table);
    let path = out.unwrap_or_else(|| cfg.output.directory.join("sweep.csv"));
    write_file(&path, &csv)?;
    print!("{csv}");
    Ok(EXIT_OK)
}

pub fn cmd_recover(
    config: &Path,
    sharp: Option<PathBuf>,
    eps: Option<f64>,
    n_points: Option<usize>,
    out: Option<PathBuf>,
) -> Result<i32> {
    let cfg = ExperimentConfig::load(config)?;
    let sharp_path = sharp
        .or_else(|| match &cfg.initial {
            InitialCurve::SharpRecovery { sharp_file, .. } => Some(sharp_file.clone()),
            _ => None,
        })
        .or_else(|| cfg.sweep.sharp_file.clone())
        .ok_or_else(|| Error::Config("no sharp state: pass --sharp or set initial.sharp_file".into()))?;
    let sharp = read_sharp(&read_file(&sharp_path)?)?;
    let eps = eps.unwrap_or(cfg.model.eps);
    let grid = Grid::new(n_points.unwrap_or(cfg.n_points), sharp.length())?;
    let params = cfg.params_for_sharp(&sharp)?.with_eps(eps);
    let rec = build_recovery(&sharp, grid, &params)?;
    let energy = energy_eps(&rec.state, &params)?;
    let record = SnapshotRecord {
        step: 0,
        time: 0.0,
        energy,
        state: rec.state,
    };
    let path = out.unwrap_or_else(|| cfg.output.directory.join("recovery.csv"));
    write_file(&path, &write_snapshot(&record))?;
    if cfg.output.svg {
        write_file(&path.with_extension("svg"), &render_svg(&record.state))?;
    }
    print!("{}", format_energy(&energy));
    Ok(EXIT_OK)
}

pub fn cmd_energy(config: &Path, state: &Path) -> Result<i32> {
    let cfg = ExperimentConfig::load(config)?;
    let rec = read_snapshot(&read_file(state)?)?;
    let params = ModelParams {
        volume: None,
        ..cfg.model
    };
    let e = energy_eps(&rec.state, &params)?;
    print!("{}", format_energy(&e));
    Ok(EXIT_OK)
}
