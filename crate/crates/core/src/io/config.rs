//! Flat `key = value` experiment files with dotted section keys.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flow::FlowParams;
use crate::model::{CurvatureSpec, FieldState, ModelParams, PotentialFamily, PotentialSpec, SharpState};

/// Every accepted key with its default (`-` when required or absent by default).
pub const CONFIG_KEYS: &[(&str, &str, &str)] = &[
    ("model.eps", "0.05", "interface thickness ε"),
    (
        "model.m",
        "-",
        "prescribed mean phase; defaults to the initial phase mean",
    ),
    ("model.volume_constraint", "true", "enforce the mean phase"),
    (
        "model.potential",
        "quartic",
        "quartic (a(1-v²)²) or single_well (a(1-v)²)",
    ),
    ("model.potential_scale", "1", "potential scale a"),
    ("model.c_minus", "1", "spontaneous curvature of the -1 phase"),
    ("model.c_plus", "2", "spontaneous curvature of the +1 phase"),
    ("grid.n_points", "1024", "grid points"),
    ("grid.length", "-", "curve length; defaults to 2π·radius for circles"),
    ("initial.kind", "circle", "circle, from_file or sharp_recovery"),
    ("initial.radius", "2", "circle radius"),
    ("initial.path", "-", "snapshot CSV for from_file"),
    ("initial.sharp_file", "-", "sharp state file for sharp_recovery"),
    ("initial.eps", "model.eps", "ε of the recovery for sharp_recovery"),
    (
        "initial_phase.kind",
        "-",
        "two_interface, constant or from_file; default keeps the initial state's phase (constant 1 for circles)",
    ),
    ("initial_phase.mean", "0", "mean of the two_interface phase"),
    (
        "initial_phase.positions",
        "L/4,3L/4",
        "arclengths of the two interfaces",
    ),
    ("initial_phase.width", "0.2", "tanh width of the two_interface phase"),
    ("initial_phase.value", "1", "constant phase value"),
    ("initial_phase.path", "-", "snapshot CSV whose v column is used"),
    ("flow.dt", "0.001", "time step"),
    ("flow.max_steps", "100000", "step limit"),
    (
        "flow.energy_tol",
        "1e-6",
        "convergence threshold on the energy decrease rate",
    ),
    ("flow.closure_tol", "1e-8", "closure defect that triggers re-projection"),
    ("flow.implicit_theta", "1", "implicit fraction of the ε terms"),
    (
        "flow.projection_interval",
        "1",
        "steps between unconditional re-projections (0 = off)",
    ),
    (
        "flow.stabilization",
        "1",
        "linear stabilization multiplier (0 = plain IMEX)",
    ),
    ("flow.log_every", "100", "steps between energy log rows"),
    (
        "flow.max_halvings",
        "0",
        "step halvings allowed after an energy increase",
    ),
    (
        "output.directory",
        "out",
        "output directory, relative to the config file",
    ),
    (
        "output.snapshot_every",
        "0",
        "steps between snapshots (0 = first and last only)",
    ),
    ("output.svg", "false", "write an SVG next to every snapshot"),
    ("sweep.eps", "-", "comma-separated decreasing ε list"),
    ("sweep.sharp_file", "-", "sharp state to sweep"),
    ("sweep.points_per_eps", "8", "grid points per L/ε"),
    (
        "sweep.min_points_per_width",
        "8",
        "grid cells across each kink interval 2δ",
    ),
    ("sweep.relax", "false", "relax every recovery with the flow"),
];

/// Help text listing the keys and defaults.
pub fn config_help() -> String {
    let mut s = String::from("Config keys (key = value, '#' starts a comment):\n");
    for (k, d, what) in CONFIG_KEYS {
        s.push_str(&format!("  {k:<28} default {d:<10} {what}\n"));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCurve {
    Circle { radius: f64 },
    FromFile { path: PathBuf },
    SharpRecovery { sharp_file: PathBuf, eps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPhase {
    /// Keep the phase of the initial curve (constant `+1` for a circle).
    Inherit,
    TwoInterface {
        mean: f64,
        positions: [f64; 2],
        width: f64,
    },
    Constant {
        value: f64,
    },
    FromFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub snapshot_every: usize,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub eps: Vec<f64>,
    pub sharp_file: Option<PathBuf>,
    pub points_per_eps: f64,
    pub min_points_per_width: f64,
    pub relax: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Model parameters; `volume` is set only when `model.m` is given
    /// (see [`ExperimentConfig::params_for`]).
    pub model: ModelParams,
    pub volume_constraint: bool,
    pub n_points: usize,
    pub length: f64,
    pub initial: InitialCurve,
    pub initial_phase: InitialPhase,
    pub flow: FlowParams,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some((line, raw)) => raw
                .parse()
                .map_err(|_| Error::Config(format!("line {line}: malformed value {raw:?} for {key}"))),
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((line, raw)) => match raw.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::Config(format!(
                    "line {line}: {key} expects true or false, got {raw:?}"
                ))),
            },
        }
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .split(',')
                .map(|x| x.trim())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<f64>()
                        .map_err(|_| Error::Config(format!("line {line}: malformed number {x:?} in {key}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn path(&mut self, key: &str, base: &Path) -> Option<PathBuf> {
        self.take(key).map(|(_, raw)| base.join(raw))
    }
}

fn existing(path: Option<PathBuf>, key: &str) -> Result<PathBuf> {
    let p = path.ok_or_else(|| Error::Config(format!("{key} is required")))?;
    if !p.is_file() {
        return Err(Error::Config(format!("{key}: file {} does not exist", p.display())));
    }
    Ok(p)
}

impl ExperimentConfig {
    /// Reads and parses a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Model parameters for a run starting from `state`: with the volume
    /// constraint on, `m` defaults to the state's mean phase and must match it.
    /// A pure phase (mean ±1) without an explicit `model.m` runs unconstrained;
    /// the flow conserves the mean either way.
    pub fn params_for(&self, state: &FieldState) -> Result<ModelParams> {
        self.params_with_mean(state.mass() / state.grid.length())
    }

    /// As [`params_for`](Self::params_for), with the mean phase of a sharp state.
    pub fn params_for_sharp(&self, sharp: &SharpState) -> Result<ModelParams> {
        self.params_with_mean(sharp.mass() / sharp.length())
    }

    fn params_with_mean(&self, mean: f64) -> Result<ModelParams> {
        if !self.volume_constraint || (self.model.volume.is_none() && mean.abs() >= 1.0 - 1e-12) {
            return Ok(ModelParams {
                volume: None,
                ..self.model
            });
        }
        let m = self.model.volume.unwrap_or(mean);
        if (mean - m).abs() > 1e-10 {
            return Err(Error::Config(format!(
                "initial phase mean {mean} differs from model.m = {m}"
            )));
        }
        let params = self.model.with_volume(m);
        params.validate().map_err(|err| Error::Config(err.to_string()))?;
        Ok(params)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected key = value")))?;
            let (k, v) = (k.trim(), v.trim());
            if !CONFIG_KEYS.iter().any(|(known, _, _)| *known == k) {
                return Err(Error::Config(format!("line {line_no}: unknown key {k:?}")));
            }
            if map.insert(k.to_string(), (line_no, v.to_string())).is_some() {
                return Err(Error::Config(format!("line {line_no}: duplicate key {k:?}")));
            }
        }
        let mut e = Entries { map };

        let eps = e.parsed("model.eps", 0.05)?;
        let m: Option<f64> = match e.take("model.m") {
            None => None,
            Some((line, raw)) => Some(
                raw.parse()
                    .map_err(|_| Error::Config(format!("line {line}: malformed value {raw:?} for model.m")))?,
            ),
        };
        let volume_constraint = e.boolean("model.volume_constraint", true)?;
        let family = match e.take("model.potential") {
            None => PotentialFamily::QuarticDoubleWell,
            Some((_, s)) if s == "quartic" => PotentialFamily::QuarticDoubleWell,
            Some((_, s)) if s == "single_well" => PotentialFamily::SingleWell,
            Some((line, s)) => return Err(Error::Config(format!("line {line}: unknown potential {s:?}"))),
        };
        let scale = e.parsed("model.potential_scale", 1.0)?;
        let potential = PotentialSpec { family, scale };
        let curvature = CurvatureSpec::new(e.parsed("model.c_minus", 1.0)?, e.parsed("model.c_plus", 2.0)?);
        let mut model = ModelParams::new(eps, potential, curvature);
        if let (true, Some(m)) = (volume_constraint, m) {
            model = model.with_volume(m);
        }
        model.validate().map_err(|err| Error::Config(err.to_string()))?;

        let n_points = e.parsed("grid.n_points", 1024usize)?;
        let length_given: Option<f64> = match e.take("grid.length") {
            None => None,
            Some((line, raw)) => Some(
                raw.parse()
                    .map_err(|_| Error::Config(format!("line {line}: malformed value {raw:?} for grid.length")))?,
            ),
        };

        let kind = e.take("initial.kind").unwrap_or((0, "circle".into()));
        let radius: f64 = e.parsed("initial.radius", 2.0)?;
        let initial = match kind.1.as_str() {
            "circle" => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Config(format!("initial.radius must be positive, got {radius}")));
                }
                InitialCurve::Circle { radius }
            }
            "from_file" => InitialCurve::FromFile {
                path: existing(e.path("initial.path", base), "initial.path")?,
            },
            "sharp_recovery" => InitialCurve::SharpRecovery {
                sharp_file: existing(e.path("initial.sharp_file", base), "initial.sharp_file")?,
                eps: e.parsed("initial.eps", eps)?,
            },
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown initial.kind {other:?}",
                    kind.0
                )))
            }
        };
        let length = match (&initial, length_given) {
            (InitialCurve::Circle { radius }, Some(l)) => {
                if (TAU * radius - l).abs() > 1e-12 * l.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "circle of radius {radius} has length {}, but grid.length is {l}",
                        TAU * radius
                    )));
                }
                l
            }
            (InitialCurve::Circle { radius }, None) => TAU * radius,
            (_, Some(l)) => l,
            (_, None) => f64::NAN,
        };

        let initial_phase = match e.take("initial_phase.kind") {
            None => InitialPhase::Inherit,
            Some((line, k)) => match k.as_str() {
                "two_interface" => {
                    let positions = match e.floats("initial_phase.positions")? {
                        None if length.is_finite() => [0.25 * length, 0.75 * length],
                        None => {
                            return Err(Error::Config(
                                "initial_phase.positions is required without grid.length".into(),
                            ))
                        }
                        Some(p) if p.len() == 2 => [p[0], p[1]],
                        Some(p) => {
                            return Err(Error::Config(format!(
                                "initial_phase.positions needs 2 values, got {}",
                                p.len()
                            )))
                        }
                    };
                    InitialPhase::TwoInterface {
                        mean: e.parsed("initial_phase.mean", 0.0)?,
                        positions,
                        width: e.parsed("initial_phase.width", 0.2)?,
                    }
                }
                "constant" => InitialPhase::Constant {
                    value: e.parsed("initial_phase.value", 1.0)?,
                },
                "from_file" => InitialPhase::FromFile {
                    path: existing(e.path("initial_phase.path", base), "initial_phase.path")?,
                },
                other => {
                    return Err(Error::Config(format!(
                        "line {line}: unknown initial_phase.kind {other:?}"
                    )))
                }
            },
        };

        let d = FlowParams::default();
        let flow = FlowParams {
            dt: e.parsed("flow.dt", d.dt)?,
            max_steps: e.parsed("flow.max_steps", d.max_steps)?,
            energy_tol: e.parsed("flow.energy_tol", d.energy_tol)?,
            closure_tol: e.parsed("flow.closure_tol", d.closure_tol)?,
            implicit_theta: e.parsed("flow.implicit_theta", d.implicit_theta)?,
            projection_interval: e.parsed("flow.projection_interval", d.projection_interval)?,
            stabilization: e.parsed("flow.stabilization", d.stabilization)?,
            log_every: e.parsed("flow.log_every", d.log_every)?,
            snapshot_every: e.parsed("output.snapshot_every", 0usize)?,
            max_halvings: e.parsed("flow.max_halvings", d.max_halvings)?,
        };
        flow.validate().map_err(|err| Error::Config(err.to_string()))?;

        let output = OutputConfig {
            directory: e.path("output.directory", base).unwrap_or_else(|| base.join("out")),
            snapshot_every: flow.snapshot_every,
            svg: e.boolean("output.svg", false)?,
        };

        let sweep = SweepConfig {
            eps: e.floats("sweep.eps")?.unwrap_or_default(),
            sharp_file: match e.path("sweep.sharp_file", base) {
                None => None,
                p => Some(existing(p, "sweep.sharp_file")?),
            },
            points_per_eps: e.parsed("sweep.points_per_eps", 8.0)?,
            min_points_per_width: e.parsed("sweep.min_points_per_width", 8.0)?,
            relax: e.boolean("sweep.relax", false)?,
        };

        Ok(Self {
            model,
            volume_constraint,
            n_points,
            length,
            initial,
            initial_phase,
            flow,
            output,
            sweep,
        })
    }
}
