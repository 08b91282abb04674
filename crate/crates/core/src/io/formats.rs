//! Text formats: snapshot CSV, sharp-state files, energy logs and sweep tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back gives bit-identical values and reruns give identical bytes.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::analysis::SweepTable;
use crate::error::{Error, Result};
use crate::flow::LogEntry;
use crate::model::{
    reconstruct_curve, EnergyBreakdown, FieldState, Grid, Junction, JunctionKind, Phase, Segment, SharpState,
};

pub const ENERGY_LOG_HEADER: &str =
    "step,time,e_total,e_curvature,e_interface,e_regularization,mass_defect,closure_x,closure_y";
pub const SWEEP_HEADER: &str =
    "eps,n_points,e_recovery_total,e_recovery_curv,e_recovery_int,e_recovery_reg,e_relaxed_total,e_sharp_total,gap";
pub const SNAPSHOT_COLUMNS: &str = "t,u,v,x,y";

fn parse_err(context: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        context: context.to_string(),
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(context: &str, what: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| parse_err(context, format!("malformed {what} {raw:?}")))
}

/// A field state with the step, time and energy it was recorded at.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub step: usize,
    pub time: f64,
    pub energy: EnergyBreakdown,
    pub state: FieldState,
}

/// Header lines `# key=value`, then `t,u,v,x,y` for every node plus the
/// closing point (`t = L`, angle advanced by `2π·winding`, phase of node 0).
pub fn write_snapshot(rec: &SnapshotRecord) -> String {
    let s = &rec.state;
    let n = s.n_points();
    let e = &rec.energy;
    let mut out = String::new();
    for (k, v) in [
        ("step", rec.step.to_string()),
        ("time", rec.time.to_string()),
        ("n_points", n.to_string()),
        ("length", s.grid.length().to_string()),
        ("winding", s.winding.to_string()),
        ("e_total", e.total.to_string()),
        ("e_curvature", e.curvature.to_string()),
        ("e_interface", e.interface.to_string()),
        ("e_regularization", e.regularization.to_string()),
    ] {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(SNAPSHOT_COLUMNS);
    out.push('\n');
    let points = reconstruct_curve(s, [0.0, 0.0]);
    for (i, p) in points.iter().enumerate() {
        let (t, u, v) = if i < n {
            (s.grid.position(i), s.u[i], s.v[i])
        } else {
            (s.grid.length(), s.u[0] + TAU * s.winding as f64, s.v[0])
        };
        let _ = writeln!(out, "{t},{u},{v},{},{}", p[0], p[1]);
    }
    out
}

pub fn read_snapshot(text: &str) -> Result<SnapshotRecord> {
    const CTX: &str = "snapshot";
    let mut header = std::collections::BTreeMap::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.trim().split_once('=') {
            header.insert(k.trim().to_string(), v.trim().to_string());
        }
        lines.next();
    }
    let get = |k: &str| {
        header
            .get(k)
            .ok_or_else(|| parse_err(CTX, format!("missing header {k}")))
    };
    let n: usize = num(CTX, "n_points", get("n_points")?)?;
    let length: f64 = num(CTX, "length", get("length")?)?;
    let winding: i64 = num(CTX, "winding", get("winding")?)?;
    let step = header.get("step").map_or(Ok(0), |x| num(CTX, "step", x))?;
    let time = header.get("time").map_or(Ok(0.0), |x| num(CTX, "time", x))?;
    let part = |k: &str| header.get(k).map_or(Ok(f64::NAN), |x| num::<f64>(CTX, k, x));
    let energy = EnergyBreakdown::new(part("e_curvature")?, part("e_interface")?, part("e_regularization")?);
    match lines.next() {
        Some((_, l)) if l.trim() == SNAPSHOT_COLUMNS => {}
        _ => return Err(parse_err(CTX, format!("expected column line {SNAPSHOT_COLUMNS}"))),
    }
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut rows = 0;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        if rows > n {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(parse_err(CTX, format!("line {}: expected 5 columns", idx + 1)));
        }
        u.push(num(CTX, "u", cols[1])?);
        v.push(num(CTX, "v", cols[2])?);
    }
    if rows != n + 1 {
        return Err(parse_err(CTX, format!("expected {} rows, found {rows}", n + 1)));
    }
    let state = FieldState::new(Grid::new(n, length)?, u, winding, v)?;
    Ok(SnapshotRecord {
        step,
        time,
        energy,
        state,
    })
}

/// One line per segment and junction, in curve order:
///
/// ```text
/// segment <length> <phase: +1|-1> <curvature samples...>
/// junction <signed turn> <interface|ghost|plain_interface>
/// ```
///
/// Junction `i` follows segment `i`. Lines starting with `#` are comments.
pub fn write_sharp(sharp: &SharpState) -> String {
    let mut out = String::new();
    for (i, seg) in sharp.segments.iter().enumerate() {
        let phase = match seg.phase {
            Phase::Plus => "+1",
            Phase::Minus => "-1",
        };
        let _ = write!(out, "segment {} {phase}", seg.length);
        for k in &seg.curvature {
            let _ = write!(out, " {k}");
        }
        out.push('\n');
        if let Some(j) = sharp.junctions.get(i) {
            let _ = writeln!(out, "junction {} {}", j.turn, j.kind.name());
        }
    }
    out
}

pub fn read_sharp(text: &str) -> Result<SharpState> {
    const CTX: &str = "sharp state";
    let mut segments = Vec::new();
    let mut junctions = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let at = |m: String| parse_err(CTX, format!("line {}: {m}", idx + 1));
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("segment") => {
                let length = num(CTX, "length", tok.next().ok_or_else(|| at("missing length".into()))?)?;
                let phase = match tok.next() {
                    Some("+1" | "1" | "plus") => Phase::Plus,
                    Some("-1" | "minus") => Phase::Minus,
                    other => return Err(at(format!("bad phase {other:?}"))),
                };
                let curvature = tok.map(|k| num(CTX, "curvature", k)).collect::<Result<Vec<f64>>>()?;
                if curvature.is_empty() {
                    return Err(at("segment needs at least one curvature sample".into()));
                }
                if junctions.len() != segments.len() {
                    return Err(at("two segments without a junction between them".into()));
                }
                segments.push(Segment {
                    length,
                    phase,
                    curvature,
                });
            }
            Some("junction") => {
                let turn = num(CTX, "turn", tok.next().ok_or_else(|| at("missing turn".into()))?)?;
                let kind = tok
                    .next()
                    .and_then(JunctionKind::from_name)
                    .ok_or_else(|| at("missing or unknown junction kind".into()))?;
                if tok.next().is_some() {
                    return Err(at("trailing tokens".into()));
                }
                if junctions.len() + 1 != segments.len() {
                    return Err(at("junction must follow a segment".into()));
                }
                junctions.push(Junction { turn, kind });
            }
            Some(other) => return Err(at(format!("unknown record {other:?}"))),
            None => unreachable!(),
        }
    }
    let sharp = SharpState { segments, junctions };
    sharp.validate_structure()?;
    Ok(sharp)
}

pub fn write_energy_log(log: &[LogEntry]) -> String {
    let mut out = String::from(ENERGY_LOG_HEADER);
    out.push('\n');
    for e in log {
        let b = &e.energy;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            e.step,
            e.time,
            b.total,
            b.curvature,
            b.interface,
            b.regularization,
            e.mass_defect,
            e.closure[0],
            e.closure[1]
        );
    }
    out
}

/// The relaxed column is empty for rows without relaxation.
pub fn write_sweep(table: &SweepTable) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &table.rows {
        let relaxed = r.e_relaxed.map(|e| e.total.to_string()).unwrap_or_default();
        let e = &r.e_recovery;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{relaxed},{},{}",
            r.eps, r.n_points, e.total, e.curvature, e.interface, e.regularization, r.e_sharp.total, r.gap
        );
    }
    out
}

/// Energy breakdown as `key=value` lines.
pub fn format_energy(e: &EnergyBreakdown) -> String {
    format!(
        "e_total={}\ne_curvature={}\ne_interface={}\ne_regularization={}\n",
        e.total, e.curvature, e.interface, e.regularization
    )
}
