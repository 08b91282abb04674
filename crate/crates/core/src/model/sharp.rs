//! Piecewise description of a limit curve: arcs carrying a pure phase,
//! separated by interfaces and kinks.

use std::f64::consts::{PI, TAU};

use super::geometry::{norm, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Minus,
    Plus,
}

impl Phase {
    pub fn sign(self) -> f64 {
        match self {
            Phase::Minus => -1.0,
            Phase::Plus => 1.0,
        }
    }

    pub fn from_sign(x: f64) -> Self {
        if x < 0.0 {
            Phase::Minus
        } else {
            Phase::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Phase::Minus => Phase::Plus,
            Phase::Plus => Phase::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JunctionKind {
    /// Phase change together with a kink.
    Interface,
    /// Kink inside one phase.
    Ghost,
    /// Phase change without a kink.
    PlainInterface,
}

impl JunctionKind {
    pub fn classify(left: Phase, right: Phase, jump: f64) -> Option<Self> {
        match (left == right, jump > 0.0) {
            (false, true) => Some(JunctionKind::Interface),
            (false, false) => Some(JunctionKind::PlainInterface),
            (true, true) => Some(JunctionKind::Ghost),
            (true, false) => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JunctionKind::Interface => "interface",
            JunctionKind::Ghost => "ghost",
            JunctionKind::PlainInterface => "plain_interface",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "interface" => Some(JunctionKind::Interface),
            "ghost" => Some(JunctionKind::Ghost),
            "plain_interface" => Some(JunctionKind::PlainInterface),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub phase: Phase,
    /// Curvature on `curvature.len()` equal cells covering the segment.
    pub curvature: Vec<f64>,
}

impl Segment {
    pub fn arc(length: f64, phase: Phase, curvature: f64) -> Self {
        Self {
            length,
            phase,
            curvature: vec![curvature],
        }
    }

    pub fn cell_length(&self) -> f64 {
        self.length / self.curvature.len() as f64
    }

    /// Total turning `∫ κ` over the segment.
    pub fn turning(&self) -> f64 {
        self.cell_length() * self.curvature.iter().sum::<f64>()
    }

    /// Turning accumulated from the start of the segment up to arclength `s`.
    pub fn turning_to(&self, s: f64) -> f64 {
        let cell = self.cell_length();
        let s = s.clamp(0.0, self.length);
        let full = ((s / cell).floor() as usize).min(self.curvature.len() - 1);
        let head: f64 = self.curvature[..full].iter().sum::<f64>() * cell;
        head + self.curvature[full] * (s - full as f64 * cell)
    }

    pub fn curvature_at(&self, s: f64) -> f64 {
        let cell = self.cell_length();
        let k = ((s / cell).floor().max(0.0) as usize).min(self.curvature.len() - 1);
        self.curvature[k]
    }

    pub fn mean_curvature(&self) -> f64 {
        self.curvature.iter().sum::<f64>() / self.curvature.len() as f64
    }
}

/// A tangent discontinuity or phase change; `turn` is the signed turning
/// angle across the junction, reduced to `[-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Junction {
    pub turn: f64,
    pub kind: JunctionKind,
}

impl Junction {
    /// `|[q']|`, the enclosed tangent angle.
    pub fn jump(&self) -> f64 {
        self.turn.abs()
    }
}

/// Junction `i` sits at the end of segment `i`; the last junction closes the
/// curve at arclength `L ≡ 0`. A state without junctions is a single smooth
/// closed arc.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpState {
    pub segments: Vec<Segment>,
    pub junctions: Vec<Junction>,
}

impl SharpState {
    /// Smooth single-phase circle.
    pub fn circle(radius: f64, phase: Phase) -> Self {
        Self {
            segments: vec![Segment::arc(TAU * radius, phase, 1.0 / radius)],
            junctions: Vec::new(),
        }
    }

    /// Rotationally symmetric closed curve made of `phases.len()` equal arcs,
    /// each followed by a junction turning by `junction_turn`.
    pub fn symmetric_arcs(length: f64, phases: &[Phase], junction_turn: f64) -> Result<Self> {
        let k = phases.len();
        if k < 2 {
            return Err(Error::InvalidSharpState("need at least two arcs".into()));
        }
        let seg_len = length / k as f64;
        let arc_turn = TAU / k as f64 - junction_turn;
        let segments = phases
            .iter()
            .map(|&p| Segment::arc(seg_len, p, arc_turn / seg_len))
            .collect::<Vec<_>>();
        let mut junctions = Vec::with_capacity(k);
        for i in 0..k {
            let kind = JunctionKind::classify(phases[i], phases[(i + 1) % k], junction_turn.abs())
                .ok_or_else(|| Error::InvalidSharpState(format!("junction {i} neither changes phase nor kinks")))?;
            junctions.push(Junction {
                turn: junction_turn,
                kind,
            });
        }
        Ok(Self { segments, junctions })
    }

    /// Circle split into two halves of opposite phase (`-1` first) by two plain interfaces.
    pub fn two_phase_circle(radius: f64) -> Self {
        Self::symmetric_arcs(TAU * radius, &[Phase::Minus, Phase::Plus], 0.0)
            .expect("two distinct phases always form valid junctions")
    }

    /// Two mirrored circular arcs meeting at two ghost kinks of jump π/2.
    pub fn lens(length: f64, phase: Phase) -> Self {
        Self::symmetric_arcs(length, &[phase, phase], PI / 2.0).expect("kinked junctions are always valid")
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// `Σ phase_i · length_i`.
    pub fn mass(&self) -> f64 {
        self.segments.iter().map(|s| s.phase.sign() * s.length).sum()
    }

    pub fn total_turning(&self) -> f64 {
        self.segments.iter().map(Segment::turning).sum::<f64>() + self.junctions.iter().map(|j| j.turn).sum::<f64>()
    }

    pub fn winding(&self) -> i64 {
        (self.total_turning() / TAU).round() as i64
    }

    /// Arclength at which segment `i` starts.
    pub fn segment_start(&self, i: usize) -> f64 {
        self.segments[..i].iter().map(|s| s.length).sum()
    }

    /// Arclength of junction `i` (the end of segment `i`).
    pub fn junction_position(&self, i: usize) -> f64 {
        self.segment_start(i + 1)
    }

    pub fn junction_positions(&self) -> Vec<f64> {
        (0..self.junctions.len()).map(|i| self.junction_position(i)).collect()
    }

    /// Index of the segment containing `t ∈ [0, L)` (right-continuous) and the offset into it.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let mut start = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            if t < start + seg.length || i + 1 == self.segments.len() {
                return (i, t - start);
            }
            start += seg.length;
        }
        unreachable!("segments are nonempty")
    }

    fn start_angles(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut a = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            out.push(a);
            a += seg.turning();
            if let Some(j) = self.junctions.get(i) {
                a += j.turn;
            }
        }
        out
    }

    /// Lifted tangent angle at any real arclength, with `u(0+) = 0` and
    /// `u(t + L) = u(t) + 2π·winding`. Right-continuous at junctions.
    pub fn angle_at(&self, t: f64) -> f64 {
        let l = self.length();
        let periods = (t / l).floor();
        let local = t - periods * l;
        let (i, s) = self.locate(local);
        let starts = self.start_angles();
        starts[i] + self.segments[i].turning_to(s) + TAU * self.winding() as f64 * periods
    }

    /// Lifted angle at `t` approached from the left.
    pub fn angle_before(&self, t: f64) -> f64 {
        let l = self.length();
        let periods = (t / l).ceil() - 1.0;
        let local = t - periods * l;
        // local ∈ (0, L]
        let mut start = 0.0;
        let starts = self.start_angles();
        for (i, seg) in self.segments.iter().enumerate() {
            if local <= start + seg.length || i + 1 == self.segments.len() {
                return starts[i] + seg.turning_to(local - start) + TAU * self.winding() as f64 * periods;
            }
            start += seg.length;
        }
        unreachable!("segments are nonempty")
    }

    pub fn phase_at(&self, t: f64) -> Phase {
        let l = self.length();
        self.segments[self.locate(t.rem_euclid(l)).0].phase
    }

    pub fn curvature_at(&self, t: f64) -> f64 {
        let l = self.length();
        let (i, s) = self.locate(t.rem_euclid(l));
        self.segments[i].curvature_at(s)
    }

    /// Vertices at the segment ends, integrating each constant-curvature cell exactly.
    pub fn reconstruct(&self) -> Vec<Point> {
        let mut pts = vec![[0.0, 0.0]];
        let mut q = [0.0, 0.0];
        let mut a = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let cell = seg.cell_length();
            for &k in &seg.curvature {
                let (dx, dy) = arc_displacement(a, k, cell);
                q = [q[0] + dx, q[1] + dy];
                a += k * cell;
            }
            pts.push(q);
            if let Some(j) = self.junctions.get(i) {
                a += j.turn;
            }
        }
        pts
    }

    pub fn closure_defect(&self) -> Point {
        *self.reconstruct().last().expect("at least the start point")
    }

    /// Checks segment/junction bookkeeping and junction kinds.
    pub fn validate_structure(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSharpState(m));
        if self.segments.is_empty() {
            return bad("no segments".into());
        }
        let nj = self.junctions.len();
        if !(nj == self.segments.len() || (nj == 0 && self.segments.len() == 1)) {
            return bad(format!(
                "{} segments need as many junctions, found {nj}",
                self.segments.len()
            ));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.length > 0.0) || s.curvature.is_empty() {
                return bad(format!("segment {i} has no length or no curvature samples"));
            }
        }
        for (i, j) in self.junctions.iter().enumerate() {
            let left = self.segments[i].phase;
            let right = self.segments[(i + 1) % self.segments.len()].phase;
            if !(j.turn.abs() <= PI) {
                return bad(format!("junction {i} turn {} outside [-π, π]", j.turn));
            }
            let ok = match j.kind {
                JunctionKind::Interface => left != right && j.jump() > 0.0,
                JunctionKind::PlainInterface => left != right && j.jump() == 0.0,
                JunctionKind::Ghost => left == right && j.jump() > 0.0,
            };
            if !ok {
                return bad(format!("junction {i} is inconsistent with kind {}", j.kind.name()));
            }
        }
        Ok(())
    }

    /// Checks all invariants against a total length, an optional mean phase
    /// and a closure tolerance.
    pub fn validate(&self, length: f64, volume: Option<f64>, closure_tol: f64) -> Result<()> {
        self.validate_structure()?;
        let bad = |m: String| Err(Error::InvalidSharpState(m));
        let total = self.length();
        if (total - length).abs() > 1e-12 * length {
            return bad(format!("segment lengths sum to {total}, expected {length}"));
        }
        if let Some(m) = volume {
            let mass = self.mass();
            if (mass - m * length).abs() > 1e-12 * length {
                return bad(format!("phase mass {mass} differs from m·L = {}", m * length));
            }
        }
        let turning = self.total_turning();
        if (turning - TAU * self.winding() as f64).abs() > 1e-9 * (1.0 + turning.abs()) {
            return bad(format!("total turning {turning} is not a multiple of 2π"));
        }
        let gap = norm(self.closure_defect());
        if gap > closure_tol {
            return bad(format!("curve does not close: gap {gap:.3e}"));
        }
        Ok(())
    }
}

/// Displacement along an arc of curvature `k` and length `len` starting at angle `a`.
fn arc_displacement(a: f64, k: f64, len: f64) -> (f64, f64) {
    let turn = k * len;
    if turn.abs() < 1e-6 {
        // series of the sinc-type expressions
        let mid = a + 0.5 * turn;
        let f = len * (1.0 - turn * turn / 24.0);
        (f * mid.cos(), f * mid.sin())
    } else {
        (((a + turn).sin() - a.sin()) / k, (a.cos() - (a + turn).cos()) / k)
    }
}
